"""Equalized-odds post-processing of classifier outputs.

Both variants force every group's derived predictor onto one common
(fpr, tpr) operating point, chosen to minimize expected weighted
misclassification loss over the intersection of the groups' achievable
regions:

* hard variant: the input is a binary base prediction per sample; each
  group's achievable region is the parallelogram spanned by the constant
  predictors, the base operating point bound to that group, and its
  negation.  The fitted parameters are per-group randomization
  probabilities p0 = P(output 1 | base 0) and p1 = P(output 1 | base 1).

* soft variant: the input is a score per sample; each group's achievable
  region is the convex hull of its empirical ROC operating points together
  with (0, 0) and (1, 1).  The fitted per-group policy mixes two score
  thresholds, and, when the common target lies strictly below the group's
  ROC upper envelope, additionally mixes in a score-independent coin so
  the target is met exactly in expectation.

The optimization is solved exactly: the feasible set is a convex polygon
obtained by half-plane clipping, the objective is linear, and the optimum
is found by a vertex scan with deterministic tie-breaking (tpr descending,
then fpr ascending).

Randomized application derives all per-sample draws from
(seed, sample id), so results are reproducible and order-independent.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import GroupMismatchError, ValidationError
from .geometry import argmin_linear, convex_hull_indices, intersect_regions
from .metrics import GroupRateEntry, GroupRates, confusion_rates, roc_curve
from .predictions import LabeledPredictions

_DIAG_TOL = 1e-12


@dataclass(frozen=True)
class LossSpec:
    """Expected-loss objective: cost_fp * P(false positive) + cost_fn *
    P(false negative), with group weights defaulting to empirical group
    frequencies and class shares always empirical."""

    cost_fp: float = 1.0
    cost_fn: float = 1.0
    group_weights: Mapping[str, float] | None = None

    def __post_init__(self):
        if self.cost_fp < 0 or self.cost_fn < 0:
            raise ValidationError("loss costs must be non-negative")
        if self.cost_fp == 0 and self.cost_fn == 0:
            raise ValidationError("loss costs must not both be zero")
        if self.group_weights is not None:
            gw = dict(self.group_weights)
            if any(w < 0 for w in gw.values()) or sum(gw.values()) <= 0:
                raise ValidationError("group weights must be non-negative with positive sum")
            object.__setattr__(self, "group_weights", gw)

    def to_dict(self) -> dict:
        return {
            "cost_fp": self.cost_fp,
            "cost_fn": self.cost_fn,
            "group_weights": dict(self.group_weights) if self.group_weights else None,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "LossSpec":
        return LossSpec(
            cost_fp=d.get("cost_fp", 1.0),
            cost_fn=d.get("cost_fn", 1.0),
            group_weights=d.get("group_weights"),
        )


def _group_weights(rates: GroupRates, loss: LossSpec, groups: tuple[str, ...]) -> dict[str, float]:
    if loss.group_weights is not None:
        missing = [g for g in groups if g not in loss.group_weights]
        if missing:
            raise ValidationError(f"group weights missing for groups {missing}")
        total = sum(loss.group_weights[g] for g in groups)
        return {g: loss.group_weights[g] / total for g in groups}
    total = sum(rates[g].n_pos + rates[g].n_neg for g in groups)
    return {g: (rates[g].n_pos + rates[g].n_neg) / total for g in groups}


def loss_coefficients(rates: GroupRates, loss: LossSpec, groups: tuple[str, ...] | None = None) -> tuple[float, float]:
    """(k_fp, k_fn) such that a common operating point (x, y) costs
    k_fp * x + k_fn * (1 - y)."""
    groups = groups or tuple(g for g in rates.groups if rates[g].n_pos + rates[g].n_neg > 0)
    w = _group_weights(rates, loss, groups)
    k_fp = k_fn = 0.0
    for g in groups:
        e = rates[g]
        n = e.n_pos + e.n_neg
        if n == 0:
            continue
        k_fp += loss.cost_fp * w[g] * (e.n_neg / n)
        k_fn += loss.cost_fn * w[g] * (e.n_pos / n)
    return k_fp, k_fn


def expected_loss_of_rates(rates: GroupRates, loss: LossSpec) -> float:
    """Expected weighted loss of a predictor whose per-group operating
    points are given by ``rates``.  Groups with an undefined rate
    contribute nothing through that rate (its class share is zero)."""
    groups = tuple(g for g in rates.groups if rates[g].n_pos + rates[g].n_neg > 0)
    w = _group_weights(rates, loss, groups)
    total = 0.0
    for g in groups:
        e = rates[g]
        n = e.n_pos + e.n_neg
        if e.fpr is not None:
            total += loss.cost_fp * w[g] * (e.n_neg / n) * e.fpr
        if e.tpr is not None:
            total += loss.cost_fn * w[g] * (e.n_pos / n) * (1.0 - e.tpr)
    return total


def expected_accuracy_of_rates(rates: GroupRates) -> float:
    """Expected accuracy under empirical group/class frequencies."""
    return 1.0 - expected_loss_of_rates(rates, LossSpec(1.0, 1.0))


# ---------------------------------------------------------------------------
# counter-based randomness: one digest per (seed, purpose, sample id)

def sample_uniforms(seed: int, purpose: str, sample_id: str, n: int = 3) -> tuple[float, ...]:
    """n uniforms in [0, 1) derived from (seed, purpose, sample id)."""
    msg = f"{seed}\x1f{purpose}\x1f{sample_id}".encode()
    digest = hashlib.blake2b(msg, digest_size=8 * n).digest()
    return tuple(
        int.from_bytes(digest[8 * i : 8 * (i + 1)], "big") / 2.0**64 for i in range(n)
    )


def derive_seed(seed: int, tag: str) -> int:
    """Stable child seed for a named sub-stream."""
    digest = hashlib.blake2b(f"{seed}\x1f{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


# ---------------------------------------------------------------------------
# hard variant


@dataclass(frozen=True)
class HardGroupPolicy:
    """Randomization probabilities for one group: p0 = P(output 1 | base
    prediction 0), p1 = P(output 1 | base prediction 1)."""

    p0: float
    p1: float

    def derived_point(self, base_fpr: float, base_tpr: float) -> tuple[float, float]:
        return (
            self.p0 * (1.0 - base_fpr) + self.p1 * base_fpr,
            self.p0 * (1.0 - base_tpr) + self.p1 * base_tpr,
        )


@dataclass(frozen=True)
class HardDerivedPredictor:
    """Per-group output randomization achieving a common (fpr, tpr)."""

    policies: Mapping[str, HardGroupPolicy]
    target: tuple[float, float]
    fit_rates: GroupRates
    loss: LossSpec
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "policies", dict(self.policies))

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(self.policies)

    def to_dict(self) -> dict:
        return {
            "variant": "hard",
            "target": {"fpr": self.target[0], "tpr": self.target[1]},
            "objective": self.objective,
            "loss": self.loss.to_dict(),
            "fit_rates": self.fit_rates.to_dict(),
            "groups": {
                g: {"p0": p.p0, "p1": p.p1} for g, p in sorted(self.policies.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_dict(d: Mapping) -> "HardDerivedPredictor":
        return HardDerivedPredictor(
            policies={g: HardGroupPolicy(v["p0"], v["p1"]) for g, v in d["groups"].items()},
            target=(d["target"]["fpr"], d["target"]["tpr"]),
            fit_rates=GroupRates.from_dict(d["fit_rates"]),
            loss=LossSpec.from_dict(d["loss"]),
            objective=d["objective"],
        )


def _hard_region(base_fpr: float, base_tpr: float) -> np.ndarray:
    pts = np.array(
        [
            [0.0, 0.0],
            [base_fpr, base_tpr],
            [1.0, 1.0],
            [1.0 - base_fpr, 1.0 - base_tpr],
        ]
    )
    return pts[convex_hull_indices(pts)]


def _require_fit_groups(rates: GroupRates) -> tuple[str, ...]:
    groups = tuple(g for g in rates.groups if rates[g].n_pos + rates[g].n_neg > 0)
    if len(groups) < 2:
        raise ValidationError("equalized-odds fitting requires at least 2 groups")
    undefined = [g for g in groups if rates[g].tpr is None or rates[g].fpr is None]
    if undefined:
        raise ValidationError(
            f"groups with undefined base rates (missing a class): {undefined}"
        )
    return groups


def fit_eo_hard(preds: LabeledPredictions, loss: LossSpec = LossSpec()) -> HardDerivedPredictor:
    """Fit per-group randomization of hard predictions so that derived
    tpr and fpr are exactly equal across groups, minimizing expected loss."""
    rates = confusion_rates(preds)
    groups = _require_fit_groups(rates)
    k_fp, k_fn = loss_coefficients(rates, loss, groups)
    regions = [_hard_region(rates[g].fpr, rates[g].tpr) for g in groups]
    vertices = intersect_regions(regions)
    if len(vertices) == 0:
        vertices = np.array([[0.0, 0.0], [1.0, 1.0]])
    x, y = argmin_linear(vertices, k_fp, -k_fn)
    policies: dict[str, HardGroupPolicy] = {}
    for g in groups:
        f, t = rates[g].fpr, rates[g].tpr
        det = f - t
        if abs(det) <= _DIAG_TOL:
            p0 = p1 = min(max(y, 0.0), 1.0) + 0.0
        else:
            p0 = (y * f - t * x) / det
            p1 = ((1.0 - t) * x - (1.0 - f) * y) / det
            p0 = min(max(p0, 0.0), 1.0) + 0.0  # +0.0 folds -0.0 into 0.0
            p1 = min(max(p1, 0.0), 1.0) + 0.0
        policies[g] = HardGroupPolicy(p0=p0, p1=p1)
    return HardDerivedPredictor(
        policies=policies,
        target=(x, y),
        fit_rates=rates,
        loss=loss,
        objective=k_fp * x + k_fn * (1.0 - y),
    )


def apply_hard(dp: HardDerivedPredictor, preds: LabeledPredictions, seed: int) -> np.ndarray:
    """Randomize base hard predictions per the fitted policies.

    Deterministic in (dp, preds, seed); per-sample draws are derived from
    the sample id, so row order does not matter.
    """
    if preds.y_hat is None:
        raise ValidationError("apply_hard requires hard predictions (y_hat)")
    unknown = set(preds.groups) - set(dp.policies)
    if unknown:
        raise GroupMismatchError(f"groups not covered by the derived predictor: {sorted(unknown)}")
    out = np.zeros(len(preds), dtype=np.int8)
    for i in range(len(preds)):
        pol = dp.policies[preds.groups[i]]
        p = pol.p1 if preds.y_hat[i] == 1 else pol.p0
        (u,) = sample_uniforms(seed, "eo-hard", preds.ids[i], n=1)
        out[i] = 1 if u < p else 0
    return out


# ---------------------------------------------------------------------------
# soft variant


@dataclass(frozen=True)
class SoftGroupPolicy:
    """Randomized thresholding for one group.

    With probability ``p_coin`` the score is ignored and the output is a
    Bernoulli(coin_rate) draw; otherwise threshold ``t_lo`` is used with
    probability ``lam`` and ``t_hi`` with probability 1 - lam (predict
    positive when score >= threshold).  ``point_lo``/``point_hi`` are the
    (fpr, tpr) operating points of the two thresholds at fit time.  The
    coin is only engaged when the common target lies strictly inside the
    group's achievable region, where no two-threshold mixture can reach it.
    """

    t_lo: float
    t_hi: float
    lam: float
    point_lo: tuple[float, float]
    point_hi: tuple[float, float]
    p_coin: float = 0.0
    coin_rate: float = 0.0

    def derived_point(self) -> tuple[float, float]:
        x = self.lam * self.point_lo[0] + (1.0 - self.lam) * self.point_hi[0]
        y = self.lam * self.point_lo[1] + (1.0 - self.lam) * self.point_hi[1]
        return (
            (1.0 - self.p_coin) * x + self.p_coin * self.coin_rate,
            (1.0 - self.p_coin) * y + self.p_coin * self.coin_rate,
        )


@dataclass(frozen=True)
class SoftDerivedPredictor:
    """Per-group randomized thresholds achieving a common (fpr, tpr)."""

    policies: Mapping[str, SoftGroupPolicy]
    target: tuple[float, float]
    fit_rates: GroupRates
    loss: LossSpec
    objective: float

    def __post_init__(self):
        object.__setattr__(self, "policies", dict(self.policies))

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(self.policies)

    def to_dict(self) -> dict:
        return {
            "variant": "soft",
            "target": {"fpr": self.target[0], "tpr": self.target[1]},
            "objective": self.objective,
            "loss": self.loss.to_dict(),
            "fit_rates": self.fit_rates.to_dict(),
            "groups": {
                g: {
                    "t_lo": p.t_lo,
                    "t_hi": p.t_hi,
                    "lam": p.lam,
                    "p_coin": p.p_coin,
                    "coin_rate": p.coin_rate,
                    "point_lo": list(p.point_lo),
                    "point_hi": list(p.point_hi),
                }
                for g, p in sorted(self.policies.items())
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_dict(d: Mapping) -> "SoftDerivedPredictor":
        return SoftDerivedPredictor(
            policies={
                g: SoftGroupPolicy(
                    t_lo=v["t_lo"],
                    t_hi=v["t_hi"],
                    lam=v["lam"],
                    p_coin=v["p_coin"],
                    coin_rate=v["coin_rate"],
                    point_lo=tuple(v["point_lo"]),
                    point_hi=tuple(v["point_hi"]),
                )
                for g, v in d["groups"].items()
            },
            target=(d["target"]["fpr"], d["target"]["tpr"]),
            fit_rates=GroupRates.from_dict(d["fit_rates"]),
            loss=LossSpec.from_dict(d["loss"]),
            objective=d["objective"],
        )


def _upper_chain(points: np.ndarray) -> list[int]:
    """Indices of the upper envelope of (x, y) points, left to right."""
    order = np.lexsort((points[:, 1], points[:, 0]))
    chain: list[int] = []
    for i in order:
        while len(chain) >= 2 and (
            (points[chain[-1], 0] - points[chain[-2], 0]) * (points[i, 1] - points[chain[-2], 1])
            - (points[chain[-1], 1] - points[chain[-2], 1]) * (points[i, 0] - points[chain[-2], 0])
        ) >= -1e-15:
            chain.pop()
        chain.append(int(i))
    return chain


def _decompose_soft(
    curve_pts: np.ndarray, thresholds: np.ndarray, chain: list[int], x: float, y: float
) -> SoftGroupPolicy:
    """Express the target (x, y) as a mixture the group can realize.

    On the envelope: a two-threshold mixture.  Strictly inside: the
    envelope mixture at the same fpr blended with a Bernoulli(x) coin.
    On the diagonal: a mixture of the all-negative and all-positive
    thresholds.
    """
    if y - x <= _DIAG_TOL:
        i_zero = chain[0]  # (0, 0) at threshold +inf
        i_all = int(np.argmin(thresholds))  # (1, 1) at the lowest threshold
        lam = min(max(y, 0.0), 1.0)
        return SoftGroupPolicy(
            t_lo=float(thresholds[i_all]),
            t_hi=float(thresholds[i_zero]),
            lam=lam,
            point_lo=(float(curve_pts[i_all, 0]), float(curve_pts[i_all, 1])),
            point_hi=(float(curve_pts[i_zero, 0]), float(curve_pts[i_zero, 1])),
        )
    # locate the envelope segment covering x, taking the highest attainable y
    best = None
    for a, b in zip(chain, chain[1:]):
        xa, xb = curve_pts[a, 0], curve_pts[b, 0]
        if x < xa - 1e-12 or x > xb + 1e-12:
            continue
        if xb - xa <= 1e-15:
            top = a if curve_pts[a, 1] >= curve_pts[b, 1] else b
            cand = (1.0, top, top, float(curve_pts[top, 1]))
        else:
            lam = (x - xa) / (xb - xa)
            lam = min(max(lam, 0.0), 1.0)
            mix_y = lam * curve_pts[b, 1] + (1.0 - lam) * curve_pts[a, 1]
            cand = (lam, b, a, mix_y)
        if best is None or cand[3] > best[3]:
            best = cand
    if best is None:  # x outside the chain span; clamp to the nearest endpoint
        idx = chain[0] if x <= curve_pts[chain[0], 0] else chain[-1]
        best = (1.0, idx, idx, float(curve_pts[idx, 1]))
    lam, i_lo, i_hi, mix_y = best
    # snap near-degenerate mixtures onto the exact vertex (clipping noise)
    if lam >= 1.0 - 1e-12:
        lam, i_hi, mix_y = 1.0, i_lo, float(curve_pts[i_lo, 1])
    elif lam <= 1e-12:
        lam, i_lo, mix_y = 1.0, i_hi, float(curve_pts[i_hi, 1])
    policy = SoftGroupPolicy(
        t_lo=float(thresholds[i_lo]),
        t_hi=float(thresholds[i_hi]),
        lam=float(lam),
        point_lo=(float(curve_pts[i_lo, 0]), float(curve_pts[i_lo, 1])),
        point_hi=(float(curve_pts[i_hi, 0]), float(curve_pts[i_hi, 1])),
    )
    if mix_y <= y + _DIAG_TOL:
        return policy
    alpha = (y - x) / (mix_y - x)
    alpha = min(max(float(alpha), 0.0), 1.0)
    return SoftGroupPolicy(
        t_lo=policy.t_lo,
        t_hi=policy.t_hi,
        lam=policy.lam,
        point_lo=policy.point_lo,
        point_hi=policy.point_hi,
        p_coin=1.0 - alpha,
        coin_rate=float(x),
    )


def _soft_group_counts(preds: LabeledPredictions) -> GroupRates:
    """Counts-only GroupRates (rates undefined) for loss weighting."""
    out = {}
    for g in preds.present_groups():
        m = preds.group_mask(g)
        n_pos = int(np.sum(preds.y_true[m] == 1))
        n_neg = int(np.sum(preds.y_true[m] == 0))
        out[g] = GroupRateEntry(tpr=None, tnr=None, fpr=None, fnr=None, n_pos=n_pos, n_neg=n_neg)
    return GroupRates(out)


def fit_eo_soft(preds: LabeledPredictions, loss: LossSpec = LossSpec()) -> SoftDerivedPredictor:
    """Fit per-group randomized thresholds on scores so that derived tpr
    and fpr are exactly equal across groups, minimizing expected loss."""
    if preds.scores is None:
        raise ValidationError("fit_eo_soft requires scores")
    counts = _soft_group_counts(preds)
    groups = tuple(counts.groups)
    if len(groups) < 2:
        raise ValidationError("equalized-odds fitting requires at least 2 groups")
    lacking = [g for g in groups if counts[g].n_pos == 0 or counts[g].n_neg == 0]
    if lacking:
        raise ValidationError(f"groups missing a class: {lacking}")
    k_fp, k_fn = loss_coefficients(counts, loss, groups)

    geoms: dict[str, tuple[np.ndarray, np.ndarray, list[int]]] = {}
    regions: list[np.ndarray] = []
    for g in groups:
        m = preds.group_mask(g)
        curve = roc_curve(preds.scores[m], preds.y_true[m])
        pts = np.column_stack((curve.fpr, curve.tpr))
        hull = convex_hull_indices(pts)
        regions.append(pts[hull])
        geoms[g] = (pts, curve.thresholds, _upper_chain(pts))
    vertices = intersect_regions(regions)
    if len(vertices) == 0:
        vertices = np.array([[0.0, 0.0], [1.0, 1.0]])
    x, y = argmin_linear(vertices, k_fp, -k_fn)
    policies = {
        g: _decompose_soft(geoms[g][0], geoms[g][1], geoms[g][2], x, y) for g in groups
    }
    return SoftDerivedPredictor(
        policies=policies,
        target=(x, y),
        fit_rates=counts,
        loss=loss,
        objective=k_fp * x + k_fn * (1.0 - y),
    )


def apply_soft(dp: SoftDerivedPredictor, preds: LabeledPredictions, seed: int) -> np.ndarray:
    """Apply the fitted randomized-threshold policies to scores.

    Deterministic in (dp, preds, seed).  A degenerate single-threshold
    policy reduces to plain thresholding with no randomness involved.
    """
    if preds.scores is None:
        raise ValidationError("apply_soft requires scores")
    unknown = set(preds.groups) - set(dp.policies)
    if unknown:
        raise GroupMismatchError(f"groups not covered by the derived predictor: {sorted(unknown)}")
    out = np.zeros(len(preds), dtype=np.int8)
    for i in range(len(preds)):
        pol = dp.policies[preds.groups[i]]
        degenerate = pol.p_coin == 0.0 and (pol.lam in (0.0, 1.0) or pol.t_lo == pol.t_hi)
        if degenerate:
            t = pol.t_lo if pol.lam > 0.0 else pol.t_hi
            out[i] = 1 if preds.scores[i] >= t else 0
            continue
        u_sel, u_coin, u_mix = sample_uniforms(seed, "eo-soft", preds.ids[i], n=3)
        if pol.p_coin > 0.0 and u_sel < pol.p_coin:
            out[i] = 1 if u_coin < pol.coin_rate else 0
        else:
            t = pol.t_lo if u_mix < pol.lam else pol.t_hi
            out[i] = 1 if preds.scores[i] >= t else 0
    return out


# ---------------------------------------------------------------------------
# expectations


def expected_rates(
    dp: HardDerivedPredictor | SoftDerivedPredictor, base_rates: GroupRates | None = None
) -> GroupRates:
    """Closed-form expected derived rates per group.

    For a hard predictor the expectation is taken over the given base
    rates (defaulting to the fit-time rates); for a soft predictor it
    follows from the stored operating points, and ``base_rates`` only
    supplies group counts.
    """
    rates = base_rates if base_rates is not None else dp.fit_rates
    missing = [g for g in dp.groups if g not in rates.groups]
    if missing:
        raise GroupMismatchError(f"base rates missing groups: {missing}")
    out: dict[str, GroupRateEntry] = {}
    for g in dp.groups:
        base = rates[g]
        pol = dp.policies[g]
        if isinstance(pol, HardGroupPolicy):
            if base.fpr is None or base.tpr is None:
                raise GroupMismatchError(f"group {g!r} lacks defined base rates")
            fpr, tpr = pol.derived_point(base.fpr, base.tpr)
        else:
            fpr, tpr = pol.derived_point()
        out[g] = GroupRateEntry(
            tpr=tpr, tnr=1.0 - fpr, fpr=fpr, fnr=1.0 - tpr, n_pos=base.n_pos, n_neg=base.n_neg
        )
    return GroupRates(out)


def expected_loss(dp: HardDerivedPredictor | SoftDerivedPredictor, loss: LossSpec | None = None) -> float:
    """Expected loss of the derived predictor under its fit-time frequencies."""
    return expected_loss_of_rates(expected_rates(dp), loss if loss is not None else dp.loss)


def unconstrained_optimum_loss(rates: GroupRates, loss: LossSpec, soft_regions: Mapping[str, np.ndarray] | None = None) -> float:
    """Loss of the best per-group derived predictor with no cross-group
    constraint: each group independently picks its optimal achievable
    point.  Lower-bounds every equalized-odds fit on the same data."""
    groups = tuple(g for g in rates.groups if rates[g].n_pos + rates[g].n_neg > 0)
    w = _group_weights(rates, loss, groups)
    total = 0.0
    for g in groups:
        e = rates[g]
        n = e.n_pos + e.n_neg
        kf = loss.cost_fp * w[g] * (e.n_neg / n)
        kn = loss.cost_fn * w[g] * (e.n_pos / n)
        if soft_regions is not None:
            region = soft_regions[g]
        else:
            region = _hard_region(e.fpr, e.tpr)
        x, y = argmin_linear(np.asarray(region, dtype=np.float64), kf, -kn)
        total += kf * x + kn * (1.0 - y)
    return total


def soft_regions_of(preds: LabeledPredictions) -> dict[str, np.ndarray]:
    """Convex achievable region (hull vertices) per group, from scores."""
    if preds.scores is None:
        raise ValidationError("scores required")
    out = {}
    for g in preds.present_groups():
        m = preds.group_mask(g)
        curve = roc_curve(preds.scores[m], preds.y_true[m])
        pts = np.column_stack((curve.fpr, curve.tpr))
        out[g] = pts[convex_hull_indices(pts)]
    return out


def load_derived_predictor(d: Mapping) -> HardDerivedPredictor | SoftDerivedPredictor:
    variant = d.get("variant")
    if variant == "hard":
        return HardDerivedPredictor.from_dict(d)
    if variant == "soft":
        return SoftDerivedPredictor.from_dict(d)
    raise ValidationError(f"unknown derived-predictor variant: {variant!r}")
