"""Seeded generators for group-structured prediction data and
planted-bias embeddings.

Cohort scores follow class- and group-conditional Gaussians on the logit
scale, so the generating model's true positive / false positive rates at
threshold 0.5 have the closed form Phi(mu / sigma); these analytic rates
are emitted alongside the data for oracle comparisons.  All generators are
pure functions of their config, including the seed.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .debias import BiasSubspace, EmbeddingMatrix, EqualitySets
from .errors import ValidationError
from .predictions import LabeledPredictions

# Test-split group shares of the source cohort's sensitive attributes.
SEX_PROPORTIONS: dict[str, float] = {"F": 0.440, "M": 0.560}
ETHNICITY_PROPORTIONS: dict[str, float] = {
    "ASIAN": 0.019,
    "BLACK": 0.089,
    "HISPANIC": 0.033,
    "OTHER": 0.144,
    "WHITE": 0.715,
}
INSURANCE_PROPORTIONS: dict[str, float] = {
    "Government": 0.023,
    "Medicaid": 0.064,
    "Medicare": 0.550,
    "Private": 0.292,
    "Self Pay": 0.010,
    "UNKNOWN": 0.061,
}
GROUP_PRESETS: dict[str, dict[str, float]] = {
    "sex": SEX_PROPORTIONS,
    "ethnicity": ETHNICITY_PROPORTIONS,
    "insurance": INSURANCE_PROPORTIONS,
}
DEFAULT_POSITIVE_RATE = 0.131


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


@dataclass(frozen=True)
class ScoreModel:
    """Class-conditional logit Gaussians for one group."""

    mu_neg: float = -1.5
    mu_pos: float = 1.5
    sigma_neg: float = 1.0
    sigma_pos: float = 1.0

    def __post_init__(self):
        if self.sigma_neg <= 0 or self.sigma_pos <= 0:
            raise ValidationError("score-model sigmas must be positive")

    def analytic_tpr(self) -> float:
        # P(logit >= 0 | positive); threshold 0.5 on the score scale
        return normal_cdf(self.mu_pos / self.sigma_pos)

    def analytic_fpr(self) -> float:
        return normal_cdf(self.mu_neg / self.sigma_neg)

    def posterior_coefficients(self, positive_rate: float) -> tuple[float, float]:
        """(a, b) such that P(y=1 | logit) = sigmoid(a * logit + b).

        Valid for equal class-conditional sigmas; requires mu_pos > mu_neg.
        """
        if self.sigma_pos != self.sigma_neg:
            raise ValidationError("calibrated scores require equal class sigmas")
        if self.mu_pos <= self.mu_neg:
            raise ValidationError("calibrated scores require mu_pos > mu_neg")
        a = (self.mu_pos - self.mu_neg) / self.sigma_pos**2
        b = math.log(positive_rate / (1.0 - positive_rate)) - a * (self.mu_pos + self.mu_neg) / 2.0
        return a, b

    def calibrated_rates(self, positive_rate: float) -> tuple[float, float]:
        """Analytic (tpr, fpr) of thresholding the posterior at 0.5."""
        a, b = self.posterior_coefficients(positive_rate)
        cutoff = -b / a
        tpr = normal_cdf((self.mu_pos - cutoff) / self.sigma_pos)
        fpr = normal_cdf((self.mu_neg - cutoff) / self.sigma_neg)
        return tpr, fpr

    def to_dict(self) -> dict:
        return {
            "mu_neg": self.mu_neg, "mu_pos": self.mu_pos,
            "sigma_neg": self.sigma_neg, "sigma_pos": self.sigma_pos,
        }


@dataclass(frozen=True)
class CohortConfig:
    """Specification of a synthetic prediction cohort.

    ``modality_windows`` gives, per modality, the [lo, hi) fraction of the
    sample index range on which that modality's score is informative;
    outside its window a modality emits class-independent noise logits.

    With ``calibrated`` the emitted score is the true posterior
    P(y=1 | logit) of the generating model rather than the plain sigmoid
    of the logit, so thresholding at 0.5 is the accuracy-optimal rule.
    """

    groups: Mapping[str, float] = field(default_factory=lambda: dict(SEX_PROPORTIONS))
    positive_rate: float = DEFAULT_POSITIVE_RATE
    score_models: Mapping[str, ScoreModel] | None = None
    n_samples: int = 1000
    seed: int = 0
    modality_windows: tuple[tuple[float, float], ...] = ((0.0, 1.0),)
    calibrated: bool = False
    id_prefix: str = "s"

    def __post_init__(self):
        groups = dict(self.groups)
        if not groups:
            raise ValidationError("at least one group is required")
        if any(p < 0 for p in groups.values()) or abs(sum(groups.values()) - 1.0) > 1e-9:
            raise ValidationError("group proportions must be non-negative and sum to 1")
        if not 0.0 < self.positive_rate < 1.0:
            raise ValidationError("positive rate must lie strictly in (0, 1)")
        if self.n_samples < 1:
            raise ValidationError("sample count must be >= 1")
        if not self.modality_windows:
            raise ValidationError("at least one modality is required")
        for lo, hi in self.modality_windows:
            if not 0.0 <= lo <= hi <= 1.0:
                raise ValidationError("modality windows must satisfy 0 <= lo <= hi <= 1")
        models = dict(self.score_models) if self.score_models else {g: ScoreModel() for g in groups}
        missing = set(groups) - set(models)
        if missing:
            raise ValidationError(f"score models missing for groups {sorted(missing)}")
        if self.calibrated:
            for m in models.values():
                m.posterior_coefficients(self.positive_rate)  # validates shape
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "score_models", models)
        object.__setattr__(self, "modality_windows", tuple(tuple(w) for w in self.modality_windows))

    def to_dict(self) -> dict:
        return {
            "groups": dict(self.groups),
            "positive_rate": self.positive_rate,
            "score_models": {g: m.to_dict() for g, m in self.score_models.items()},
            "n_samples": self.n_samples,
            "seed": self.seed,
            "modality_windows": [list(w) for w in self.modality_windows],
            "calibrated": self.calibrated,
            "id_prefix": self.id_prefix,
        }

    @staticmethod
    def from_dict(d: Mapping) -> "CohortConfig":
        kwargs = dict(d)
        if "score_models" in kwargs and kwargs["score_models"] is not None:
            kwargs["score_models"] = {g: ScoreModel(**m) for g, m in kwargs["score_models"].items()}
        if "modality_windows" in kwargs:
            kwargs["modality_windows"] = tuple(tuple(w) for w in kwargs["modality_windows"])
        return CohortConfig(**kwargs)


@dataclass(frozen=True)
class CohortData:
    """Generated cohort: one prediction set per modality plus the
    generating model's analytic rates at threshold 0.5."""

    modalities: tuple[LabeledPredictions, ...]
    analytic_rates: dict[str, dict[str, float]]
    config: CohortConfig

    def sidecar_json(self) -> str:
        doc = {"analytic_rates": self.analytic_rates, "config": self.config.to_dict()}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def gapped_score_models(
    groups: Mapping[str, float],
    tpr_low: float = 0.60,
    tpr_high: float = 0.85,
    fpr: float = 0.15,
) -> dict[str, ScoreModel]:
    """Score models spreading groups' analytic tpr evenly from low to high
    at a common fpr, for planting controllable fairness gaps."""
    names = list(groups)
    if not 0 < tpr_low <= tpr_high < 1 or not 0 < fpr < 1:
        raise ValidationError("rates must lie strictly in (0, 1)")
    inv = _probit
    out = {}
    for i, g in enumerate(names):
        frac = i / (len(names) - 1) if len(names) > 1 else 0.0
        tpr = tpr_low + frac * (tpr_high - tpr_low)
        out[g] = ScoreModel(mu_neg=inv(fpr), mu_pos=inv(tpr))
    return out


def _probit(p: float) -> float:
    # Newton refinement of an initial rational approximation; exact enough
    # for planting rates (|err| << 1e-12)
    x = _probit_approx(p)
    for _ in range(4):
        err = normal_cdf(x) - p
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf <= 0:
            break
        x -= err / pdf
    return x


def _probit_approx(p: float) -> float:
    # Beasley-Springer-Moro style starting point
    a = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
         1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
    b = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
         6.680131188771972e01, -1.328068155288572e01)
    c = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
         -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
    d = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
         3.754408661907416e00)
    plow = 0.02425
    if p < plow:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    if p > 1 - plow:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def generate_cohort(cfg: CohortConfig) -> CohortData:
    """Draw a cohort deterministically from the config seed."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_samples
    names = list(cfg.groups)
    groups = rng.choice(np.array(names, dtype=object), size=n, p=[cfg.groups[g] for g in names])
    y = (rng.random(n) < cfg.positive_rate).astype(np.int8)
    ids = tuple(f"{cfg.id_prefix}{i:06d}" for i in range(n))
    mu = np.zeros(n)
    sig = np.ones(n)
    for g in names:
        m = groups == g
        model = cfg.score_models[g]
        mu[m & (y == 1)] = model.mu_pos
        sig[m & (y == 1)] = model.sigma_pos
        mu[m & (y == 0)] = model.mu_neg
        sig[m & (y == 0)] = model.sigma_neg
    if cfg.calibrated:
        post_a = np.zeros(n)
        post_b = np.zeros(n)
        for g in names:
            a_g, b_g = cfg.score_models[g].posterior_coefficients(cfg.positive_rate)
            m = groups == g
            post_a[m] = a_g
            post_b[m] = b_g
    idx = np.arange(n)
    modalities = []
    for lo, hi in cfg.modality_windows:
        z = rng.standard_normal(n)
        informative = (idx >= lo * n) & (idx < hi * n)
        logits = np.where(informative, mu + sig * z, z)
        if cfg.calibrated:
            # posterior of the generating model; an uninformative draw
            # carries no evidence, so its posterior is the base rate
            scores = np.where(
                informative,
                1.0 / (1.0 + np.exp(-(post_a * logits + post_b))),
                cfg.positive_rate,
            )
        else:
            scores = 1.0 / (1.0 + np.exp(-logits))
        modalities.append(
            LabeledPredictions(
                ids=ids,
                y_true=y,
                groups=tuple(groups.tolist()),
                scores=scores,
                y_hat=(scores >= 0.5).astype(np.int8),
                universe=tuple(names),
            )
        )
    analytic = {}
    for g in names:
        model = cfg.score_models[g]
        if cfg.calibrated:
            tpr, fpr = model.calibrated_rates(cfg.positive_rate)
        else:
            tpr, fpr = model.analytic_tpr(), model.analytic_fpr()
        analytic[g] = {"tpr": tpr, "fpr": fpr}
    return CohortData(modalities=tuple(modalities), analytic_rates=analytic, config=cfg)


def generate_multilabel(
    n_samples: int,
    n_labels: int = 25,
    seed: int = 0,
    prevalence_start: float = 0.45,
    prevalence_decay: float = 0.90,
    separation: float = 1.5,
) -> tuple[np.ndarray, np.ndarray]:
    """Score/label matrices with geometrically decaying label prevalence.

    Returns (scores, labels) of shape (n_samples, n_labels); label j has
    prevalence ~ prevalence_start * prevalence_decay**j (floored at 1%).
    """
    if n_labels < 2 or n_samples < 1:
        raise ValidationError("need n_labels >= 2 and n_samples >= 1")
    rng = np.random.default_rng(seed)
    prevalence = np.maximum(prevalence_start * prevalence_decay ** np.arange(n_labels), 0.01)
    y = (rng.random((n_samples, n_labels)) < prevalence).astype(np.int8)
    logits = rng.standard_normal((n_samples, n_labels)) + separation * (2.0 * y - 1.0)
    scores = 1.0 / (1.0 + np.exp(-logits))
    return scores, y


@dataclass(frozen=True)
class EmbeddingPlantConfig:
    """Specification of a planted-bias embedding matrix.

    Equality-set words are placed symmetrically about the planted
    directions; all other words are orthogonal to them, up to isotropic
    noise of scale ``noise``.
    """

    equality_sets: tuple[tuple[str, ...], ...]
    vocab_size: int = 50
    dim: int = 25
    n_directions: int | None = None
    noise: float = 0.0
    offset: float = 0.35
    seed: int = 0

    def __post_init__(self):
        sets = tuple(tuple(s) for s in self.equality_sets)
        if not sets or any(len(s) < 2 for s in sets):
            raise ValidationError("equality sets must be non-empty tuples of >= 2 words")
        k = self.n_directions if self.n_directions is not None else max(len(s) for s in sets) - 1
        if k < 1:
            raise ValidationError("need at least one planted direction")
        if k < max(len(s) for s in sets) - 1:
            raise ValidationError("planting needs >= (largest set size - 1) directions")
        if self.dim < k + 1:
            raise ValidationError("dimension must exceed the number of planted directions")
        if self.noise < 0:
            raise ValidationError("noise scale must be non-negative")
        if not 0.0 < self.offset < 1.0:
            raise ValidationError("offset must lie strictly in (0, 1)")
        words = {w for s in sets for w in s}
        if self.vocab_size < len(words):
            raise ValidationError("vocab_size smaller than the number of equality-set words")
        object.__setattr__(self, "equality_sets", sets)
        object.__setattr__(self, "n_directions", k)


def _simplex_directions(c: int, k: int) -> np.ndarray:
    """c unit vectors in R^k, symmetric with zero mean (c - 1 <= k)."""
    basis = np.eye(c) - np.full((c, c), 1.0 / c)
    # rows of `basis` span a (c-1)-dim space; orthonormalize and embed
    q, _ = np.linalg.qr(basis.T)
    dirs = basis @ q[:, : c - 1]
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    out = np.zeros((c, k))
    out[:, : c - 1] = dirs
    return out


def generate_embeddings(
    cfg: EmbeddingPlantConfig,
) -> tuple[EmbeddingMatrix, EqualitySets, BiasSubspace]:
    """Draw a planted-bias embedding matrix deterministically."""
    rng = np.random.default_rng(cfg.seed)
    k, d = cfg.n_directions, cfg.dim
    raw = rng.standard_normal((d, k))
    q, r = np.linalg.qr(raw)
    basis = (q * np.sign(np.diag(r))).T  # (k, d), deterministic sign

    def orth_unit() -> np.ndarray:
        v = rng.standard_normal(d)
        v -= (basis @ v) @ basis
        return v / np.linalg.norm(v)

    tokens: list[str] = []
    rows: list[np.ndarray] = []
    center_scale = math.sqrt(1.0 - cfg.offset**2)
    seen: set[str] = set()
    for s in cfg.equality_sets:
        center = center_scale * orth_unit()
        dirs = _simplex_directions(len(s), k) @ basis  # (c, d), unit, zero-mean
        for j, w in enumerate(s):
            if w in seen:
                continue
            seen.add(w)
            tokens.append(w)
            rows.append(center + cfg.offset * dirs[j])
    n_neutral = cfg.vocab_size - len(tokens)
    for i in range(n_neutral):
        tokens.append(f"neutral{i:03d}")
        rows.append(orth_unit())
    vectors = np.stack(rows)
    if cfg.noise > 0:
        vectors = vectors + cfg.noise * rng.standard_normal(vectors.shape)
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    return (
        EmbeddingMatrix(tokens=tuple(tokens), vectors=vectors),
        EqualitySets(cfg.equality_sets),
        BiasSubspace(basis=basis),
    )
