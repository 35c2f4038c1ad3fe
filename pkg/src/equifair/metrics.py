"""Group-conditional classification metrics and fairness reports.

Rates are computed from exact integer counts.  A group with no positives
(or no negatives) has the corresponding rate flagged as undefined rather
than propagated as NaN, and undefined rates are excluded from gap ranges.

AUC ROC follows the rank-statistic convention: ties between a positive and
a negative score contribute one half.  AUC PRC is the step-wise
average-precision sum over distinct score thresholds (no linear
interpolation between operating points).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import ValidationError
from .predictions import LabeledPredictions


@dataclass(frozen=True)
class GroupRateEntry:
    """Confusion rates for one group; a rate is None when its denominator
    (positives for tpr/fnr, negatives for tnr/fpr) is zero."""

    tpr: float | None
    tnr: float | None
    fpr: float | None
    fnr: float | None
    n_pos: int
    n_neg: int

    def to_dict(self) -> dict:
        return {
            "tpr": self.tpr, "tnr": self.tnr, "fpr": self.fpr, "fnr": self.fnr,
            "n_pos": self.n_pos, "n_neg": self.n_neg,
        }


@dataclass(frozen=True)
class GroupRates:
    """Per-group confusion rates keyed by group label."""

    rates: Mapping[str, GroupRateEntry]

    def __post_init__(self):
        object.__setattr__(self, "rates", dict(self.rates))

    def __iter__(self):
        return iter(self.rates.items())

    def __getitem__(self, group: str) -> GroupRateEntry:
        return self.rates[group]

    @property
    def groups(self) -> tuple[str, ...]:
        return tuple(self.rates)

    def defined(self, which: str = "tpr") -> dict[str, float]:
        """Groups whose ``which`` rate is defined, with their values."""
        return {g: getattr(e, which) for g, e in self.rates.items() if getattr(e, which) is not None}

    def total_samples(self) -> int:
        return sum(e.n_pos + e.n_neg for e in self.rates.values())

    def to_dict(self) -> dict:
        return {g: e.to_dict() for g, e in self.rates.items()}

    @staticmethod
    def from_dict(d: Mapping[str, Mapping]) -> "GroupRates":
        return GroupRates({g: GroupRateEntry(**e) for g, e in d.items()})


def confusion_rates(preds: LabeledPredictions) -> GroupRates:
    """Exact per-group tpr/tnr/fpr/fnr from hard predictions.

    Requires ``y_hat``.  Groups from the declared universe with no samples
    appear with zero counts and all rates undefined.
    """
    if preds.y_hat is None:
        raise ValidationError("confusion_rates requires hard predictions (y_hat)")
    y, h = preds.y_true, preds.y_hat
    out: dict[str, GroupRateEntry] = {}
    for g in preds.universe:
        m = preds.group_mask(g)
        n_pos = int(np.sum(y[m] == 1))
        n_neg = int(np.sum(y[m] == 0))
        tp = int(np.sum((y[m] == 1) & (h[m] == 1)))
        tn = int(np.sum((y[m] == 0) & (h[m] == 0)))
        out[g] = GroupRateEntry(
            tpr=tp / n_pos if n_pos else None,
            tnr=tn / n_neg if n_neg else None,
            fpr=(n_neg - tn) / n_neg if n_neg else None,
            fnr=(n_pos - tp) / n_pos if n_pos else None,
            n_pos=n_pos,
            n_neg=n_neg,
        )
    return GroupRates(out)


def gap_ranges(rates: GroupRates) -> tuple[float | None, float | None]:
    """Max-minus-min of tpr and tnr over groups where each is defined.

    A component with a single defined group yields 0.0; a component with no
    defined group yields None.  Raises if neither rate is defined anywhere.
    """
    tprs = list(rates.defined("tpr").values())
    tnrs = list(rates.defined("tnr").values())
    if not tprs and not tnrs:
        raise ValidationError("no group has a defined rate")
    tpr_range = (max(tprs) - min(tprs)) if tprs else None
    tnr_range = (max(tnrs) - min(tnrs)) if tnrs else None
    return tpr_range, tnr_range


def _check_binary_scores(scores, y_true) -> tuple[np.ndarray, np.ndarray]:
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(y_true).ravel().astype(np.int8)
    if s.shape != y.shape:
        raise ValidationError("scores and labels must have equal length")
    if s.size == 0:
        raise ValidationError("empty input")
    if not np.isin(y, (0, 1)).all():
        raise ValidationError("labels must be binary")
    return s, y


def _average_ranks(s: np.ndarray) -> np.ndarray:
    # 1-based ranks with ties assigned their average rank
    order = np.argsort(s, kind="stable")
    ranks = np.empty(s.size, dtype=np.float64)
    sorted_s = s[order]
    i = 0
    while i < s.size:
        j = i
        while j + 1 < s.size and sorted_s[j + 1] == sorted_s[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def auc_roc(scores, y_true) -> float:
    """Area under the ROC curve via the rank statistic.

    Equals P(score of a random positive > score of a random negative)
    plus half the tie probability.  Requires both classes.
    """
    s, y = _check_binary_scores(scores, y_true)
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("auc_roc requires both classes present")
    ranks = _average_ranks(s)
    u = float(np.sum(ranks[y == 1])) - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)


def auc_prc(scores, y_true) -> float:
    """Area under the precision-recall curve, step-wise rule.

    Traces one operating point per distinct score threshold (descending)
    and sums precision times recall increment.  Requires >= 1 positive.
    """
    s, y = _check_binary_scores(scores, y_true)
    n_pos = int(np.sum(y == 1))
    if n_pos == 0:
        raise ValidationError("auc_prc requires at least one positive")
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    tp_cum = np.cumsum(y_sorted == 1)
    # last index of each distinct-score block = the point traced at that threshold
    block_end = np.nonzero(np.append(s_sorted[1:] != s_sorted[:-1], True))[0]
    tp = tp_cum[block_end].astype(np.float64)
    predicted = (block_end + 1).astype(np.float64)
    precision = tp / predicted
    recall = tp / n_pos
    delta = np.diff(np.concatenate(([0.0], recall)))
    return float(np.sum(precision * delta))


@dataclass(frozen=True)
class RocCurve:
    """Empirical ROC operating points, ordered by descending threshold.

    One point per distinct score threshold, preceded by (0, 0) at
    threshold +inf; the final point is always (1, 1).
    """

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray

    def points(self) -> list[tuple[float, float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist(), self.thresholds.tolist()))

    def trapezoid_area(self) -> float:
        return float(np.trapezoid(self.tpr, self.fpr))


def roc_curve(scores, y_true) -> RocCurve:
    """Exact empirical ROC operating points with their thresholds."""
    s, y = _check_binary_scores(scores, y_true)
    n_pos = int(np.sum(y == 1))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("roc_curve requires both classes present")
    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    tp_cum = np.cumsum(y_sorted == 1)
    fp_cum = np.cumsum(y_sorted == 0)
    block_end = np.nonzero(np.append(s_sorted[1:] != s_sorted[:-1], True))[0]
    fpr = np.concatenate(([0.0], fp_cum[block_end] / n_neg))
    tpr = np.concatenate(([0.0], tp_cum[block_end] / n_pos))
    thresholds = np.concatenate(([np.inf], s_sorted[block_end]))
    return RocCurve(fpr=fpr, tpr=tpr, thresholds=thresholds)


@dataclass(frozen=True)
class MultilabelAucResult:
    macro: float
    micro: float
    per_label: tuple[float | None, ...]
    excluded_labels: tuple[int, ...]
    warnings: tuple[str, ...] = ()


def multilabel_auc(scores, y_true) -> MultilabelAucResult:
    """Macro (unweighted per-label mean) and micro (flattened-pair) AUC ROC.

    Label columns with a single class are excluded from the macro average
    and reported in ``excluded_labels`` with a warning record.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y_true)
    if s.ndim != 2 or s.shape != y.shape:
        raise ValidationError("scores and labels must be matrices of equal shape")
    if s.shape[1] < 2:
        raise ValidationError("multilabel_auc requires at least 2 labels")
    per_label: list[float | None] = []
    excluded: list[int] = []
    warnings: list[str] = []
    for j in range(s.shape[1]):
        col = y[:, j]
        if col.min() == col.max():
            per_label.append(None)
            excluded.append(j)
            warnings.append(f"label {j} has a single class; excluded from macro AUC")
        else:
            per_label.append(auc_roc(s[:, j], col))
    defined = [v for v in per_label if v is not None]
    if not defined:
        raise ValidationError("every label column has a single class")
    macro = float(np.mean(defined))
    micro = auc_roc(s.ravel(), y.ravel())
    return MultilabelAucResult(
        macro=macro,
        micro=micro,
        per_label=tuple(per_label),
        excluded_labels=tuple(excluded),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class FairnessReport:
    """Serializable audit summary for one prediction set."""

    group_rates: GroupRates | None
    tpr_range: float | None
    tnr_range: float | None
    auc_roc_overall: float | None
    auc_prc_overall: float | None
    auc_roc_per_group: dict[str, float | None]
    metadata: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "group_rates": self.group_rates.to_dict() if self.group_rates else None,
            "tpr_range": self.tpr_range,
            "tnr_range": self.tnr_range,
            "auc_roc_overall": self.auc_roc_overall,
            "auc_prc_overall": self.auc_prc_overall,
            "auc_roc_per_group": self.auc_roc_per_group,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    @staticmethod
    def from_dict(d: Mapping) -> "FairnessReport":
        gr = d.get("group_rates")
        return FairnessReport(
            group_rates=GroupRates.from_dict(gr) if gr else None,
            tpr_range=d.get("tpr_range"),
            tnr_range=d.get("tnr_range"),
            auc_roc_overall=d.get("auc_roc_overall"),
            auc_prc_overall=d.get("auc_prc_overall"),
            auc_roc_per_group=dict(d.get("auc_roc_per_group") or {}),
            metadata=dict(d.get("metadata") or {}),
        )

    @staticmethod
    def from_json(text: str) -> "FairnessReport":
        return FairnessReport.from_dict(json.loads(text))


def build_report(
    preds: LabeledPredictions,
    rates: GroupRates | None = None,
    task: str = "",
    seed: int | None = None,
    timestamp: str | None = None,
    extra_metadata: Mapping | None = None,
) -> FairnessReport:
    """Assemble a fairness report from the metric operations above.

    ``rates`` may be supplied (e.g. expected rates of a derived predictor);
    otherwise they are computed from ``y_hat`` when present.  Score-based
    metrics are filled when scores are present; per-group AUCs that are
    undefined (single-class group) are reported as null with a warning.
    """
    warnings: list[str] = []
    if rates is None and preds.y_hat is not None:
        rates = confusion_rates(preds)
    tpr_range = tnr_range = None
    if rates is not None:
        tpr_range, tnr_range = gap_ranges(rates)
    auc_overall = prc_overall = None
    per_group: dict[str, float | None] = {}
    if preds.scores is not None:
        auc_overall = auc_roc(preds.scores, preds.y_true)
        prc_overall = auc_prc(preds.scores, preds.y_true)
        for g in preds.present_groups():
            m = preds.group_mask(g)
            try:
                per_group[g] = auc_roc(preds.scores[m], preds.y_true[m])
            except ValidationError:
                per_group[g] = None
                warnings.append(f"group {g!r} has a single class; per-group AUC undefined")
    metadata = {
        "task": task,
        "seed": seed,
        "timestamp": timestamp,
        "n_samples": len(preds),
        "overall_auc_averaging": "micro",
        "warnings": warnings,
    }
    if extra_metadata:
        metadata.update(extra_metadata)
    return FairnessReport(
        group_rates=rates,
        tpr_range=tpr_range,
        tnr_range=tnr_range,
        auc_roc_overall=auc_overall,
        auc_prc_overall=prc_overall,
        auc_roc_per_group=per_group,
        metadata=metadata,
    )
