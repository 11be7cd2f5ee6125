"""Robustness-weighted misclassification-gain impurity for primitive scoring.

Partition masses scale each sample's boosting weight by the magnitude of its
robustness under the candidate formula, so higher-margin splits score
higher.  Both sides of the partition use absolute robustness; a violating
signal contributes positive mass to the violating side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import LabeledDataset, NEG_LABEL, POS_LABEL
from .formula import Formula, robustness_all


@dataclass(frozen=True)
class PartitionScore:
    """Split quality under the weighted misclassification-gain measure."""

    p_top: float
    p_bot: float
    p_pos: float
    p_neg: float
    gain: float

    @property
    def p_class(self) -> dict[int, float]:
        return {POS_LABEL: self.p_pos, NEG_LABEL: self.p_neg}


def _magnitudes(weights: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Per-sample masses w * |rho|.

    Falls back to the bare weights when the robustness values are not
    finite (e.g. the path formula is the constant true) or are all zero,
    so the degenerate cases reduce to plain weighted class masses.
    """
    mags = weights * np.abs(rho)
    if not np.all(np.isfinite(mags)) or float(mags.sum()) == 0.0:
        return np.asarray(weights, dtype=float).copy()
    return mags


def _partition_mr(mags: np.ndarray, labels: np.ndarray, member: np.ndarray) -> float:
    total = float(mags[member].sum())
    if total == 0.0:
        return 0.0
    pos = float(mags[member & (labels == POS_LABEL)].sum()) / total
    return min(pos, 1.0 - pos)


def gain_from_robustness(
    rho: np.ndarray, labels: np.ndarray, weights: np.ndarray
) -> PartitionScore:
    """Score a split given precomputed robustness values.

    ``rho`` is the robustness of the full candidate formula per sample; the
    satisfied side is ``rho >= 0``.  When every robustness magnitude is zero
    the gain is defined as 0 (such a split carries no margin information).
    """
    rho = np.asarray(rho, dtype=float)
    labels = np.asarray(labels)
    weights = np.asarray(weights, dtype=float)
    if rho.size == 0:
        return PartitionScore(0.0, 0.0, 0.0, 0.0, 0.0)
    raw = weights * np.abs(rho)
    degenerate = not np.all(np.isfinite(raw)) or float(raw.sum()) == 0.0
    mags = _magnitudes(weights, rho)
    total = float(mags.sum())
    sat = rho >= 0
    p_top = float(mags[sat].sum()) / total
    p_bot = float(mags[~sat].sum()) / total
    p_pos = float(mags[labels == POS_LABEL].sum()) / total
    p_neg = 1.0 - p_pos
    if degenerate:
        gain = 0.0
    else:
        mr_parent = min(p_pos, p_neg)
        gain = (
            mr_parent
            - p_top * _partition_mr(mags, labels, sat)
            - p_bot * _partition_mr(mags, labels, ~sat)
        )
    return PartitionScore(p_top, p_bot, p_pos, p_neg, gain)


def misclassification_gain(
    dataset: LabeledDataset, weights: np.ndarray, phi: Formula
) -> PartitionScore:
    rho = robustness_all(phi, dataset.values)
    return gain_from_robustness(rho, dataset.labels, weights)


def partition(dataset: LabeledDataset, weights: np.ndarray, phi: Formula):
    """Split a dataset by satisfaction of ``phi`` at time 0.

    Returns ``((top, top_weights), (bot, bot_weights))`` where the top part
    holds the satisfying signals.  Either part may be empty; weights are
    carried through unrenormalized (the impurity measure is scale free).
    """
    weights = np.asarray(weights, dtype=float)
    rho = robustness_all(phi, dataset.values)
    top_idx = np.flatnonzero(rho >= 0)
    bot_idx = np.flatnonzero(rho < 0)
    return (
        (dataset.subset(top_idx), weights[top_idx]),
        (dataset.subset(bot_idx), weights[bot_idx]),
    )


def robustness_margin(rho: np.ndarray, weights: np.ndarray) -> float:
    """Total weighted robustness magnitude, the split tie-break criterion."""
    mags = _magnitudes(np.asarray(weights, dtype=float), np.asarray(rho, dtype=float))
    return float(mags.sum())


def best_leaf_label(dataset: LabeledDataset, weights: np.ndarray, path: Formula) -> int:
    """Class with the larger robustness-weighted mass under the path formula.

    Ties and the empty dataset resolve to the positive class.
    """
    if len(dataset) == 0:
        return POS_LABEL
    rho = robustness_all(path, dataset.values)
    mags = _magnitudes(np.asarray(weights, dtype=float), rho)
    pos = float(mags[dataset.labels == POS_LABEL].sum())
    neg = float(mags[dataset.labels == NEG_LABEL].sum())
    return POS_LABEL if pos >= neg else NEG_LABEL
