"""Adaptive boosting of temporal decision trees with an interpretability
pruning rule.

Rounds reweight samples toward the previous tree's mistakes.  A tree with
zero weighted error receives the fixed large weight ``m_weight``; if any
such tree exists, prediction uses only the one with the fewest formula
operators, otherwise the weighted majority vote over all trees decides.
Trees no better than chance are discarded and retrained with a fresh
optimizer seed.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .data import LabeledDataset, NEG_LABEL, POS_LABEL, uniform_weights
from .formula import And, Formula, Signal, operator_count
from .grammar import format_formula, parse_formula
from .pso import PsoConfig
from .tree import (
    Leaf,
    Split,
    TreeConfig,
    TreeNode,
    build_tree,
    classify_all,
    tree_to_formula,
)

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class TreeRound:
    """One kept boosting round: the tree, its vote weight, and its formula."""

    tree: TreeNode
    alpha: float
    epsilon: float
    formula: Formula
    merges: int


@dataclass(frozen=True)
class BoostedModel:
    rounds: tuple[TreeRound, ...]
    m_weight: float
    pruned_index: int | None
    dimension: int
    horizon: int
    config: TreeConfig
    requested_rounds: int


@dataclass
class RoundRecord:
    epsilon: float
    alpha: float
    weights_before: np.ndarray
    weights_after: np.ndarray
    predictions: np.ndarray
    attempts: int


@dataclass
class TrainingTrace:
    records: list[RoundRecord] = field(default_factory=list)


def tree_weight(epsilon: float, m_weight: float) -> float:
    """Vote weight for a tree with weighted error ``epsilon``."""
    if epsilon == 0.0:
        return m_weight
    return 0.5 * math.log(1.0 / epsilon - 1.0)


def train_boosted(
    dataset: LabeledDataset,
    rounds: int,
    config: TreeConfig | None = None,
    m_weight: float = 100.0,
    max_retries: int = 5,
    seed: int = 0,
    trace: TrainingTrace | None = None,
) -> BoostedModel:
    """Train a boosted ensemble of ``rounds`` trees.

    A round whose tree has weighted error >= 0.5 is discarded and retried
    with a different optimizer seed up to ``max_retries`` times; when the
    retries run out training stops early with the trees kept so far.  After
    a perfect round the sample weights stay unchanged (the exponential
    update is a no-op modulo normalization there).
    """
    if rounds < 1:
        raise ValueError("round count must be at least 1")
    if m_weight <= 0:
        raise ValueError("m_weight must be positive")
    if len(dataset) == 0:
        raise ValueError("cannot train on an empty dataset")
    config = config or TreeConfig()

    weights = uniform_weights(len(dataset))
    kept: list[TreeRound] = []
    for k in range(rounds):
        tree = None
        for attempt in range(max_retries + 1):
            candidate_tree, merge_log = build_tree(
                dataset, weights, config, seed=_round_seed(seed, k, attempt)
            )
            predictions = classify_all(candidate_tree, dataset.values)
            epsilon = float(weights[predictions != dataset.labels].sum())
            if epsilon < 0.5:
                tree = candidate_tree
                break
            logger.debug("round %d attempt %d discarded (error %.3f)", k, attempt, epsilon)
        if tree is None:
            logger.warning(
                "round %d: no tree beat random guessing after %d retries; "
                "stopping early with %d trees",
                k,
                max_retries,
                len(kept),
            )
            break
        alpha = tree_weight(epsilon, m_weight)
        kept.append(
            TreeRound(tree, alpha, epsilon, tree_to_formula(tree), merge_log.count)
        )
        weights_before = weights.copy()
        if epsilon > 0.0:
            weights = weights * np.exp(-alpha * dataset.labels * predictions)
            weights = weights / weights.sum()
        if trace is not None:
            trace.records.append(
                RoundRecord(epsilon, alpha, weights_before, weights.copy(), predictions, attempt + 1)
            )

    return BoostedModel(
        rounds=tuple(kept),
        m_weight=m_weight,
        pruned_index=_select_pruned(kept, m_weight),
        dimension=dataset.dimension,
        horizon=dataset.horizon,
        config=config,
        requested_rounds=rounds,
    )


def _round_seed(seed: int, round_index: int, attempt: int) -> int:
    return int(
        np.random.SeedSequence((int(seed), int(round_index), int(attempt))).generate_state(1)[0]
    )


def _select_pruned(rounds, m_weight: float) -> int | None:
    best: int | None = None
    best_ops = None
    for k, round_ in enumerate(rounds):
        if round_.alpha != m_weight:
            continue
        ops = operator_count(round_.formula)
        if best is None or ops < best_ops:
            best, best_ops = k, ops
    return best


def select_pruned_tree(model: BoostedModel) -> int | None:
    """Index of the perfect tree with the simplest formula, if any.

    Among trees whose weight equals ``m_weight`` the one with the fewest
    Boolean and temporal operators wins; ties go to the earliest round.
    """
    return _select_pruned(model.rounds, model.m_weight)


def predict_all(
    model: BoostedModel, values: np.ndarray, use_pruning: bool = True
) -> np.ndarray:
    """Predict labels for a batch of signals.

    With pruning active and a perfect tree available, only that tree votes;
    otherwise the alpha-weighted majority decides, with an exact zero vote
    resolving to the positive class.
    """
    if not model.rounds:
        raise ValueError("model holds no trees")
    values = np.asarray(values, dtype=float)
    if use_pruning and model.pruned_index is not None:
        return classify_all(model.rounds[model.pruned_index].tree, values)
    vote = np.zeros(values.shape[0])
    for round_ in model.rounds:
        vote = vote + round_.alpha * classify_all(round_.tree, values)
    return np.where(vote >= 0, POS_LABEL, NEG_LABEL)


def predict(model: BoostedModel, signal: Signal, use_pruning: bool = True) -> int:
    return int(predict_all(model, signal.values[np.newaxis], use_pruning)[0])


def ensemble_mcr(
    model: BoostedModel, dataset: LabeledDataset, use_pruning: bool = True
) -> float:
    predictions = predict_all(model, dataset.values, use_pruning)
    return float(np.mean(predictions != dataset.labels))


def model_formula(model: BoostedModel) -> Formula:
    """The model rendered as a formula.

    A pruned model reports the selected tree's plain formula; otherwise the
    trees form a conjunction weighted by their vote weights.
    """
    if not model.rounds:
        raise ValueError("model holds no trees")
    if model.pruned_index is not None:
        return model.rounds[model.pruned_index].formula
    return And(
        tuple(r.formula for r in model.rounds),
        tuple(r.alpha for r in model.rounds),
    )


def _tree_to_doc(node: TreeNode) -> dict:
    if isinstance(node, Leaf):
        return {"leaf": node.label}
    return {
        "primitive": format_formula(node.primitive),
        "left": _tree_to_doc(node.left),
        "right": _tree_to_doc(node.right),
    }


def _tree_from_doc(doc: dict) -> TreeNode:
    if "leaf" in doc:
        return Leaf(int(doc["leaf"]))
    return Split(
        parse_formula(doc["primitive"]),
        _tree_from_doc(doc["left"]),
        _tree_from_doc(doc["right"]),
    )


def model_to_dict(model: BoostedModel) -> dict:
    return {
        "version": MODEL_FORMAT_VERSION,
        "n": model.dimension,
        "T": model.horizon,
        "M": model.m_weight,
        "trees": [
            {
                "alpha": r.alpha,
                "epsilon": r.epsilon,
                "formulaText": format_formula(r.formula),
                "treeStructure": _tree_to_doc(r.tree),
                "merges": r.merges,
            }
            for r in model.rounds
        ],
        "prunedIndex": model.pruned_index,
        "config": {
            "maxDepth": model.config.max_depth,
            "lambda": model.config.purity_stop,
            "shapes": list(model.config.shapes),
            "requestedRounds": model.requested_rounds,
            "pso": {
                "swarm": model.config.pso.swarm_size,
                "iters": model.config.pso.iterations,
                "omega": model.config.pso.inertia,
                "c1": model.config.pso.cognitive,
                "c2": model.config.pso.social,
                "velocityClamp": model.config.pso.velocity_clamp,
                "seed": model.config.pso.seed,
            },
        },
    }


def model_from_dict(doc: dict) -> BoostedModel:
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model version {doc.get('version')!r}")
    cfg = doc["config"]
    config = TreeConfig(
        max_depth=int(cfg["maxDepth"]),
        purity_stop=float(cfg["lambda"]),
        shapes=tuple(cfg["shapes"]),
        pso=PsoConfig(
            swarm_size=int(cfg["pso"]["swarm"]),
            iterations=int(cfg["pso"]["iters"]),
            inertia=float(cfg["pso"]["omega"]),
            cognitive=float(cfg["pso"]["c1"]),
            social=float(cfg["pso"]["c2"]),
            velocity_clamp=float(cfg["pso"]["velocityClamp"]),
            seed=int(cfg["pso"]["seed"]),
        ),
    )
    rounds = tuple(
        TreeRound(
            tree=_tree_from_doc(t["treeStructure"]),
            alpha=float(t["alpha"]),
            epsilon=float(t["epsilon"]),
            formula=parse_formula(t["formulaText"]),
            merges=int(t.get("merges", 0)),
        )
        for t in doc["trees"]
    )
    pruned = doc.get("prunedIndex")
    return BoostedModel(
        rounds=rounds,
        m_weight=float(doc["M"]),
        pruned_index=None if pruned is None else int(pruned),
        dimension=int(doc["n"]),
        horizon=int(doc["T"]),
        config=config,
        requested_rounds=int(cfg.get("requestedRounds", len(rounds))),
    )


def save_model(model: BoostedModel, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(model_to_dict(model), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_model(path) -> BoostedModel:
    with open(path, encoding="utf-8") as handle:
        return model_from_dict(json.load(handle))
