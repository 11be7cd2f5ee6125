"""Binary decision trees over temporal-logic split primitives.

Each internal node tests one valued primitive (``G``/``F`` over a box
predicate); satisfied signals go left.  Construction greedily maximizes the
robustness-weighted misclassification gain of the full path formula, and a
rewriting step tries to merge a node's primitive with a child candidate of
the same temporal operator into a single wider box primitive, restarting the
node whenever the merged split strictly improves the gain.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .data import LabeledDataset, POS_LABEL
from .formula import (
    And,
    Always,
    Eventually,
    FALSE,
    Formula,
    Not,
    Or,
    Predicate,
    Signal,
    TRUE,
    operator_count,
    robustness_all,
)
from .impurity import (
    best_leaf_label,
    gain_from_robustness,
    misclassification_gain,
    partition,
    robustness_margin,
)
from .pso import PsoConfig, optimize
from .templates import ALWAYS, EVENTUALLY, PstlTemplate, first_order_templates

logger = logging.getLogger(__name__)

# A merge rewrite is accepted only when it beats the incumbent gain by at
# least this much; together with the per-node restart budget this bounds the
# restart loop.
MIN_GAIN_IMPROVEMENT = 1e-9


class EmptyPrimitiveSetError(ValueError):
    """No templates or formulas were offered to the primitive search."""


class NotAPrimitiveError(TypeError):
    """Primitive merging needs a single temporal operator over one box."""


@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Split:
    primitive: Formula
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Leaf | Split


@dataclass(frozen=True)
class TreeConfig:
    """Growth limits and search settings for one tree.

    ``purity_stop`` is the plain (unweighted) majority fraction at which a
    node becomes a leaf; ``shapes`` selects which temporal operators the
    first-order split templates use.
    """

    max_depth: int = 3
    purity_stop: float = 0.95
    shapes: tuple[str, ...] = (ALWAYS, EVENTUALLY)
    pso: PsoConfig = field(default_factory=PsoConfig)

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max depth must be at least 1")
        if not 0.5 < self.purity_stop <= 1.0:
            raise ValueError("purity stop must be in (0.5, 1]")
        if not self.shapes or any(s not in (ALWAYS, EVENTUALLY) for s in self.shapes):
            raise ValueError(f"shapes must be drawn from ({ALWAYS!r}, {EVENTUALLY!r})")


@dataclass(frozen=True)
class MergeEvent:
    """One accepted primitive-merge rewrite at a node."""

    depth: int
    before: Formula
    after: Formula
    gain_before: float
    gain_after: float


@dataclass
class MergeLog:
    events: list[MergeEvent] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.events)


def _mix_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(tuple(int(p) for p in parts)).generate_state(1)[0])


def _stop(dataset: LabeledDataset, depth: int, config: TreeConfig) -> bool:
    if len(dataset) == 0 or depth >= config.max_depth:
        return True
    majority = max(dataset.class_counts().values())
    return majority / len(dataset) >= config.purity_stop


def _conjoin(path: Formula, phi: Formula) -> Formula:
    if path is TRUE or path == TRUE:
        return phi
    if isinstance(path, And) and path.weights is None:
        return And(path.children + (phi,))
    return And((path, phi))


def optimize_primitive(
    dataset: LabeledDataset,
    weights: np.ndarray,
    path: Formula,
    primitives: PstlTemplate | Formula | Sequence[PstlTemplate | Formula],
    depth: int,
    config: TreeConfig,
    seed: int = 0,
) -> Formula | int:
    """Best split primitive for a node, or a leaf label under stop conditions.

    Each candidate is scored by the misclassification gain of ``path`` ∧
    candidate over the node's samples.  Templates are searched with the
    swarm optimizer; already-valued formulas are scored as they are.  Ties
    break toward fewer operators, then larger robustness margin, then the
    earlier candidate.
    """
    if isinstance(primitives, (PstlTemplate, Formula)):
        primitives = (primitives,)
    else:
        primitives = tuple(primitives)
    if not primitives:
        raise EmptyPrimitiveSetError("need at least one template or formula")
    if _stop(dataset, depth, config):
        return best_leaf_label(dataset, weights, path)

    weights = np.asarray(weights, dtype=float)
    path_rho = robustness_all(path, dataset.values)
    labels = dataset.labels

    def full_rho(phi: Formula) -> np.ndarray:
        return np.minimum(path_rho, robustness_all(phi, dataset.values))

    best = None  # (gain, ops, margin, formula)
    for index, candidate in enumerate(primitives):
        if isinstance(candidate, Formula):
            rho = full_rho(candidate)
            gain = gain_from_robustness(rho, labels, weights).gain
            phi = candidate
            margin = robustness_margin(rho, weights)
        else:
            template = candidate if candidate.is_bound else candidate.bound_to(dataset)

            def objective(valuation) -> float:
                rho = full_rho(template.instantiate(valuation))
                return gain_from_robustness(rho, labels, weights).gain

            def tie_margin(valuation) -> float:
                rho = full_rho(template.instantiate(valuation))
                return robustness_margin(rho, weights)

            pso_config = PsoConfig(
                swarm_size=config.pso.swarm_size,
                iterations=config.pso.iterations,
                inertia=config.pso.inertia,
                cognitive=config.pso.cognitive,
                social=config.pso.social,
                velocity_clamp=config.pso.velocity_clamp,
                seed=_mix_seed(seed, index),
            )
            valuation, gain = optimize(template, objective, pso_config, tie_break=tie_margin)
            phi = template.instantiate(valuation)
            margin = tie_margin(valuation)
        ops = operator_count(phi)
        if (
            best is None
            or gain > best[0]
            or (gain == best[0] and ops < best[1])
            or (gain == best[0] and ops == best[1] and margin > best[2])
        ):
            best = (gain, ops, margin, phi)
    return best[3]


def _as_primitive(phi: Formula):
    if isinstance(phi, Always) and isinstance(phi.child, Predicate):
        return ALWAYS, phi.child.box
    if isinstance(phi, Eventually) and isinstance(phi.child, Predicate):
        return EVENTUALLY, phi.child.box
    raise NotAPrimitiveError(
        f"expected a single temporal operator over a box predicate, got {phi!r}"
    )


def combine_primitives(parent: Formula, child: Formula) -> PstlTemplate | None:
    """Merge two same-operator box primitives into one free template.

    The merged template keeps the parent's operator, one free threshold per
    distinct (variable, comparator) face, and free interval endpoints.
    Returns None when the operators differ (no merge rule applies).
    """
    parent_shape, parent_box = _as_primitive(parent)
    child_shape, child_box = _as_primitive(child)
    if parent_shape != child_shape:
        return None
    slots: list[tuple[int, str]] = []
    for conjunct in parent_box.conjuncts + child_box.conjuncts:
        slot = (conjunct.var, conjunct.op)
        if slot not in slots:
            slots.append(slot)
    return PstlTemplate(parent_shape, tuple(slots))


def build_tree(
    dataset: LabeledDataset,
    weights: np.ndarray,
    config: TreeConfig,
    seed: int = 0,
) -> tuple[TreeNode, MergeLog]:
    """Grow one tree on weighted samples; returns the root and merge log."""
    if len(dataset) == 0:
        raise ValueError("cannot grow a tree on an empty dataset")
    weights = np.asarray(weights, dtype=float)
    if weights.shape != (len(dataset),) or np.any(weights < 0):
        raise ValueError("weights must be one non-negative value per sample")
    total = float(weights.sum())
    if not np.isclose(total, 1.0):
        raise ValueError("weights must be normalized")

    log = MergeLog()
    templates = first_order_templates(dataset.dimension, config.shapes)
    state = {"calls": 0}

    def next_seed() -> int:
        state["calls"] += 1
        return _mix_seed(seed, state["calls"])

    def search(sub, sub_weights, path, depth):
        return optimize_primitive(
            sub, sub_weights, path, templates, depth, config, seed=next_seed()
        )

    def grow(sub, sub_weights, path, depth, candidate) -> TreeNode:
        if _stop(sub, depth, config):
            return Leaf(best_leaf_label(sub, sub_weights, path))
        if isinstance(candidate, int):
            return Leaf(candidate)
        restarts = 0
        budget = 2 * sub.dimension
        while True:
            path_and_split = _conjoin(path, candidate)
            current_gain = misclassification_gain(sub, sub_weights, path_and_split).gain
            (top, top_w), (bot, bot_w) = partition(sub, sub_weights, path_and_split)
            sides = (
                (top, top_w, path_and_split),
                (bot, bot_w, _conjoin(path, Not(candidate))),
            )
            child_candidates = []
            restarted = False
            for child_set, child_w, child_path in sides:
                child_candidate = search(child_set, child_w, child_path, depth + 1)
                child_candidates.append(child_candidate)
                if restarts >= budget or not isinstance(child_candidate, Formula):
                    continue
                merged = combine_primitives(candidate, child_candidate)
                if merged is None:
                    continue
                rewritten = optimize_primitive(
                    sub, sub_weights, path, merged, depth, config, seed=next_seed()
                )
                new_gain = misclassification_gain(
                    sub, sub_weights, _conjoin(path, rewritten)
                ).gain
                if new_gain >= current_gain + MIN_GAIN_IMPROVEMENT:
                    log.events.append(
                        MergeEvent(depth, candidate, rewritten, current_gain, new_gain)
                    )
                    logger.debug(
                        "depth %d merge accepted: gain %.6f -> %.6f",
                        depth,
                        current_gain,
                        new_gain,
                    )
                    candidate = rewritten
                    restarts += 1
                    restarted = True
                    break
            if restarted:
                continue
            left = grow(top, top_w, sides[0][2], depth + 1, child_candidates[0])
            right = grow(bot, bot_w, sides[1][2], depth + 1, child_candidates[1])
            return Split(candidate, left, right)

    root_candidate = search(dataset, weights, TRUE, 0)
    root = grow(dataset, weights, TRUE, 0, root_candidate)
    return root, log


def classify(node: TreeNode, signal: Signal) -> int:
    """Route one signal through the tree: left on satisfaction."""
    values = signal.values[np.newaxis, :, :]
    while isinstance(node, Split):
        rho = robustness_all(node.primitive, values)[0]
        node = node.left if rho >= 0 else node.right
    return node.label


def classify_all(node: TreeNode, values: np.ndarray) -> np.ndarray:
    """Vectorized :func:`classify` over a (N, n, T+1) batch."""
    values = np.asarray(values, dtype=float)
    out = np.empty(values.shape[0], dtype=int)

    def walk(current: TreeNode, indices: np.ndarray) -> None:
        if isinstance(current, Leaf):
            out[indices] = current.label
            return
        if indices.size == 0:
            return
        rho = robustness_all(current.primitive, values[indices])
        sat = rho >= 0
        walk(current.left, indices[sat])
        walk(current.right, indices[~sat])

    walk(node, np.arange(values.shape[0]))
    return out


def tree_depth(node: TreeNode) -> int:
    if isinstance(node, Leaf):
        return 0
    return 1 + max(tree_depth(node.left), tree_depth(node.right))


def tree_to_formula(node: TreeNode) -> Formula:
    """Formula satisfied exactly by the signals the tree labels positive.

    Built recursively as (phi ∧ left) ∨ (¬phi ∧ right) with constant
    children folded away, which keeps shared prefixes factored instead of
    expanding every root-to-leaf path.
    """
    if isinstance(node, Leaf):
        return TRUE if node.label == POS_LABEL else FALSE
    phi = node.primitive
    left = tree_to_formula(node.left)
    right = tree_to_formula(node.right)
    if left == TRUE and right == TRUE:
        return TRUE
    if left == FALSE and right == FALSE:
        return FALSE
    if left == TRUE and right == FALSE:
        return phi
    if left == FALSE and right == TRUE:
        return Not(phi)
    if left == FALSE:
        return And((Not(phi), right))
    if right == FALSE:
        return And((phi, left))
    if left == TRUE:
        return Or((phi, And((Not(phi), right))))
    if right == TRUE:
        return Or((And((phi, left)), Not(phi)))
    return Or((And((phi, left)), And((Not(phi), right))))
