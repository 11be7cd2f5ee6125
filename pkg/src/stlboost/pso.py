"""Gradient-free maximization over a template's mixed parameter space.

Particles move in the continuous relaxation; before every objective call the
position is projected onto the feasible set: time coordinates are rounded,
clamped and swap-ordered, thresholds are clamped to their bounds, and paired
box faces are repaired so the lower face stays strictly below the upper one.
The returned objective value is the one computed for the returned (already
projected) valuation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Sequence

import numpy as np

from .formula import GT, LE
from .templates import PstlTemplate, Valuation

Objective = Callable[[Valuation], float]


class EmptyParameterSpaceError(ValueError):
    """The template admits no feasible valuation."""


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 40
    iterations: int = 60
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    velocity_clamp: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm size must be at least 2")
        if self.iterations < 1:
            raise ValueError("iteration count must be at least 1")
        if not 0 <= self.inertia < 1:
            raise ValueError("inertia must be in [0, 1)")
        if self.cognitive <= 0 or self.social <= 0:
            raise ValueError("cognitive and social factors must be positive")
        if not 0 < self.velocity_clamp <= 1:
            raise ValueError("velocity clamp must be in (0, 1]")


def _face_pairs(template: PstlTemplate) -> list[tuple[int, int]]:
    """Indices of (lower, upper) threshold slots that address the same variable."""
    lower = {var: i for i, (var, op) in enumerate(template.slots) if op == GT}
    upper = {var: i for i, (var, op) in enumerate(template.slots) if op == LE}
    return [(lower[var], upper[var]) for var in lower if var in upper]


def _project(template: PstlTemplate, position: np.ndarray) -> Valuation:
    horizon = template.horizon
    t0 = int(np.clip(round(float(position[0])), 0, horizon))
    t1 = int(np.clip(round(float(position[1])), 0, horizon))
    if t0 > t1:
        t0, t1 = t1, t0
    thresholds = []
    for k, (lo, hi) in enumerate(template.threshold_bounds):
        thresholds.append(float(np.clip(position[2 + k], lo, hi)))
    for gi, li in _face_pairs(template):
        if thresholds[gi] >= thresholds[li]:
            thresholds[gi], thresholds[li] = thresholds[li], thresholds[gi]
        if thresholds[gi] >= thresholds[li]:
            # Equal after the swap: open a minimal gap without leaving bounds.
            eps = max(1e-9, 1e-12 * max(abs(thresholds[gi]), 1.0))
            if thresholds[li] + eps <= template.threshold_bounds[li][1]:
                thresholds[li] += eps
            else:
                thresholds[gi] -= eps
    return Valuation(t0, t1, tuple(thresholds))


class _Best:
    """Tracks the incumbent; ties on the objective fall back to tie_break."""

    __slots__ = ("valuation", "value", "tie_value")

    def __init__(self):
        self.valuation = None
        self.value = -np.inf
        self.tie_value = None

    def offer(self, valuation, value, tie_break) -> None:
        if value > self.value:
            self.valuation, self.value, self.tie_value = valuation, value, None
            return
        if value == self.value and tie_break is not None and self.valuation is not None:
            if self.tie_value is None:
                self.tie_value = tie_break(self.valuation)
            candidate_tie = tie_break(valuation)
            if candidate_tie > self.tie_value:
                self.valuation, self.tie_value = valuation, candidate_tie


def _space_arrays(template: PstlTemplate) -> tuple[np.ndarray, np.ndarray]:
    if not template.is_bound:
        raise ValueError("template must be bound to a dataset before optimization")
    lows = [0.0, 0.0] + [lo for lo, _ in template.threshold_bounds]
    highs = [float(template.horizon)] * 2 + [hi for _, hi in template.threshold_bounds]
    lb = np.array(lows)
    ub = np.array(highs)
    if np.any(lb > ub):
        raise EmptyParameterSpaceError("threshold bounds are inverted")
    for gi, li in _face_pairs(template):
        if not template.threshold_bounds[gi][0] < template.threshold_bounds[li][1]:
            raise EmptyParameterSpaceError(
                "no room for a lower face strictly below the upper face"
            )
    return lb, ub


def optimize(
    template: PstlTemplate,
    objective: Objective,
    config: PsoConfig,
    tie_break: Callable[[Valuation], float] | None = None,
) -> tuple[Valuation, float]:
    """Maximize ``objective`` over the template's parameter space.

    Deterministic for a given (template, config, objective).  The best
    objective value seen is non-decreasing over iterations and the returned
    value is exactly ``objective`` at the returned valuation.  One eighth of
    the swarm re-samples its position uniformly every iteration; projected
    objectives are piecewise constant, and without that exploration the
    swarm can stall on the first plateau it reaches.
    """
    lb, ub = _space_arrays(template)
    span = ub - lb
    vmax = config.velocity_clamp * np.where(span > 0, span, 1.0)
    rng = np.random.default_rng(config.seed)
    dims = lb.size
    scouts = max(1, config.swarm_size // 8)

    positions = rng.uniform(lb, ub, size=(config.swarm_size, dims))
    velocities = np.zeros_like(positions)
    particle_best_pos = positions.copy()
    particle_best_val = np.full(config.swarm_size, -np.inf)
    best = _Best()

    def evaluate(i: int) -> None:
        valuation = _project(template, positions[i])
        value = float(objective(valuation))
        if value > particle_best_val[i]:
            particle_best_val[i] = value
            particle_best_pos[i] = positions[i]
        best.offer(valuation, value, tie_break)

    for i in range(config.swarm_size):
        evaluate(i)

    for _ in range(config.iterations):
        r_cog = rng.uniform(size=(config.swarm_size, dims))
        r_soc = rng.uniform(size=(config.swarm_size, dims))
        best_raw = particle_best_pos[int(np.argmax(particle_best_val))]
        velocities = (
            config.inertia * velocities
            + config.cognitive * r_cog * (particle_best_pos - positions)
            + config.social * r_soc * (best_raw - positions)
        )
        np.clip(velocities, -vmax, vmax, out=velocities)
        positions = np.clip(positions + velocities, lb, ub)
        positions[-scouts:] = rng.uniform(lb, ub, size=(scouts, dims))
        velocities[-scouts:] = 0.0
        for i in range(config.swarm_size):
            evaluate(i)

    return best.valuation, best.value


def grid_search(
    template: PstlTemplate,
    objective: Objective,
    threshold_candidates: Sequence[float] | Sequence[Sequence[float]],
    time_stride: int = 1,
    tie_break: Callable[[Valuation], float] | None = None,
) -> tuple[Valuation, float]:
    """Exact argmax of ``objective`` over a finite grid (testing oracle).

    ``threshold_candidates`` is either one list shared by every free
    threshold or one list per slot.  Candidates outside the template bounds
    and combinations that do not form a valid box are skipped.
    """
    if not template.is_bound:
        raise ValueError("template must be bound to a dataset before optimization")
    if time_stride < 1:
        raise ValueError("time stride must be at least 1")
    slot_count = len(template.slots)
    if slot_count and threshold_candidates and not np.isscalar(threshold_candidates[0]):
        per_slot = [list(c) for c in threshold_candidates]
        if len(per_slot) != slot_count:
            raise ValueError("need one candidate list per free threshold")
    else:
        per_slot = [list(threshold_candidates) for _ in range(slot_count)]
    for k, (lo, hi) in enumerate(template.threshold_bounds):
        per_slot[k] = [float(c) for c in per_slot[k] if lo <= c <= hi]
        if not per_slot[k]:
            raise EmptyParameterSpaceError(f"no in-bounds candidates for slot {k}")
    pairs = _face_pairs(template)

    best = _Best()
    for t0 in range(0, template.horizon + 1, time_stride):
        for t1 in range(t0, template.horizon + 1, time_stride):
            for combo in product(*per_slot):
                if any(combo[gi] >= combo[li] for gi, li in pairs):
                    continue
                valuation = Valuation(t0, t1, combo)
                best.offer(valuation, float(objective(valuation)), tie_break)
    if best.valuation is None:
        raise EmptyParameterSpaceError("grid contains no feasible valuation")
    return best.valuation, best.value
