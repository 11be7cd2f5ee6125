"""STL formula AST and quantitative semantics over discrete-time signals.

Signals are uniformly sampled multivariate trajectories indexed by integer
timepoints 0..T.  Formulas are built from axis-aligned box predicates over
signal components, Boolean connectives, and the bounded temporal operators
G (always) and F (eventually).  The robustness degree is the standard
min/max margin semantics: a non-negative value means the signal satisfies
the formula.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GT = ">"
LE = "<="


class OutOfHorizonError(Exception):
    """A temporal window or evaluation time reaches past the signal horizon."""


class UnvaluedParameterError(TypeError):
    """Raised when semantics are requested for something that is not a
    concrete formula (e.g. a parametric template with free parameters)."""


@dataclass(frozen=True, eq=False)
class Signal:
    """One multivariate trajectory: ``values[j, t]`` is component j+1 at time t."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("signal values must be a 2-D (variables x time) array")
        if values.shape[0] < 1 or values.shape[1] < 1:
            raise ValueError("signal needs at least one variable and one timepoint")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dimension(self) -> int:
        return self.values.shape[0]

    @property
    def horizon(self) -> int:
        return self.values.shape[1] - 1

    def value(self, var: int, t: int) -> float:
        """Component ``var`` (1-based) at time ``t``."""
        return float(self.values[var - 1, t])


@dataclass(frozen=True)
class Conjunct:
    """One box face: ``x<var> > threshold`` or ``x<var> <= threshold``."""

    var: int
    op: str
    threshold: float

    def __post_init__(self):
        if not isinstance(self.var, int) or self.var < 1:
            raise ValueError("variable index must be a positive integer")
        if self.op not in (GT, LE):
            raise ValueError(f"comparator must be {GT!r} or {LE!r}")
        object.__setattr__(self, "threshold", float(self.threshold))
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")


@dataclass(frozen=True)
class BoxPredicate:
    """Conjunction of axis-aligned faces, at most one per (variable, direction)."""

    conjuncts: tuple[Conjunct, ...]

    def __post_init__(self):
        object.__setattr__(self, "conjuncts", tuple(self.conjuncts))
        if not self.conjuncts:
            raise ValueError("box predicate needs at least one conjunct")
        lower: dict[int, float] = {}
        upper: dict[int, float] = {}
        for c in self.conjuncts:
            faces = lower if c.op == GT else upper
            if c.var in faces:
                raise ValueError(f"duplicate {c.op!r} face for variable x{c.var}")
            faces[c.var] = c.threshold
        for var, lo in lower.items():
            if var in upper and not lo < upper[var]:
                raise ValueError(
                    f"empty box on x{var}: lower bound {lo} is not below "
                    f"upper bound {upper[var]}"
                )


class Formula:
    """Base class for formula AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class BooleanConst(Formula):
    value: bool


TRUE = BooleanConst(True)
FALSE = BooleanConst(False)


@dataclass(frozen=True)
class Predicate(Formula):
    box: BoxPredicate


@dataclass(frozen=True)
class Not(Formula):
    child: Formula


@dataclass(frozen=True)
class And(Formula):
    """N-ary conjunction.  Optional positive weights annotate satisfaction
    priority; they never change the robustness value."""

    children: tuple[Formula, ...]
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("conjunction needs at least one child")
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            object.__setattr__(self, "weights", weights)
            if len(weights) != len(self.children):
                raise ValueError("weight count must match child count")
            if not all(w > 0 and math.isfinite(w) for w in weights):
                raise ValueError("conjunction weights must be positive and finite")


@dataclass(frozen=True)
class Or(Formula):
    children: tuple[Formula, ...]

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.children:
            raise ValueError("disjunction needs at least one child")


def _check_interval(start, end):
    if not isinstance(start, int) or not isinstance(end, int):
        raise ValueError("interval bounds must be integers")
    if start < 0 or start > end:
        raise ValueError(f"invalid temporal interval [{start},{end}]")


@dataclass(frozen=True)
class Always(Formula):
    start: int
    end: int
    child: Formula

    def __post_init__(self):
        _check_interval(self.start, self.end)


@dataclass(frozen=True)
class Eventually(Formula):
    start: int
    end: int
    child: Formula

    def __post_init__(self):
        _check_interval(self.start, self.end)


def _conjunct_rho(c: Conjunct, value: float) -> float:
    return value - c.threshold if c.op == GT else c.threshold - value


def _rho(phi: Formula, values: np.ndarray, t: int, horizon: int) -> float:
    if isinstance(phi, BooleanConst):
        return math.inf if phi.value else -math.inf
    if isinstance(phi, Predicate):
        if t < 0 or t > horizon:
            raise OutOfHorizonError(f"timepoint {t} outside [0, {horizon}]")
        return min(_conjunct_rho(c, float(values[c.var - 1, t])) for c in phi.box.conjuncts)
    if isinstance(phi, Not):
        return -_rho(phi.child, values, t, horizon)
    if isinstance(phi, And):
        return min(_rho(c, values, t, horizon) for c in phi.children)
    if isinstance(phi, Or):
        return max(_rho(c, values, t, horizon) for c in phi.children)
    if isinstance(phi, (Always, Eventually)):
        if t + phi.end > horizon:
            raise OutOfHorizonError(
                f"window [{t + phi.start},{t + phi.end}] exceeds horizon {horizon}"
            )
        agg = min if isinstance(phi, Always) else max
        return agg(_rho(phi.child, values, tau, horizon) for tau in range(t + phi.start, t + phi.end + 1))
    raise UnvaluedParameterError(f"not a concrete formula: {phi!r}")


def robustness(phi: Formula, signal: Signal, t: int = 0) -> float:
    """Robustness degree of ``phi`` over ``signal`` evaluated at time ``t``.

    Non-negative iff the signal satisfies the formula at ``t``.  Raises
    OutOfHorizonError when a referenced timepoint is outside [0, T] and
    UnvaluedParameterError when ``phi`` is not a concrete formula.
    """
    if not isinstance(phi, Formula):
        raise UnvaluedParameterError(
            "expected a concrete formula; instantiate parametric templates first"
        )
    if not isinstance(t, int) or t < 0 or t > signal.horizon:
        raise OutOfHorizonError(f"evaluation time {t} outside [0, {signal.horizon}]")
    return _rho(phi, signal.values, t, signal.horizon)


def satisfies(phi: Formula, signal: Signal) -> bool:
    """Boolean satisfaction at time 0; robustness zero counts as satisfied."""
    return robustness(phi, signal, 0) >= 0


def _conjunct_rho_all(c: Conjunct, cols: np.ndarray) -> np.ndarray:
    return cols - c.threshold if c.op == GT else c.threshold - cols


def robustness_all(phi: Formula, values: np.ndarray, t: int = 0) -> np.ndarray:
    """Vectorized robustness at time ``t`` for a batch of signals.

    ``values`` has shape (N, n, T+1); returns shape (N,).  Semantics match
    :func:`robustness` signal by signal.
    """
    values = np.asarray(values, dtype=float)
    n_signals = values.shape[0]
    horizon = values.shape[2] - 1
    if isinstance(phi, BooleanConst):
        return np.full(n_signals, math.inf if phi.value else -math.inf)
    if isinstance(phi, Predicate):
        if t < 0 or t > horizon:
            raise OutOfHorizonError(f"timepoint {t} outside [0, {horizon}]")
        return np.minimum.reduce(
            [_conjunct_rho_all(c, values[:, c.var - 1, t]) for c in phi.box.conjuncts]
        )
    if isinstance(phi, Not):
        return -robustness_all(phi.child, values, t)
    if isinstance(phi, And):
        return np.minimum.reduce([robustness_all(c, values, t) for c in phi.children])
    if isinstance(phi, Or):
        return np.maximum.reduce([robustness_all(c, values, t) for c in phi.children])
    if isinstance(phi, (Always, Eventually)):
        lo, hi = t + phi.start, t + phi.end
        if hi > horizon:
            raise OutOfHorizonError(f"window [{lo},{hi}] exceeds horizon {horizon}")
        child = phi.child
        if isinstance(child, Predicate):
            # Window slice per conjunct keeps this O(k) numpy calls, which is
            # the hot path during training.
            window = np.minimum.reduce(
                [
                    _conjunct_rho_all(c, values[:, c.var - 1, lo : hi + 1])
                    for c in child.box.conjuncts
                ]
            )
            return window.min(axis=1) if isinstance(phi, Always) else window.max(axis=1)
        if isinstance(child, BooleanConst):
            return np.full(n_signals, math.inf if child.value else -math.inf)
        stacked = np.stack([robustness_all(child, values, tau) for tau in range(lo, hi + 1)])
        return stacked.min(axis=0) if isinstance(phi, Always) else stacked.max(axis=0)
    raise UnvaluedParameterError(f"not a concrete formula: {phi!r}")


def operator_count(phi: Formula) -> int:
    """Number of Boolean and temporal operators in ``phi``.

    An n-ary conjunction or disjunction counts as n-1 binary connectives and
    a box predicate with k faces contributes its k-1 internal conjunctions.
    """
    if isinstance(phi, BooleanConst):
        return 0
    if isinstance(phi, Predicate):
        return len(phi.box.conjuncts) - 1
    if isinstance(phi, Not):
        return 1 + operator_count(phi.child)
    if isinstance(phi, (And, Or)):
        return len(phi.children) - 1 + sum(operator_count(c) for c in phi.children)
    if isinstance(phi, (Always, Eventually)):
        return 1 + operator_count(phi.child)
    raise UnvaluedParameterError(f"not a concrete formula: {phi!r}")
