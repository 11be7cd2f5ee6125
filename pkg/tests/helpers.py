"""Shared generators and construction shorthand for the test suite."""

from __future__ import annotations

import random

import numpy as np

from stlboost import (
    And,
    Always,
    BoxPredicate,
    Conjunct,
    Eventually,
    FALSE,
    GT,
    LE,
    LabeledDataset,
    Not,
    Or,
    Predicate,
    Signal,
    TRUE,
)

POS = 1
NEG = -1


def pred(var: int, op: str, threshold: float) -> Predicate:
    return Predicate(BoxPredicate((Conjunct(var, op, threshold),)))


def box(*faces) -> Predicate:
    return Predicate(BoxPredicate(tuple(Conjunct(v, op, th) for v, op, th in faces)))


def constant_signal(value: float, horizon: int = 2, dimension: int = 1) -> Signal:
    return Signal(np.full((dimension, horizon + 1), float(value)))


def constant_dataset(values, labels, horizon: int = 2) -> LabeledDataset:
    arrays = [np.full((1, horizon + 1), float(v)) for v in values]
    return LabeledDataset(np.stack(arrays), np.asarray(labels, dtype=int),
                          tuple(str(i) for i in range(len(values))))


def random_signal(rng: random.Random, dimension: int, horizon: int) -> Signal:
    values = [
        [rng.uniform(-8.0, 8.0) for _ in range(horizon + 1)] for _ in range(dimension)
    ]
    return Signal(np.array(values))


def _random_box(rng: random.Random, dimension: int) -> BoxPredicate:
    var_count = rng.randint(1, min(dimension, 2))
    variables = rng.sample(range(1, dimension + 1), var_count)
    faces = []
    for var in variables:
        style = rng.choice((GT, LE, "both"))
        if style == "both":
            lo = rng.uniform(-6, 5)
            faces.append(Conjunct(var, GT, lo))
            faces.append(Conjunct(var, LE, lo + rng.uniform(0.5, 6)))
        else:
            faces.append(Conjunct(var, style, rng.uniform(-6, 6)))
    return BoxPredicate(tuple(faces))


def random_formula(
    rng: random.Random,
    max_depth: int,
    dimension: int,
    horizon: int,
    allow_weights: bool = True,
    allow_const: bool = True,
):
    """Random canonical formula whose temporal windows fit from time 0.

    Canonical means what the parser produces: unweighted conjunctions of
    bare predicates appear as merged box predicates, and n-ary connectives
    have at least two children.
    """

    def build(depth_left: int, budget: int):
        choices = ["pred"]
        if allow_const:
            choices.append("const")
        if depth_left > 0:
            choices += ["not", "and", "or"]
            if budget > 0:
                choices += ["always", "eventually"] * 2
        kind = rng.choice(choices)
        if kind == "pred":
            return Predicate(_random_box(rng, dimension))
        if kind == "const":
            return TRUE if rng.random() < 0.5 else FALSE
        if kind == "not":
            return Not(build(depth_left - 1, budget))
        if kind in ("and", "or"):
            children = tuple(
                build(depth_left - 1, budget) for _ in range(rng.randint(2, 3))
            )
            if kind == "or":
                return Or(children)
            if allow_weights and rng.random() < 0.3:
                weights = tuple(rng.uniform(0.1, 5.0) for _ in children)
                return And(children, weights)
            merged = _try_merge(children)
            return merged if merged is not None else And(children)
        start = rng.randint(0, budget)
        end = rng.randint(start, budget)
        child = build(depth_left - 1, budget - end)
        return Always(start, end, child) if kind == "always" else Eventually(start, end, child)

    return build(max_depth, horizon)


def _try_merge(children):
    if not all(isinstance(c, Predicate) for c in children):
        return None
    faces = []
    for child in children:
        faces.extend(child.box.conjuncts)
    try:
        return Predicate(BoxPredicate(tuple(faces)))
    except ValueError:
        return None


def signal_rows(signal: Signal) -> list[list[float]]:
    """Copy a signal into plain lists for the naive oracle."""
    return [[float(v) for v in row] for row in signal.values]


def two_band_dataset(count: int = 10, horizon: int = 20, seed: int = 3) -> LabeledDataset:
    """Positive signals stay inside a y band; negatives leave it on one side.

    Half the negatives spike above the band, half dip below, so a one-face
    always-split at the root pairs with an opposite-face child candidate and
    a band merge strictly improves the gain.
    """
    rng = np.random.default_rng(seed)
    signals = []
    labels = []
    for _ in range(2 * count):
        base = 28.0 + rng.uniform(-1.0, 1.0)
        wobble = rng.uniform(0.5, 1.5)
        phase = rng.uniform(0, 2 * np.pi)
        y = base + wobble * np.sin(np.linspace(0, 2 * np.pi, horizon + 1) + phase)
        noise = rng.uniform(0.0, 1.0, horizon + 1)
        signals.append(np.stack([noise, y]))
        labels.append(POS)
    for i in range(2 * count):
        base = 28.0 + rng.uniform(-1.0, 1.0)
        y = base + rng.uniform(-1.0, 1.0) * np.sin(np.linspace(0, 2 * np.pi, horizon + 1))
        start = rng.integers(2, horizon - 3)
        if i % 2 == 0:
            y[start : start + 3] = 36.0 + rng.uniform(0.0, 2.0)
        else:
            y[start : start + 3] = 20.0 - rng.uniform(0.0, 2.0)
        noise = rng.uniform(0.0, 1.0, horizon + 1)
        signals.append(np.stack([noise, y]))
        labels.append(NEG)
    values = np.stack(signals)
    ids = tuple(str(i) for i in range(len(labels)))
    return LabeledDataset(values, np.asarray(labels), ids)
