"""Box-constrained black-box objectives and evaluation accounting.

Every optimizer in this package spends its budget through :func:`evaluate`
and :func:`fd_gradient`; the :class:`EvalCounter` passed along is the single
source of truth for how many scalar function evaluations a run consumed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteValue, OutOfDomain

Point = np.ndarray
Evaluator = Callable[[np.ndarray], float]

REFERENCE_TOL = 1e-9


@dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box [lower, upper] in R^d with finite bounds."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or upper.shape != lower.shape or lower.size == 0:
            raise ValueError("bounds must be 1-d vectors of equal positive length")
        if not (np.isfinite(lower).all() and np.isfinite(upper).all()):
            raise ValueError("bounds must be finite")
        if not (lower < upper).all():
            raise ValueError("lower bound must be strictly below upper bound")

    @property
    def d(self) -> int:
        return self.lower.size

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return x.shape == self.lower.shape and bool(
            (x >= self.lower).all() and (x <= self.upper).all()
        )

    @property
    def widths(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass(frozen=True)
class Reference:
    """Known global minimum: value and one or more minimizers."""

    f_star: float
    minimizers: tuple[np.ndarray, ...]


@dataclass
class EvalCounter:
    """Counts scalar objective evaluations, one per evaluator call."""

    count: int = 0

    def tick(self, n: int = 1) -> None:
        self.count += n


@dataclass(frozen=True)
class Objective:
    """A named scalar function on a box domain.

    The evaluator must be pure. ``reference``, when present, is validated at
    construction: each listed minimizer must lie in the domain and evaluate
    to ``f_star`` within 1e-9.
    """

    name: str
    domain: BoxDomain
    evaluator: Evaluator = field(repr=False)
    reference: Reference | None = None

    def __post_init__(self):
        if self.reference is None:
            return
        for x_star in self.reference.minimizers:
            if not self.domain.contains(x_star):
                raise ValueError(f"{self.name}: minimizer {x_star} outside domain")
            f_val = float(self.evaluator(np.asarray(x_star, dtype=float)))
            if abs(f_val - self.reference.f_star) > REFERENCE_TOL:
                raise ValueError(
                    f"{self.name}: f(minimizer)={f_val!r} differs from "
                    f"f_star={self.reference.f_star!r} beyond {REFERENCE_TOL}"
                )

    @property
    def d(self) -> int:
        return self.domain.d


def evaluate(obj: Objective, x: Point, counter: EvalCounter) -> float:
    """Evaluate f(x), counting exactly one evaluation.

    Raises OutOfDomain if any coordinate violates the (closed) bounds;
    callers are expected to project first.
    """
    x = np.asarray(x, dtype=float)
    if not obj.domain.contains(x):
        raise OutOfDomain(f"{obj.name}: point {x} outside {obj.domain.lower}..{obj.domain.upper}")
    counter.tick()
    return float(obj.evaluator(x))


def project_to_box(domain: BoxDomain, x: Point) -> Point:
    """Componentwise clamp of x to the box. Identity on interior points."""
    return np.clip(np.asarray(x, dtype=float), domain.lower, domain.upper)


def fd_gradient(
    obj: Objective,
    x: Point,
    counter: EvalCounter,
    h: float | None = None,
) -> np.ndarray:
    """Central-difference gradient estimate, 2d evaluations.

    With h=None the step is 1e-6 * max(1, |x_i|) per coordinate. Probe points
    are clamped to the box; the difference is divided by the actual probe
    separation, so the estimate is one-sided (bias O(h)) only on the boundary.
    """
    x = np.asarray(x, dtype=float)
    d = x.size
    lo, hi = obj.domain.lower, obj.domain.upper
    grad = np.empty(d)
    for i in range(d):
        hi_step = h if h is not None else 1e-6 * max(1.0, abs(x[i]))
        x_plus = x.copy()
        x_minus = x.copy()
        x_plus[i] = min(x[i] + hi_step, hi[i])
        x_minus[i] = max(x[i] - hi_step, lo[i])
        f_plus = evaluate(obj, x_plus, counter)
        f_minus = evaluate(obj, x_minus, counter)
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NonFiniteValue(f"{obj.name}: non-finite probe near {x}")
        grad[i] = (f_plus - f_minus) / (x_plus[i] - x_minus[i])
    return grad


def uniform_sample(domain: BoxDomain, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points uniform over the box, one row per point."""
    return rng.uniform(domain.lower, domain.upper, size=(n, domain.d))


def make_objective(
    name: str,
    lower: Sequence[float],
    upper: Sequence[float],
    evaluator: Evaluator,
    f_star: float | None = None,
    minimizers: Sequence[Sequence[float]] = (),
) -> Objective:
    """Convenience constructor used by the benchmark registry and tests."""
    domain = BoxDomain(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))
    reference = None
    if f_star is not None:
        reference = Reference(
            f_star=float(f_star),
            minimizers=tuple(np.asarray(m, dtype=float) for m in minimizers),
        )
    return Objective(name=name, domain=domain, evaluator=evaluator, reference=reference)
