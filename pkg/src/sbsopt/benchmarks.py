"""Registry of the 13 classical benchmark functions.

Definitions follow the standard virtual-library forms. Reference minima are
the published values, re-refined to full double precision so that every
listed minimizer evaluates to f_star within 1e-9.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import UnsupportedDimension
from .objective import BoxDomain, Objective, Reference

Evaluator = Callable[[np.ndarray], float]

_PI = math.pi


def _sphere(x: np.ndarray) -> float:
    return float(np.dot(x, x))


def _ackley(x: np.ndarray) -> float:
    d = x.size
    return float(
        -20.0 * np.exp(-0.2 * np.sqrt(np.dot(x, x) / d))
        - np.exp(np.mean(np.cos(2.0 * _PI * x)))
        + 20.0
        + math.e
    )


def _rastrigin(x: np.ndarray) -> float:
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * _PI * x)))


def _rosenbrock(x: np.ndarray) -> float:
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (x[:-1] - 1.0) ** 2))


def _levy(x: np.ndarray) -> float:
    w = 1.0 + (x - 1.0) / 4.0
    head = math.sin(_PI * w[0]) ** 2
    mid = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(_PI * w[:-1] + 1.0) ** 2))
    tail = (w[-1] - 1.0) ** 2 * (1.0 + math.sin(2.0 * _PI * w[-1]) ** 2)
    return float(head + mid + tail)


def _michalewicz(x: np.ndarray) -> float:
    # steepness m=10, so the sine factor is raised to 2m=20
    i = np.arange(1, x.size + 1)
    return float(-np.sum(np.sin(x) * np.sin(i * x * x / _PI) ** 20))


def _branin(x: np.ndarray) -> float:
    b = 5.1 / (4.0 * _PI**2)
    c = 5.0 / _PI
    t = 1.0 / (8.0 * _PI)
    return float(
        (x[1] - b * x[0] ** 2 + c * x[0] - 6.0) ** 2
        + 10.0 * (1.0 - t) * math.cos(x[0])
        + 10.0
    )


def _dropwave(x: np.ndarray) -> float:
    q = float(np.dot(x, x))
    return -(1.0 + math.cos(12.0 * math.sqrt(q))) / (0.5 * q + 2.0)


def _eggholder(x: np.ndarray) -> float:
    a = x[1] + 47.0
    return float(
        -a * math.sin(math.sqrt(abs(x[0] / 2.0 + a)))
        - x[0] * math.sin(math.sqrt(abs(x[0] - a)))
    )


def _goldstein_price(x: np.ndarray) -> float:
    x1, x2 = float(x[0]), float(x[1])
    part1 = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1**2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2**2
    )
    part2 = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1**2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2**2
    )
    return part1 * part2


def _himmelblau(x: np.ndarray) -> float:
    return float((x[0] ** 2 + x[1] - 11.0) ** 2 + (x[0] + x[1] ** 2 - 7.0) ** 2)


def _holder_table(x: np.ndarray) -> float:
    r = math.sqrt(float(np.dot(x, x)))
    return -abs(
        math.sin(float(x[0])) * math.cos(float(x[1])) * math.exp(abs(1.0 - r / _PI))
    )


def _camel(x: np.ndarray) -> float:
    x1, x2 = float(x[0]), float(x[1])
    return (
        (4.0 - 2.1 * x1**2 + x1**4 / 3.0) * x1**2
        + x1 * x2
        + (-4.0 + 4.0 * x2**2) * x2**2
    )


@dataclass(frozen=True)
class BenchmarkEntry:
    """One registry row: evaluator plus domain and reference per dimension."""

    name: str
    evaluator: Evaluator
    default_dim: int
    dims_supported: frozenset[int] | None  # None: any d >= min_dim
    min_dim: int
    bounds: tuple[tuple[float, float], ...] | tuple[float, float]
    f_star_by_dim: dict[int, float]  # key 0: same value for every dimension
    minimizers_by_dim: dict[int, tuple[tuple[float, ...], ...] | str]

    def supports(self, d: int) -> bool:
        if self.dims_supported is not None:
            return d in self.dims_supported
        return d >= self.min_dim

    def dims_label(self) -> str:
        if self.dims_supported is not None:
            return ",".join(str(d) for d in sorted(self.dims_supported))
        return f"any d>={self.min_dim}"

    def domain_for(self, d: int) -> BoxDomain:
        if not self.supports(d):
            raise UnsupportedDimension(f"{self.name} does not support d={d}")
        if isinstance(self.bounds[0], tuple):
            pairs = self.bounds
        else:
            pairs = (self.bounds,) * d
        lower = np.array([p[0] for p in pairs], dtype=float)
        upper = np.array([p[1] for p in pairs], dtype=float)
        return BoxDomain(lower, upper)

    def f_star_for(self, d: int) -> float:
        if 0 in self.f_star_by_dim:
            return self.f_star_by_dim[0]
        if d in self.f_star_by_dim:
            return self.f_star_by_dim[d]
        raise UnsupportedDimension(f"{self.name} has no reference value for d={d}")

    @property
    def f_star(self) -> float:
        return self.f_star_for(self.default_dim)

    def minimizers_for(self, d: int) -> tuple[np.ndarray, ...]:
        spec = self.minimizers_by_dim.get(0, self.minimizers_by_dim.get(d, ()))
        if spec == "zeros":
            return (np.zeros(d),)
        if spec == "ones":
            return (np.ones(d),)
        return tuple(np.asarray(m, dtype=float) for m in spec)

    @property
    def minimizers(self) -> tuple[np.ndarray, ...]:
        return self.minimizers_for(self.default_dim)


_BRANIN_F = 0.39788735772973816
_EGGHOLDER_F = -959.640662720851
_HOLDER_F = -19.208502567886747
_CAMEL_F = -1.0316284534898774
_MICHALEWICZ_F = {
    2: -1.8013034100985534,
    5: -4.687658,
    10: -9.66015,
}

_ENTRIES: tuple[BenchmarkEntry, ...] = (
    BenchmarkEntry(
        # restricted form of the usual [-32.768, 32.768] hypercube; the
        # published definition allows a smaller domain
        "Ackley", _ackley, 2, None, 1, (-5.0, 5.0),
        {0: 0.0}, {0: "zeros"},
    ),
    BenchmarkEntry(
        "Branin", _branin, 2, frozenset({2}), 2, ((-5.0, 10.0), (0.0, 15.0)),
        {2: _BRANIN_F},
        {2: ((-_PI, 12.275), (_PI, 2.275), (3.0 * _PI, 2.475))},
    ),
    BenchmarkEntry(
        "DropWave", _dropwave, 2, frozenset({2}), 2, (-5.12, 5.12),
        {2: -1.0}, {2: ((0.0, 0.0),)},
    ),
    BenchmarkEntry(
        "EggHolder", _eggholder, 2, frozenset({2}), 2, (-512.0, 512.0),
        {2: _EGGHOLDER_F}, {2: ((512.0, 404.2318052512796),)},
    ),
    BenchmarkEntry(
        "GoldsteinPrice", _goldstein_price, 2, frozenset({2}), 2, (-2.0, 2.0),
        {2: 3.0}, {2: ((0.0, -1.0),)},
    ),
    BenchmarkEntry(
        "Himmelblau", _himmelblau, 2, frozenset({2}), 2, (-5.0, 5.0),
        {2: 0.0},
        {2: (
            (3.0, 2.0),
            (-2.8051180869527457, 3.1313125182505757),
            (-3.7793102533777456, -3.28318599128617),
            (3.58442834033049, -1.8481265269644025),
        )},
    ),
    BenchmarkEntry(
        "HolderTable", _holder_table, 2, frozenset({2}), 2, (-10.0, 10.0),
        {2: _HOLDER_F},
        {2: (
            (8.05502348789846, 9.664590020886543),
            (-8.05502348789846, 9.664590020886543),
            (8.05502348789846, -9.664590020886543),
            (-8.05502348789846, -9.664590020886543),
        )},
    ),
    BenchmarkEntry(
        "Michalewicz", _michalewicz, 2, frozenset({2, 5, 10}), 2, (0.0, _PI),
        _MICHALEWICZ_F,
        # d=5 and d=10 reference values are published without coordinates
        {2: ((2.202905519986293, 1.5707963272256125),)},
    ),
    BenchmarkEntry(
        "Rastrigin", _rastrigin, 2, None, 1, (-5.12, 5.12),
        {0: 0.0}, {0: "zeros"},
    ),
    BenchmarkEntry(
        "Rosenbrock", _rosenbrock, 2, None, 2, (-5.0, 10.0),
        {0: 0.0}, {0: "ones"},
    ),
    BenchmarkEntry(
        "Camel", _camel, 2, frozenset({2}), 2, ((-3.0, 3.0), (-2.0, 2.0)),
        {2: _CAMEL_F},
        {2: (
            (0.08984200893527233, -0.712656403019058),
            (-0.08984200893527233, 0.712656403019058),
        )},
    ),
    BenchmarkEntry(
        "Levy", _levy, 2, None, 1, (-10.0, 10.0),
        {0: 0.0}, {0: "ones"},
    ),
    BenchmarkEntry(
        "Sphere", _sphere, 2, None, 1, (-5.12, 5.12),
        {0: 0.0}, {0: "zeros"},
    ),
)

_REGISTRY = {e.name: e for e in _ENTRIES}
_REGISTRY_VALIDATED = False

MINIMIZER_TOL = 1e-6


def registry() -> dict[str, BenchmarkEntry]:
    """Name -> entry, in canonical listing order. Validated on first use."""
    global _REGISTRY_VALIDATED
    if not _REGISTRY_VALIDATED:
        for entry in _ENTRIES:
            for x_star in entry.minimizers:
                got = entry.evaluator(np.asarray(x_star, dtype=float))
                if abs(got - entry.f_star) > MINIMIZER_TOL:
                    raise AssertionError(
                        f"registry: {entry.name} minimizer {x_star} evaluates to "
                        f"{got!r}, expected {entry.f_star!r}"
                    )
        _REGISTRY_VALIDATED = True
    return _REGISTRY


def lookup(name: str) -> BenchmarkEntry:
    """Case-insensitive registry lookup."""
    table = registry()
    key = name.strip().lower()
    for entry_name, entry in table.items():
        if entry_name.lower() == key:
            return entry
    raise KeyError(f"unknown benchmark {name!r}; known: {', '.join(table)}")


def make_benchmark(name: str, d: int) -> Objective:
    """Build an Objective for the named benchmark at dimension d."""
    entry = lookup(name)
    if not entry.supports(d):
        raise UnsupportedDimension(
            f"{entry.name} supports dims {entry.dims_label()}, not {d}"
        )
    reference = Reference(
        f_star=entry.f_star_for(d),
        minimizers=entry.minimizers_for(d),
    )
    return Objective(
        name=f"{entry.name}-{d}d",
        domain=entry.domain_for(d),
        evaluator=entry.evaluator,
        reference=reference,
    )


def distance_to_minimum(entry: BenchmarkEntry, f_found: float, d: int | None = None) -> float:
    """|f_found - f_star|: distance to the optimum in objective value."""
    return abs(f_found - entry.f_star_for(d if d is not None else entry.default_dim))


def benchmark_names() -> list[str]:
    return [e.name for e in _ENTRIES]
