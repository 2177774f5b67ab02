"""Shared optimizer plumbing: run results, seeding, and diagnostics records."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from ..trajectory import TrajectoryLog

_SEED_BITS = 64


def derive_seed(*tokens: object) -> int:
    """Fold tokens into a 64-bit seed via SHA-256.

    The same tokens give the same seed on every platform, so any experiment
    cell can be reproduced in isolation from its (base_seed, method,
    function, dim, repetition) coordinates.
    """
    text = "|".join(str(t) for t in tokens)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def split_streams(seed: int, n_streams: int) -> list[np.random.Generator]:
    """Derive independent generators from one run seed.

    Stream 0 is always the initializer (particles, population, or mean);
    later streams are method-specific and documented by each optimizer.
    """
    root = np.random.SeedSequence(seed % (1 << _SEED_BITS))
    return [np.random.Generator(np.random.PCG64(child)) for child in root.spawn(n_streams)]


@dataclass
class IterationRecord:
    """One diagnostics row per iteration.

    min_f and live describe the particle state leaving the iteration;
    ksd, when tracked, is measured on the state entering it (it reuses the
    scores the update direction already paid for).
    """

    iteration: int
    min_f: float
    best_so_far: float
    live: int
    ksd: float | None = None


@dataclass
class RunResult:
    """Outcome of one optimizer run under an evaluation budget."""

    best_x: np.ndarray
    best_f: float
    evals_used: int
    iterations_done: int
    diagnostics: list[IterationRecord] | None = None
    trajectory: TrajectoryLog | None = None
