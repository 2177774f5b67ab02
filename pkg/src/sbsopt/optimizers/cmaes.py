"""CMA-ES baseline: (mu/mu_w, lambda) evolution strategy, Hansen defaults.

Serves both as a standalone optimizer and as the distribution-based half of
hybrid initialization, which is why the run returns the final search
Gaussian alongside the incumbent. Box constraints are handled by resampling
an out-of-box offspring up to 100 times, then clamping.

Random streams: 0 draws the initial mean, 1 drives offspring sampling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BudgetTooSmall, ConfigError
from ..objective import EvalCounter, Objective, evaluate, uniform_sample
from .base import IterationRecord, RunResult, split_streams

_RESAMPLE_TRIES = 100


@dataclass
class CmaGaussian:
    """Final search distribution: N(mean, sigma^2 * cov)."""

    mean: np.ndarray
    sigma: float
    cov: np.ndarray


def default_popsize(d: int) -> int:
    return 4 + int(3 * math.log(d))


def sample_gaussian(gauss: CmaGaussian, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n points from the search Gaussian (one eigendecomposition)."""
    eigvals, basis = np.linalg.eigh((gauss.cov + gauss.cov.T) / 2.0)
    scales = np.sqrt(np.maximum(eigvals, 0.0))
    z = rng.standard_normal((n, gauss.mean.shape[0]))
    return gauss.mean + gauss.sigma * (z * scales) @ basis.T


def cmaes_run(
    obj: Objective,
    budget: int,
    seed: int,
    popsize: int | None = None,
    sigma0: float | None = None,
    *,
    counter: EvalCounter | None = None,
    collect_diagnostics: bool = False,
) -> tuple[RunResult, CmaGaussian]:
    """Run CMA-ES under an evaluation budget.

    Returns the incumbent plus the final Gaussian so a caller can keep
    sampling from where the search ended.
    """
    counter = counter if counter is not None else EvalCounter()
    domain = obj.domain
    d = domain.d
    lam = popsize if popsize is not None else default_popsize(d)
    if lam < 2:
        raise ConfigError("population size must be at least 2", field="popsize")
    if budget - counter.count < lam:
        raise BudgetTooSmall(f"budget {budget} below one generation ({lam} evaluations)")

    # Hansen's default strategy parameters
    mu = lam // 2
    raw = math.log((lam + 1) / 2.0) - np.log(np.arange(1, mu + 1))
    weights = raw / raw.sum()
    mueff = 1.0 / float(np.sum(weights**2))
    cc = (4.0 + mueff / d) / (d + 4.0 + 2.0 * mueff / d)
    cs = (mueff + 2.0) / (d + mueff + 5.0)
    c1 = 2.0 / ((d + 1.3) ** 2 + mueff)
    cmu = min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((d + 2.0) ** 2 + mueff))
    damps = 1.0 + 2.0 * max(0.0, math.sqrt((mueff - 1.0) / (d + 1.0)) - 1.0) + cs
    chi_n = math.sqrt(d) * (1.0 - 1.0 / (4.0 * d) + 1.0 / (21.0 * d * d))

    rng_init, rng_sample = split_streams(seed, 2)
    mean = uniform_sample(domain, 1, rng_init)[0]
    sigma = sigma0 if sigma0 is not None else 0.3 * float(np.max(domain.widths))
    cov = np.eye(d)
    ps = np.zeros(d)
    pc = np.zeros(d)

    best_x = mean.copy()
    best_f = np.inf
    records: list[IterationRecord] | None = [] if collect_diagnostics else None
    generation = 0

    while counter.count + lam <= budget:
        cov = (cov + cov.T) / 2.0
        eigvals, basis = np.linalg.eigh(cov)
        eigvals = np.maximum(eigvals, 1e-30)
        scales = np.sqrt(eigvals)
        if (
            not np.isfinite(sigma)
            or sigma * scales.max() < 1e-250
            or scales.max() / scales.min() > 1e14
        ):
            break

        offspring = np.empty((lam, d))
        for k in range(lam):
            x = None
            for _ in range(_RESAMPLE_TRIES):
                z = rng_sample.standard_normal(d)
                candidate = mean + sigma * (basis @ (scales * z))
                if domain.contains(candidate):
                    x = candidate
                    break
            if x is None:
                x = np.clip(candidate, domain.lower, domain.upper)
            offspring[k] = x
        fitness = np.array([evaluate(obj, x, counter) for x in offspring])
        generation += 1

        gen_best = int(np.argmin(fitness))
        if fitness[gen_best] < best_f:
            best_f = float(fitness[gen_best])
            best_x = offspring[gen_best].copy()

        order = np.argsort(fitness, kind="stable")[:mu]
        selected = offspring[order]
        ys = (selected - mean) / sigma
        y_w = weights @ ys
        mean = mean + sigma * y_w

        inv_sqrt = basis @ np.diag(1.0 / scales) @ basis.T
        ps = (1.0 - cs) * ps + math.sqrt(cs * (2.0 - cs) * mueff) * (inv_sqrt @ y_w)
        ps_norm = float(np.linalg.norm(ps))
        correction = math.sqrt(1.0 - (1.0 - cs) ** (2 * generation))
        hsig = 1.0 if ps_norm / correction < (1.4 + 2.0 / (d + 1.0)) * chi_n else 0.0
        pc = (1.0 - cc) * pc + hsig * math.sqrt(cc * (2.0 - cc) * mueff) * y_w

        rank_mu = ys.T @ (weights[:, None] * ys)
        cov = (
            (1.0 - c1 - cmu) * cov
            + c1 * (np.outer(pc, pc) + (1.0 - hsig) * cc * (2.0 - cc) * cov)
            + cmu * rank_mu
        )
        sigma = sigma * math.exp(min(1.0, (cs / damps) * (ps_norm / chi_n - 1.0)))

        if records is not None:
            records.append(
                IterationRecord(generation, float(fitness[gen_best]), best_f, lam)
            )

    result = RunResult(
        best_x=best_x,
        best_f=best_f,
        evals_used=counter.count,
        iterations_done=generation,
        diagnostics=records,
    )
    return result, CmaGaussian(mean=mean, sigma=sigma, cov=cov)
