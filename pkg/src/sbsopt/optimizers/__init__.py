"""Optimizers behind a uniform name-addressable interface.

run_method dispatches on the names the experiment harness and CLI use:
sbs, sbs-pf, sbs-hybrid, sbs-pf-hybrid, cma-es, woa, cbo, langevin.
Method parameters arrive as a plain dict (typically parsed from a config
file) and are validated against each method's known keys.
"""

from __future__ import annotations

from ..boltzmann import DEFAULT_KAPPA
from ..errors import BudgetTooSmall, ConfigError
from ..kernel import BandwidthPolicy
from ..objective import Objective
from ..svgd import DEFAULT_STEP_SIZE
from .base import IterationRecord, RunResult, derive_seed, split_streams
from .cbo import cbo_run, consensus_point
from .cmaes import CmaGaussian, cmaes_run, default_popsize, sample_gaussian
from .hybrid import HybridConfig, hybrid_init, sbs_hybrid_run, sbs_pf_hybrid_run
from .langevin import langevin_run
from .sbs import FilterConfig, pf_filter, sbs_pf_run, sbs_run
from .woa import woa_run

__all__ = [
    "CmaGaussian",
    "FilterConfig",
    "HybridConfig",
    "IterationRecord",
    "RunResult",
    "available_methods",
    "cbo_run",
    "cmaes_run",
    "consensus_point",
    "default_popsize",
    "derive_seed",
    "hybrid_init",
    "langevin_run",
    "pf_filter",
    "run_method",
    "sample_gaussian",
    "sbs_hybrid_run",
    "sbs_pf_hybrid_run",
    "sbs_pf_run",
    "sbs_run",
    "split_streams",
    "woa_run",
]

_FILTER_KEYS = ("q_value_percentile", "p_move_percentile", "start_iteration", "min_particles")

_METHOD_KEYS = {
    "sbs": {"n_particles", "kappa", "step_size", "sigma", "fd_step", "max_iterations"},
    "sbs-pf": {"n_particles", "kappa", "step_size", "sigma", "fd_step", "max_iterations",
               *_FILTER_KEYS},
    "sbs-hybrid": {"n_particles", "kappa", "step_size", "sigma", "fd_step",
                   "max_iterations", "cmaes_budget", "woa_iterations"},
    "sbs-pf-hybrid": {"n_particles", "kappa", "step_size", "sigma", "fd_step",
                      "max_iterations", "cmaes_budget", "woa_iterations", *_FILTER_KEYS},
    "cma-es": {"popsize", "sigma0"},
    "woa": {"n_agents", "iterations"},
    "cbo": {"n_particles", "iterations", "alpha", "lam_drift", "sigma_noise", "dt"},
    "langevin": {"n_chains", "kappa", "eta"},
}


def available_methods() -> list[str]:
    return list(_METHOD_KEYS)


def _check_keys(method: str, params: dict) -> None:
    unknown = set(params) - _METHOD_KEYS[method]
    if unknown:
        offender = sorted(unknown)[0]
        raise ConfigError(f"unknown parameter {offender!r} for method {method!r}",
                          field=offender)


def _bandwidth(params: dict) -> BandwidthPolicy | None:
    if "sigma" in params:
        return BandwidthPolicy.fixed(float(params["sigma"]))
    return None


def _filter_config(params: dict) -> FilterConfig:
    kwargs = {key: params[key] for key in _FILTER_KEYS if key in params}
    return FilterConfig(**kwargs)


def _population_iterations(budget: int, size: int, params: dict) -> int:
    """Iterations for a fixed-population method: given, or fit to budget."""
    if "iterations" in params:
        return int(params["iterations"])
    iterations = budget // size - 1
    if iterations < 0:
        raise BudgetTooSmall(f"budget {budget} below one population of {size}")
    return iterations


def run_method(
    name: str,
    obj: Objective,
    budget: int,
    seed: int,
    params: dict | None = None,
    *,
    collect_diagnostics: bool = False,
    track_ksd: bool = False,
    log_every: int = 0,
    benchmark: str | None = None,
) -> RunResult:
    """Run one optimizer by name under an evaluation budget."""
    if name not in _METHOD_KEYS:
        raise ConfigError(f"unknown method {name!r}", field="method")
    params = dict(params or {})
    _check_keys(name, params)
    common = dict(
        collect_diagnostics=collect_diagnostics,
        track_ksd=track_ksd,
        log_every=log_every,
        benchmark=benchmark,
    )

    if name in ("sbs", "sbs-pf"):
        kwargs = dict(
            n_particles=int(params.get("n_particles", 100)),
            kappa=float(params.get("kappa", DEFAULT_KAPPA)),
            step_size=float(params.get("step_size", DEFAULT_STEP_SIZE)),
            budget=budget,
            seed=seed,
            bandwidth_policy=_bandwidth(params),
            max_iterations=params.get("max_iterations"),
            fd_step=params.get("fd_step"),
            **common,
        )
        if name == "sbs":
            return sbs_run(obj, **kwargs)
        return sbs_pf_run(obj, filter_config=_filter_config(params), **kwargs)

    if name in ("sbs-hybrid", "sbs-pf-hybrid"):
        hybrid = HybridConfig(
            cmaes_budget=int(params.get("cmaes_budget", 1000)),
            woa_iterations=int(params.get("woa_iterations", 1000)),
            inner="pf" if name == "sbs-pf-hybrid" else "plain",
        )
        kwargs = dict(
            n_particles=int(params.get("n_particles", 50)),
            kappa=float(params.get("kappa", DEFAULT_KAPPA)),
            step_size=float(params.get("step_size", DEFAULT_STEP_SIZE)),
            budget=budget,
            seed=seed,
            hybrid=hybrid,
            bandwidth_policy=_bandwidth(params),
            max_iterations=params.get("max_iterations"),
            fd_step=params.get("fd_step"),
            **common,
        )
        if name == "sbs-hybrid":
            return sbs_hybrid_run(obj, **kwargs)
        return sbs_pf_hybrid_run(obj, filter_config=_filter_config(params), **kwargs)

    if name == "cma-es":
        result, _ = cmaes_run(
            obj, budget, seed,
            popsize=params.get("popsize"),
            sigma0=params.get("sigma0"),
            collect_diagnostics=collect_diagnostics,
        )
        return result

    if name == "woa":
        n_agents = int(params.get("n_agents", 30))
        iterations = _population_iterations(budget, n_agents, params)
        result, _ = woa_run(
            obj, n_agents, iterations, seed,
            budget=budget,
            collect_diagnostics=collect_diagnostics,
        )
        return result

    if name == "cbo":
        n_particles = int(params.get("n_particles", 100))
        iterations = _population_iterations(budget, n_particles, params)
        return cbo_run(
            obj, n_particles, iterations, seed,
            alpha=float(params.get("alpha", 30.0)),
            lam_drift=float(params.get("lam_drift", 1.0)),
            sigma_noise=float(params.get("sigma_noise", 0.7)),
            dt=float(params.get("dt", 0.1)),
            budget=budget,
            collect_diagnostics=collect_diagnostics,
        )

    return langevin_run(
        obj,
        n_chains=int(params.get("n_chains", 10)),
        kappa=float(params.get("kappa", DEFAULT_KAPPA)),
        eta=float(params.get("eta", 1e-5)),
        budget=budget,
        seed=seed,
        collect_diagnostics=collect_diagnostics,
    )
