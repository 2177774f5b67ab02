"""Particle-based global optimization of box-constrained functions.

The core idea: treat minimization of f as sampling from a sharp Boltzmann
density proportional to exp(-kappa f), transport a deterministic particle
ensemble toward it with a kernelized score flow, and read the answer off
the best particle. Variants add particle filtering, warm starts from
CMA-ES or WOA, or both; classic stochastic baselines and an experiment
harness round out the package.
"""

__version__ = "0.1.0"

from .benchmarks import (
    BenchmarkEntry,
    benchmark_names,
    distance_to_minimum,
    lookup,
    make_benchmark,
    registry,
)
from .boltzmann import (
    DEFAULT_KAPPA,
    BoltzmannTarget,
    GridDensity,
    density_on_grid,
    expectation_on_grid,
    ksd,
    score,
)
from .errors import (
    BudgetTooSmall,
    ConfigError,
    DegenerateGrid,
    DimensionMismatch,
    NonFiniteValue,
    NotTwoDimensional,
    OutOfDomain,
    SbsError,
    ShapeMismatch,
    UnsupportedDimension,
)
from .harness import (
    ExperimentConfig,
    ExperimentTable,
    FunctionSpec,
    MethodSpec,
    average_rank,
    ecr,
    run_experiment,
    write_results,
)
from .kernel import BandwidthPolicy, RbfKernel, resolve_bandwidth
from .objective import (
    BoxDomain,
    EvalCounter,
    Objective,
    Reference,
    evaluate,
    fd_gradient,
    make_objective,
    project_to_box,
    uniform_sample,
)
from .optimizers import (
    FilterConfig,
    HybridConfig,
    IterationRecord,
    RunResult,
    available_methods,
    cbo_run,
    cmaes_run,
    derive_seed,
    hybrid_init,
    langevin_run,
    pf_filter,
    run_method,
    sbs_hybrid_run,
    sbs_pf_hybrid_run,
    sbs_pf_run,
    sbs_run,
    split_streams,
    woa_run,
)
from .svgd import (
    DEFAULT_STEP_SIZE,
    AdamState,
    ParticleSet,
    SvgdConfig,
    adam_step,
    force_decomposition,
    phi_star,
    svgd_iterate,
)
from .trajectory import TrajectoryLog, TrajectorySnapshot, plot_trajectories

__all__ = [
    "AdamState",
    "BandwidthPolicy",
    "BenchmarkEntry",
    "BoltzmannTarget",
    "BoxDomain",
    "BudgetTooSmall",
    "ConfigError",
    "DEFAULT_KAPPA",
    "DEFAULT_STEP_SIZE",
    "DegenerateGrid",
    "DimensionMismatch",
    "EvalCounter",
    "ExperimentConfig",
    "ExperimentTable",
    "FilterConfig",
    "FunctionSpec",
    "GridDensity",
    "HybridConfig",
    "IterationRecord",
    "MethodSpec",
    "NonFiniteValue",
    "NotTwoDimensional",
    "Objective",
    "OutOfDomain",
    "ParticleSet",
    "Reference",
    "RbfKernel",
    "RunResult",
    "SbsError",
    "ShapeMismatch",
    "SvgdConfig",
    "TrajectoryLog",
    "TrajectorySnapshot",
    "UnsupportedDimension",
    "__version__",
    "adam_step",
    "available_methods",
    "average_rank",
    "benchmark_names",
    "cbo_run",
    "cmaes_run",
    "density_on_grid",
    "derive_seed",
    "distance_to_minimum",
    "ecr",
    "evaluate",
    "expectation_on_grid",
    "fd_gradient",
    "force_decomposition",
    "hybrid_init",
    "ksd",
    "langevin_run",
    "lookup",
    "make_benchmark",
    "make_objective",
    "pf_filter",
    "phi_star",
    "plot_trajectories",
    "project_to_box",
    "registry",
    "resolve_bandwidth",
    "run_experiment",
    "run_method",
    "sbs_hybrid_run",
    "sbs_pf_hybrid_run",
    "sbs_pf_run",
    "sbs_run",
    "score",
    "split_streams",
    "svgd_iterate",
    "uniform_sample",
    "woa_run",
    "write_results",
]
