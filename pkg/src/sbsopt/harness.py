"""Experiment orchestration: repeated runs, metrics, and result files.

A config names functions, methods, a per-run evaluation budget, and the
repetition count. Every cell (method x function x repetition) gets its own
seed derived from the base seed and the cell coordinates, so cells can be
rerun in isolation and results never depend on scheduling. Outputs are a
CSV of aggregate distances, a JSON summary with the comparison metrics,
and optional per-run trajectory logs.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .benchmarks import BenchmarkEntry, distance_to_minimum, lookup, make_benchmark
from .errors import ConfigError
from .optimizers import RunResult, available_methods, derive_seed, run_method
from .trajectory import plot_trajectories

ECR_FLOOR = 1e-12
ECR_CLIP = 100.0


@dataclass(frozen=True)
class MethodSpec:
    """One optimizer column: registry name, parameters, display label."""

    name: str
    params: dict = field(default_factory=dict)
    label: str | None = None

    @property
    def key(self) -> str:
        return self.label if self.label is not None else self.name


@dataclass(frozen=True)
class FunctionSpec:
    """One benchmark row: registry name and dimension."""

    name: str
    dim: int

    @property
    def key(self) -> str:
        return f"{self.name}-{self.dim}d"


@dataclass
class ExperimentConfig:
    functions: list[FunctionSpec]
    methods: list[MethodSpec]
    budget: int
    repetitions: int = 10
    base_seed: int = 0
    output_dir: str = "results"
    log_every: int = 0

    @staticmethod
    def from_dict(data: dict) -> "ExperimentConfig":
        known = {"functions", "methods", "budget", "repetitions", "base_seed",
                 "output_dir", "log_every"}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}", field=key)
        try:
            functions = [
                FunctionSpec(name=str(f["name"]), dim=int(f["dim"]))
                for f in data["functions"]
            ]
            methods = [
                MethodSpec(
                    name=str(m["name"]),
                    params=dict(m.get("params", {})),
                    label=m.get("label"),
                )
                for m in data["methods"]
            ]
        except KeyError as exc:
            raise ConfigError(f"missing field {exc.args[0]!r}", field=str(exc.args[0]))
        except TypeError:
            raise ConfigError("functions and methods must be lists of objects",
                              field="functions")
        if "budget" not in data:
            raise ConfigError("missing field 'budget'", field="budget")
        return ExperimentConfig(
            functions=functions,
            methods=methods,
            budget=int(data["budget"]),
            repetitions=int(data.get("repetitions", 10)),
            base_seed=int(data.get("base_seed", 0)),
            output_dir=str(data.get("output_dir", "results")),
            log_every=int(data.get("log_every", 0)),
        )

    @staticmethod
    def load(path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}", field="config")
        return ExperimentConfig.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "functions": [{"name": f.name, "dim": f.dim} for f in self.functions],
            "methods": [
                {"name": m.name, "params": m.params, "label": m.key}
                for m in self.methods
            ],
            "budget": self.budget,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "output_dir": self.output_dir,
            "log_every": self.log_every,
        }


def validate_config(cfg: ExperimentConfig) -> dict[str, BenchmarkEntry]:
    """Resolve and sanity-check the config; returns the benchmark entries."""
    if not cfg.functions:
        raise ConfigError("no functions given", field="functions")
    if not cfg.methods:
        raise ConfigError("no methods given", field="methods")
    if cfg.repetitions < 1:
        raise ConfigError("repetitions must be at least 1", field="repetitions")
    if cfg.budget < 1:
        raise ConfigError("budget must be positive", field="budget")
    if cfg.log_every < 0:
        raise ConfigError("log_every must be nonnegative", field="log_every")

    entries: dict[str, BenchmarkEntry] = {}
    seen_functions = set()
    for f in cfg.functions:
        if f.key in seen_functions:
            raise ConfigError(f"duplicate function {f.key!r}", field="functions")
        seen_functions.add(f.key)
        try:
            entry = lookup(f.name)
        except KeyError:
            raise ConfigError(f"unknown function {f.name!r}", field="functions")
        if not entry.supports(f.dim):
            raise ConfigError(
                f"function {f.name!r} does not support dim {f.dim}", field="functions"
            )
        entries[f.name] = entry

    seen_methods = set()
    for m in cfg.methods:
        if m.key in seen_methods:
            raise ConfigError(f"duplicate method label {m.key!r}", field="methods")
        seen_methods.add(m.key)
        if m.name not in available_methods():
            raise ConfigError(f"unknown method {m.name!r}", field="methods")
    return entries


@dataclass
class RunRecord:
    """One completed cell: coordinates, seed, and the raw result."""

    method: str
    function: str
    dim: int
    repetition: int
    seed: int
    result: RunResult
    distance: float


@dataclass
class CellStats:
    mean_distance: float
    std_distance: float
    mean_evals: float


@dataclass
class ExperimentTable:
    cells: dict[tuple[str, str], CellStats]
    ecr: dict[str, float]
    avg_rank: dict[str, float]
    final_rank: dict[str, int]
    runs: list[RunRecord]
    config: ExperimentConfig


def _worker_count() -> int:
    raw = os.environ.get("SBSOPT_THREADS", "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ConfigError(f"SBSOPT_THREADS must be an integer, got {raw!r}",
                              field="SBSOPT_THREADS")
        if value < 1:
            raise ConfigError("SBSOPT_THREADS must be at least 1",
                              field="SBSOPT_THREADS")
        return value
    return min(8, os.cpu_count() or 1)


def ecr(mean_distances: dict[str, dict[str, float]]) -> dict[str, float]:
    """Empirical competitive ratio per method.

    For each function, a method's distance is divided by the best method's
    distance and clipped at 100; values below the 1e-12 floor are treated
    as exact hits (ratio 1 when both are hits, clip when only the best is).
    The ECR is the mean of these ratios over functions.
    """
    methods = list(mean_distances)
    if not methods:
        raise ConfigError("ecr needs at least one method", field="methods")
    functions = list(mean_distances[methods[0]])
    ratios = {m: [] for m in methods}
    for fn in functions:
        best = min(mean_distances[m][fn] for m in methods)
        for m in methods:
            dist = mean_distances[m][fn]
            if best <= ECR_FLOOR:
                ratio = 1.0 if dist <= ECR_FLOOR else ECR_CLIP
            else:
                ratio = min(ECR_CLIP, dist / best)
            ratios[m].append(ratio)
    return {m: float(np.mean(ratios[m])) for m in methods}


def average_rank(
    mean_distances: dict[str, dict[str, float]],
) -> tuple[dict[str, float], dict[str, int]]:
    """Tie-averaged ranks per function, averaged over functions.

    The final rank is competition-style on the averages: 1 plus the number
    of methods with a strictly smaller average rank, so exact ties share
    the lower ordinal.
    """
    methods = list(mean_distances)
    functions = list(mean_distances[methods[0]])
    totals = {m: 0.0 for m in methods}
    for fn in functions:
        values = np.array([mean_distances[m][fn] for m in methods])
        order = np.argsort(values, kind="stable")
        i = 0
        while i < len(methods):
            j = i
            while j + 1 < len(methods) and values[order[j + 1]] == values[order[i]]:
                j += 1
            shared = (i + j) / 2.0 + 1.0
            for pos in range(i, j + 1):
                totals[methods[order[pos]]] += shared
            i = j + 1
    avg = {m: totals[m] / len(functions) for m in methods}
    final = {m: 1 + sum(1 for o in methods if avg[o] < avg[m]) for m in methods}
    return avg, final


def run_experiment(cfg: ExperimentConfig) -> ExperimentTable:
    """Run every (method, function, repetition) cell and aggregate.

    Cells execute in a thread pool capped by SBSOPT_THREADS; records are
    sorted by cell coordinates before any aggregation, so the outputs are
    identical for every worker count.
    """
    entries = validate_config(cfg)

    tasks = []
    for m in cfg.methods:
        for f in cfg.functions:
            for rep in range(cfg.repetitions):
                tasks.append((m, f, rep))

    def one(task) -> RunRecord:
        m, f, rep = task
        seed = derive_seed(cfg.base_seed, m.key, f.name, f.dim, rep)
        obj = make_benchmark(f.name, f.dim)
        result = run_method(
            m.name, obj, cfg.budget, seed, m.params,
            log_every=cfg.log_every, benchmark=f.name,
        )
        distance = distance_to_minimum(entries[f.name], result.best_f, f.dim)
        return RunRecord(m.key, f.name, f.dim, rep, seed, result, distance)

    workers = _worker_count()
    if workers == 1:
        records = [one(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, tasks))
    records.sort(key=lambda r: (r.method, r.function, r.dim, r.repetition))

    for rec in records:
        if rec.result.evals_used > cfg.budget:
            raise AssertionError(
                f"budget audit failed: {rec.method} on {rec.function}-{rec.dim}d "
                f"used {rec.result.evals_used} > {cfg.budget}"
            )

    cells: dict[tuple[str, str], CellStats] = {}
    mean_distances: dict[str, dict[str, float]] = {m.key: {} for m in cfg.methods}
    for m in cfg.methods:
        for f in cfg.functions:
            cell = [
                r for r in records
                if r.method == m.key and r.function == f.name and r.dim == f.dim
            ]
            distances = np.array([r.distance for r in cell])
            evals = np.array([r.result.evals_used for r in cell], dtype=float)
            stats = CellStats(
                mean_distance=float(distances.mean()),
                std_distance=float(distances.std()),
                mean_evals=float(evals.mean()),
            )
            cells[(m.key, f.key)] = stats
            mean_distances[m.key][f.key] = stats.mean_distance

    table_ecr = ecr(mean_distances)
    avg, final = average_rank(mean_distances)
    return ExperimentTable(
        cells=cells,
        ecr=table_ecr,
        avg_rank=avg,
        final_rank=final,
        runs=records,
        config=cfg,
    )


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_results(table: ExperimentTable, cfg: ExperimentConfig) -> list[Path]:
    """Write results.csv, summary.json, and any trajectory logs.

    Numbers are serialized with 17 significant digits so reruns of the same
    config produce byte-identical files.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    csv_path = out / "results.csv"
    lines = ["method,function,dim,mean_distance,std_distance,mean_evals,budget"]
    for m in cfg.methods:
        for f in cfg.functions:
            stats = table.cells[(m.key, f.key)]
            lines.append(
                f"{m.key},{f.name},{f.dim},{_fmt(stats.mean_distance)},"
                f"{_fmt(stats.std_distance)},{_fmt(stats.mean_evals)},{cfg.budget}"
            )
    csv_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(csv_path)

    summary = {
        "version": __version__,
        "config": cfg.to_dict(),
        "cells": {
            f"{m}::{f}": {
                "mean_distance": stats.mean_distance,
                "std_distance": stats.std_distance,
                "mean_evals": stats.mean_evals,
            }
            for (m, f), stats in table.cells.items()
        },
        "ecr": table.ecr,
        "avg_rank": table.avg_rank,
        "final_rank": table.final_rank,
    }
    summary_path = out / "summary.json"
    summary_path.write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(summary_path)

    if cfg.log_every > 0:
        log_dir = out / "trajectories"
        log_dir.mkdir(exist_ok=True)
        for rec in table.runs:
            if rec.result.trajectory is None:
                continue
            log_path = log_dir / (
                f"{rec.method}_{rec.function}_{rec.dim}d_rep{rec.repetition}.json"
            )
            rec.result.trajectory.save(log_path)
            written.append(log_path)
    return written


__all__ = [
    "ECR_CLIP",
    "ECR_FLOOR",
    "CellStats",
    "ExperimentConfig",
    "ExperimentTable",
    "FunctionSpec",
    "MethodSpec",
    "RunRecord",
    "average_rank",
    "ecr",
    "plot_trajectories",
    "run_experiment",
    "validate_config",
    "write_results",
]
