"""Experiment driver: multi-run, multi-repetition strategy comparison.

Each (strategy, k) cell runs over several independent seeds; per-run seeds
are derived from the base seed, k, and the run index only, so strategies
are paired on identical k-means initializations and the bandwidth-aware
strategy dominates the naive one run by run, not just on average. Runs
that error or exceed the per-run timeout count as unsuccessful and are
excluded from the aggregates, with the exclusion reported.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field

from meshplace.baselines import (
    OracleBudget,
    OracleBudgetError,
    brute_force_optimal,
    naive_kmeans_placement,
    random_placement,
)
from meshplace.netgraph import NetworkGraph, load_graph_json, validate
from meshplace.placement import PlacementReport, basp
from meshplace.seeds import derive_seed
from meshplace.synthgen import GenerationError, TopologyProfile, generate

KNOWN_STRATEGIES = ("basp", "naive", "random", "optimal")

DEFAULT_RUNS = 5
DEFAULT_TIMEOUT_SECONDS = 300.0


@dataclass(frozen=True)
class ExperimentSpec:
    """What to compare: one graph source, k values, strategies, seeds."""

    ks: tuple[int, ...]
    strategies: tuple[str, ...] = ("basp", "naive", "random")
    runs: int = DEFAULT_RUNS
    repetitions: int = 15
    base_seed: int = 0
    graph: NetworkGraph | None = None
    graph_path: str | None = None
    profile: TopologyProfile | None = None
    budget: OracleBudget = field(default_factory=OracleBudget)
    timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    random_assignment: str = "bandwidth"

    def validate_spec(self) -> None:
        sources = sum(x is not None for x in (self.graph, self.graph_path, self.profile))
        if sources != 1:
            raise ValueError(f"exactly one graph source required, got {sources}")
        if not self.ks:
            raise ValueError("at least one k value required")
        if any(k < 1 for k in self.ks):
            raise ValueError(f"k values must be >= 1, got {self.ks}")
        if not self.strategies:
            raise ValueError("at least one strategy required")
        for s in self.strategies:
            if s not in KNOWN_STRATEGIES:
                raise ValueError(f"unknown strategy {s!r}, expected one of {KNOWN_STRATEGIES}")
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.timeout_seconds <= 0:
            raise ValueError(f"timeout_seconds must be positive, got {self.timeout_seconds}")

    def resolve_graph(self) -> NetworkGraph:
        if self.graph is not None:
            return self.graph
        if self.graph_path is not None:
            return load_graph_json(self.graph_path)
        assert self.profile is not None
        return generate(self.profile)

    def to_dict(self) -> dict:
        return {
            "ks": list(self.ks),
            "strategies": list(self.strategies),
            "runs": self.runs,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "graph_path": self.graph_path,
            "profile": self.profile.to_dict() if self.profile else None,
            "timeout_seconds": self.timeout_seconds,
            "random_assignment": self.random_assignment,
            "budget": {
                "max_combinations": self.budget.max_combinations,
                "max_seconds": self.budget.max_seconds,
            },
        }


def _mean_std(values: list[float]) -> tuple[float | None, float | None]:
    if not values:
        return None, None
    return float(statistics.fmean(values)), float(statistics.pstdev(values))


@dataclass(frozen=True)
class CellStats:
    """Aggregates for one (strategy, k) cell; per-run reports retained."""

    strategy: str
    k: int
    runs: int
    reports: tuple[PlacementReport, ...]
    failures: tuple[str, ...]
    objective_mean: float | None
    objective_std: float | None
    bw_mean: float | None
    bw_std: float | None
    runtime_mean: float | None

    @property
    def n_successful(self) -> int:
        return len(self.reports)

    @property
    def absent(self) -> bool:
        return not self.reports

    def rep_pooled(self) -> dict | None:
        """Aggregation over all inner repetitions, where strategies record them."""
        pooled: list[float] = []
        non_heads = None
        for report in self.reports:
            objectives = report.extras.get("rep_objectives")
            if objectives is None:
                return None
            pooled.extend(objectives)
            non_heads = len(report.placement.assignment) - report.placement.k
        if not pooled:
            return None
        obj_mean, obj_std = _mean_std(pooled)
        scale = non_heads if non_heads else None
        return {
            "objective_mean": obj_mean,
            "objective_std": obj_std,
            "bw_mean": obj_mean / scale if scale else 0.0,
            "bw_std": obj_std / scale if scale else 0.0,
        }

    def to_dict(self, timing: bool = True) -> dict:
        doc = {
            "strategy": self.strategy,
            "k": self.k,
            "runs": self.runs,
            "successful": self.n_successful,
            "failures": list(self.failures),
            "objective_mean": self.objective_mean,
            "objective_std": self.objective_std,
            "bw_mean": self.bw_mean,
            "bw_std": self.bw_std,
            "reports": [r.to_dict(timing=timing) for r in self.reports],
            "rep_pooled": self.rep_pooled(),
        }
        if timing:
            doc["runtime_mean"] = self.runtime_mean
        return doc


@dataclass(frozen=True)
class ComparisonTable:
    """All cells of a comparison experiment plus the spec that produced it."""

    spec_dict: dict
    n_nodes: int
    cells: tuple[CellStats, ...]

    def cell(self, strategy: str, k: int) -> CellStats:
        for cell in self.cells:
            if cell.strategy == strategy and cell.k == k:
                return cell
        raise KeyError(f"no cell for strategy={strategy!r}, k={k}")

    @property
    def excluded_runs(self) -> int:
        return sum(len(cell.failures) for cell in self.cells)

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "spec": self.spec_dict,
            "n_nodes": self.n_nodes,
            "excluded_runs": self.excluded_runs,
            "cells": [cell.to_dict(timing=timing) for cell in self.cells],
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing=timing), indent=2, sort_keys=True) + "\n"

    def to_csv(self, timing: bool = True) -> str:
        """Series view: one row per k, mean/std bandwidth per strategy."""
        strategies = list(dict.fromkeys(cell.strategy for cell in self.cells))
        header = ["k"]
        for s in strategies:
            header += [f"{s}_bw_mean", f"{s}_bw_std"]
        lines = [",".join(header)]
        for k in sorted({cell.k for cell in self.cells}):
            row = [str(k)]
            for s in strategies:
                try:
                    cell = self.cell(s, k)
                except KeyError:
                    cell = None
                if cell is None or cell.absent:
                    row += ["", ""]
                else:
                    row += [f"{cell.bw_mean:.6f}", f"{cell.bw_std:.6f}"]
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"

    def to_text(self, timing: bool = True) -> str:
        """Aligned plain-text table."""
        header = ["strategy", "k", "ok", "objective [Mbps]", "bw to head [Mbps]"]
        if timing:
            header.append("runtime [s]")
        rows = [header]
        for cell in self.cells:
            if cell.absent:
                row = [cell.strategy, str(cell.k), f"0/{cell.runs}", "absent", "absent"]
                if timing:
                    row.append("-")
            else:
                row = [
                    cell.strategy,
                    str(cell.k),
                    f"{cell.n_successful}/{cell.runs}",
                    f"{cell.objective_mean:.2f} ± {cell.objective_std:.2f}",
                    f"{cell.bw_mean:.3f} ± {cell.bw_std:.3f}",
                ]
                if timing:
                    row.append(f"{cell.runtime_mean:.3f}")
            rows.append(row)
        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
        lines = ["  ".join(val.ljust(widths[i]) for i, val in enumerate(row)).rstrip() for row in rows]
        return "\n".join(lines) + "\n"


def _run_strategy(
    strategy: str, g: NetworkGraph, k: int, seed: int, spec: ExperimentSpec
) -> PlacementReport:
    if strategy == "basp":
        return basp(g, k, seed, spec.repetitions)
    if strategy == "naive":
        return naive_kmeans_placement(g, k, seed, spec.repetitions)
    if strategy == "random":
        return random_placement(g, k, seed, spec.random_assignment)
    if strategy == "optimal":
        return brute_force_optimal(g, k, spec.budget)
    raise ValueError(f"unknown strategy {strategy!r}")


def run_experiment(spec: ExperimentSpec) -> ComparisonTable:
    """Execute every (strategy, k) cell over ``spec.runs`` seeded runs.

    Per-run seeds depend on (base_seed, k, run) only: all strategies of a
    cell row are paired on the same seeds. A run raising an error or
    exceeding the timeout is unsuccessful; a cell with no successful run
    is marked absent, and the experiment still completes.
    """
    spec.validate_spec()
    g = spec.resolve_graph()
    violations = validate(g)
    if violations:
        raise ValueError("graph fails validation: " + "; ".join(violations[:5]))
    if any(k > g.n for k in spec.ks):
        raise ValueError(f"k values must be <= n = {g.n}, got {spec.ks}")
    _ = g.bandwidth_matrix  # warm the shared matrix once

    cells = []
    for strategy in spec.strategies:
        for k in spec.ks:
            reports: list[PlacementReport] = []
            failures: list[str] = []
            for run_idx in range(spec.runs):
                seed = derive_seed(spec.base_seed, k, run_idx)
                try:
                    report = _run_strategy(strategy, g, k, seed, spec)
                except (ValueError, OracleBudgetError, GenerationError) as exc:
                    failures.append(f"run {run_idx}: {exc}")
                    continue
                if report.runtime > spec.timeout_seconds:
                    failures.append(
                        f"run {run_idx}: exceeded timeout "
                        f"({report.runtime:.1f}s > {spec.timeout_seconds}s)"
                    )
                    continue
                reports.append(report)
            obj_mean, obj_std = _mean_std([r.objective for r in reports])
            bw_mean, bw_std = _mean_std([r.mean_bw_to_head for r in reports])
            runtime_mean, _ = _mean_std([r.runtime for r in reports])
            cells.append(
                CellStats(
                    strategy=strategy,
                    k=k,
                    runs=spec.runs,
                    reports=tuple(reports),
                    failures=tuple(failures),
                    objective_mean=obj_mean,
                    objective_std=obj_std,
                    bw_mean=bw_mean,
                    bw_std=bw_std,
                    runtime_mean=runtime_mean,
                )
            )
    return ComparisonTable(spec_dict=spec.to_dict(), n_nodes=g.n, cells=tuple(cells))


def improvement(table: ComparisonTable, base: str, target: str) -> dict[int, float | None]:
    """Per-k percentage gain of ``target`` over ``base`` mean bandwidth.

    Absent cells and zero base means yield None (reported as absent).
    """
    strategies = {cell.strategy for cell in table.cells}
    for name in (base, target):
        if name not in strategies:
            raise ValueError(f"strategy {name!r} not present in table")
    out: dict[int, float | None] = {}
    for k in sorted({cell.k for cell in table.cells}):
        try:
            base_cell = table.cell(base, k)
            target_cell = table.cell(target, k)
        except KeyError:
            out[k] = None
            continue
        if base_cell.absent or target_cell.absent or not base_cell.bw_mean:
            out[k] = None
            continue
        out[k] = 100.0 * (target_cell.bw_mean - base_cell.bw_mean) / base_cell.bw_mean
    return out
