"""Harness domain components.

- ExperimentRunner: simulate / migrate / balance loop for one spec
- TraceExporter: writes a run's CSV traces and JSON summary
- ComparisonReporter: builds comparison tables from several runs
- ExcelExporter: writes comparison tables to a workbook
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Mapping

import numpy as np
import pandas as pd

from lb_lab.config import RNG_NAME
from lb_lab.errors import TraceWriteError
from lb_lab.models.experiment import ExperimentSpec
from lb_lab.models.trace import IterationRecord, LbEvent, RunResult
from lb_lab.services.lb_domain import make_criterion
from lb_lab.services.lb_service import (
    cumulative_imbalance,
    effort_series,
    lb_cost,
    modeled_parallel_time,
    rank_at,
)
from lb_lab.services.nbody_domain import ScenarioFactory, VerletIntegrator, WorkCounter
from lb_lab.services.partition_domain import make_partitioner
from lb_lab.utils.logging import logger

ITERATION_COLUMNS = ["iteration", "max_work", "mean_work", "u", "cumulative_u"]
EVENT_COLUMNS = ["tau", "cost", "migrated", "algorithm"]
EFFORT_COLUMNS = ["tau_start", "tau_end", "effort"]
MIGRATION_COLUMNS = ["iteration", "migrated"]


class ExperimentRunner:
    def __init__(self, spec: ExperimentSpec) -> None:
        self.spec = spec

    def run(self) -> RunResult:
        spec = self.spec
        sim = spec.sim
        n, n_parts, gamma = sim.n_particles, spec.n_parts, sim.steps

        particles, external = ScenarioFactory(sim).build()
        integrator = VerletIntegrator(sim, external)
        state, grid = integrator.initialize(particles)
        partitioner = make_partitioner(
            spec.partitioner,
            threshold=spec.threshold,
            eigengap=spec.eigengap,
            domain=sim.rect,
            hilbert_order=spec.hilbert_order,
        )
        criterion = make_criterion(spec.criterion)
        counter = WorkCounter(sim.r_cut)

        current = partitioner.partition(state, n_parts)
        ranks = current.assignment.ranks
        trace = [IterationRecord.from_work(0, counter.count(ranks, grid, n_parts))]
        migrations = [0]
        events: list[LbEvent] = []
        next_cost = lb_cost(n, 0, spec.cost_model)

        for t in range(1, gamma):
            state, grid = integrator.step(state)
            located = current.tessellation.locate_many(state.pos, state.ids)
            migrations.append(int(np.count_nonzero(located != ranks)))
            ranks = located

            # decided on u(1..t-1) since the last balance; u(t) is measured on the resulting ranks
            balanced = criterion.should_balance(t, next_cost)
            if balanced:
                current = partitioner.partition(state, n_parts)
                moved = int(np.count_nonzero(current.assignment.ranks != ranks))
                ranks = current.assignment.ranks
                next_cost = lb_cost(n, moved, spec.cost_model)
                events.append(LbEvent(tau=t, cost=next_cost, algorithm=spec.partitioner, migrated=moved))
                criterion.reset()
                logger.debug(f"[{spec.name}] load balance at t={t}: {moved} particles moved, cost {next_cost}")

            record = IterationRecord.from_work(t, counter.count(ranks, grid, n_parts))
            trace.append(record)
            if not balanced:
                criterion.observe(record.u)

        series = effort_series(trace, events, gamma, spec.name)
        return RunResult(
            label=spec.name,
            trace=trace,
            events=events,
            effort=series,
            modeled_time=modeled_parallel_time(trace, events, gamma),
            migrations=migrations,
            seed=sim.rng_seed,
            config_echo=spec.model_dump(mode="json", exclude={"output_dir"}),
        )


class TraceExporter:
    def __init__(self, emit_rank_work: bool = False) -> None:
        self.emit_rank_work = emit_rank_work

    def iterations_frame(self, result: RunResult) -> pd.DataFrame:
        u = result.u
        frame = pd.DataFrame(
            {
                "iteration": [r.t for r in result.trace],
                "max_work": [r.max_w for r in result.trace],
                "mean_work": [r.mu for r in result.trace],
                "u": u,
                "cumulative_u": cumulative_imbalance(u),
            },
            columns=ITERATION_COLUMNS,
        )
        if self.emit_rank_work and result.trace:
            work = np.vstack([r.work for r in result.trace])
            for rank in range(work.shape[1]):
                frame[f"w{rank}"] = work[:, rank]
        return frame

    @staticmethod
    def events_frame(result: RunResult) -> pd.DataFrame:
        rows = [(e.tau, e.cost, e.migrated, e.algorithm.value) for e in result.events]
        return pd.DataFrame(rows, columns=EVENT_COLUMNS)

    @staticmethod
    def effort_frame(result: RunResult) -> pd.DataFrame:
        rows = [(i.tau_start, i.tau_end, i.effort) for i in result.effort.intervals]
        return pd.DataFrame(rows, columns=EFFORT_COLUMNS)

    @staticmethod
    def migrations_frame(result: RunResult) -> pd.DataFrame:
        return pd.DataFrame(list(enumerate(result.migrations)), columns=MIGRATION_COLUMNS)

    @staticmethod
    def summary(result: RunResult) -> dict:
        return {
            "label": result.label,
            "modeled_time": result.modeled_time,
            "lb_call_count": result.lb_call_count,
            "final_cumulative_imbalance": result.final_cumulative_imbalance,
            "total_migrations": result.total_migrations,
            "gamma": result.gamma,
            "seed": result.seed,
            "rng": RNG_NAME,
            "config": result.config_echo,
        }

    def export(self, result: RunResult, directory: Path) -> list[Path]:
        directory = Path(directory)
        try:
            directory.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise TraceWriteError(directory, str(e)) from e

        tables = {
            "iterations.csv": self.iterations_frame(result),
            "events.csv": self.events_frame(result),
            "effort.csv": self.effort_frame(result),
            "migrations.csv": self.migrations_frame(result),
        }
        written = [write_csv(frame, directory / name) for name, frame in tables.items()]
        written.append(write_json(self.summary(result), directory / "summary.json"))
        return written


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    try:
        frame.to_csv(path, index=False, encoding="utf-8", lineterminator="\n")
    except OSError as e:
        raise TraceWriteError(path, str(e)) from e
    return path


def write_json(data: Mapping, path: Path) -> Path:
    try:
        with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as e:
        raise TraceWriteError(path, str(e)) from e
    return path


@dataclass(frozen=True)
class ComparisonReport:
    winner: str
    summary: pd.DataFrame
    rankings: pd.DataFrame
    leaders: pd.DataFrame

    def sheets(self) -> Dict[str, pd.DataFrame]:
        return {"Summary": self.summary, "Rankings": self.rankings, "Leaders": self.leaders}


class ComparisonReporter:
    """Argmin of modeled time, sampled effort rankings and the leader timeline."""

    def __init__(self, rank_interval: int) -> None:
        if rank_interval < 1:
            raise ValueError(f"Rank interval must be >= 1, got {rank_interval}")
        self.rank_interval = rank_interval

    @staticmethod
    def winner(results: Mapping[str, RunResult]) -> str:
        return min(results, key=lambda label: (results[label].modeled_time, label))

    def summary_frame(self, results: Mapping[str, RunResult]) -> pd.DataFrame:
        best = results[self.winner(results)].modeled_time
        rows = []
        for label in sorted(results):
            r = results[label]
            rows.append(
                {
                    "label": label,
                    "algorithm": r.config_echo.get("partitioner", label),
                    "modeled_time": r.modeled_time,
                    "lb_call_count": r.lb_call_count,
                    "final_cumulative_imbalance": r.final_cumulative_imbalance,
                    "total_migrations": r.total_migrations,
                    "percent_vs_winner": 100.0 * (r.modeled_time - best) / best if best > 0 else 0.0,
                }
            )
        return pd.DataFrame(rows).sort_values(["modeled_time", "label"], kind="stable").reset_index(drop=True)

    def rankings_frame(self, results: Mapping[str, RunResult], gamma: int) -> pd.DataFrame:
        series = {label: r.effort for label, r in results.items()}
        rows = []
        for k in range(0, gamma, self.rank_interval):
            order = rank_at(k, series)
            rows.append({"iteration": k, **{f"rank_{i + 1}": label for i, label in enumerate(order)}})
        return pd.DataFrame(rows)

    @staticmethod
    def leaders_frame(results: Mapping[str, RunResult]) -> pd.DataFrame:
        series = {label: r.effort for label, r in results.items()}
        # the leader can only change where some interval starts
        starts = sorted({i.tau_start for s in series.values() for i in s.intervals})
        rows: list[dict] = []
        for k in starts:
            leader = rank_at(k, series)[0]
            if not rows or rows[-1]["leader"] != leader:
                rows.append({"iteration": k, "leader": leader, "effort": series[leader].interval_at(k).effort})
        return pd.DataFrame(rows, columns=["iteration", "leader", "effort"])

    def build(self, results: Mapping[str, RunResult]) -> ComparisonReport:
        if len(results) < 2:
            raise ValueError("A comparison needs at least two runs")
        gammas = {r.gamma for r in results.values()}
        if len(gammas) != 1:
            raise ValueError(f"Runs cover different iteration counts: {sorted(gammas)}")
        return ComparisonReport(
            winner=self.winner(results),
            summary=self.summary_frame(results),
            rankings=self.rankings_frame(results, gammas.pop()),
            leaders=self.leaders_frame(results),
        )


class ExcelExporter:
    def export(self, output_path: Path, sheets: Dict[str, pd.DataFrame]) -> Path:
        try:
            with pd.ExcelWriter(output_path, engine="openpyxl") as writer:
                for name, df in sheets.items():
                    # Excel caps sheet names at 31 characters
                    df.to_excel(writer, sheet_name=name[:31], index=False)
        except OSError as e:
            raise TraceWriteError(output_path, str(e)) from e
        return Path(output_path)
