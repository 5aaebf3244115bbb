"""Experiment harness service.

Thin wrappers delegating to the harness domain classes.
"""
from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Optional, Sequence

import pandas as pd

from lb_lab.errors import ConfigError
from lb_lab.models.experiment import ExperimentSpec
from lb_lab.models.trace import RunResult
from lb_lab.services.harness_domain import (
    ComparisonReport,
    ComparisonReporter,
    ExcelExporter,
    ExperimentRunner,
    TraceExporter,
    write_csv,
    write_json,
)
from lb_lab.startup import bootstrap, shutdown
from lb_lab.utils.logging import logger


def run(spec: ExperimentSpec) -> RunResult:
    """Run one experiment; traces are written when `output_dir` is set."""
    handler_id = bootstrap(spec.output_dir) if spec.output_dir is not None else None
    try:
        logger.info(
            f"Running {spec.name}: {spec.sim.scenario.value}, N={spec.sim.n_particles}, "
            f"P={spec.n_parts}, steps={spec.sim.steps}, {spec.criterion.describe()}, seed={spec.sim.rng_seed}"
        )
        result = ExperimentRunner(spec).run()
        logger.info(
            f"Finished {spec.name}: modeled time {result.modeled_time:.6g}, "
            f"{result.lb_call_count} load balances, {result.total_migrations} migrations"
        )
        if spec.output_dir is not None:
            emit_traces(result, spec.output_dir, emit_rank_work=spec.emit_rank_work)
        return result
    finally:
        if handler_id is not None:
            shutdown(handler_id)


def emit_traces(result: RunResult, directory: Path, emit_rank_work: bool = False) -> list[Path]:
    written = TraceExporter(emit_rank_work).export(result, Path(directory))
    logger.info(f"Wrote {len(written)} trace files to {directory}")
    return written


def label_specs(specs: Sequence[ExperimentSpec]) -> list[ExperimentSpec]:
    """Unique labels: the partitioner name, then `name#2`, `name#3`, ..."""
    seen: Counter = Counter()
    labelled = []
    for spec in specs:
        base = spec.label or spec.partitioner.value
        seen[base] += 1
        label = base if seen[base] == 1 else f"{base}#{seen[base]}"
        labelled.append(spec.model_copy(update={"label": label}))
    return labelled


def _run_dir(out_dir: Path, label: str) -> Path:
    return Path(out_dir) / label.replace("#", "_")


def compare(
    specs: Sequence[ExperimentSpec],
    workers: int = 1,
    out_dir: Optional[Path] = None,
    xlsx: bool = False,
) -> tuple[ComparisonReport, Dict[str, RunResult]]:
    if len(specs) < 2:
        raise ConfigError("compare needs at least two experiment specs")
    reference = specs[0].sim
    for spec in specs[1:]:
        if spec.sim != reference:
            raise ConfigError("compare needs identical simulation configs and seeds across specs")

    labelled = label_specs(specs)
    if out_dir is not None:
        labelled = [s.model_copy(update={"output_dir": _run_dir(out_dir, s.name)}) for s in labelled]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, labelled))
    else:
        outcomes = [run(spec) for spec in labelled]
    results = {result.label: result for result in outcomes}

    report = ComparisonReporter(labelled[0].rank_interval).build(results)
    logger.info(f"Comparison winner: {report.winner}")
    if out_dir is not None:
        write_report(report, Path(out_dir), xlsx=xlsx)
    return report, results


def write_report(report: ComparisonReport, out_dir: Path, xlsx: bool = False) -> list[Path]:
    handler_id = bootstrap(out_dir)
    try:
        written = [
            write_csv(report.summary, out_dir / "comparison.csv"),
            write_csv(report.rankings, out_dir / "rankings.csv"),
            write_csv(report.leaders, out_dir / "leaders.csv"),
            write_json({"winner": report.winner}, out_dir / "comparison.json"),
        ]
        if xlsx:
            written.append(ExcelExporter().export(out_dir / "comparison.xlsx", report.sheets()))
        logger.info(f"Wrote comparison report to {out_dir}")
        return written
    finally:
        shutdown(handler_id)


def sweep(
    specs: Sequence[ExperimentSpec],
    seeds: Sequence[int],
    workers: int = 1,
    out_dir: Optional[Path] = None,
) -> pd.DataFrame:
    """Compare per seed and return per-label medians across seeds."""
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    frames = []
    for seed in seeds:
        seeded = [s.model_copy(update={"sim": s.sim.model_copy(update={"rng_seed": int(seed)})}) for s in specs]
        seed_dir = Path(out_dir) / f"seed_{seed}" if out_dir is not None else None
        report, _ = compare(seeded, workers=workers, out_dir=seed_dir)
        frame = report.summary.assign(seed=int(seed), won=report.summary["label"] == report.winner)
        frames.append(frame)

    table = pd.concat(frames, ignore_index=True)
    medians = (
        table.groupby("label", sort=True)
        .agg(
            median_modeled_time=("modeled_time", "median"),
            median_lb_call_count=("lb_call_count", "median"),
            median_final_cumulative_imbalance=("final_cumulative_imbalance", "median"),
            wins=("won", "sum"),
            seeds=("seed", "count"),
        )
        .reset_index()
    )
    if out_dir is not None:
        write_csv(table, Path(out_dir) / "sweep_runs.csv")
        write_csv(medians, Path(out_dir) / "sweep_medians.csv")
    return medians
