import asyncio
import math
from concurrent.futures import Executor, ThreadPoolExecutor
from pathlib import Path
from typing import Any, Callable

import numpy as np
import pandas as pd
from logzero import logger
from pydantic import BaseModel, ConfigDict

from dpogd.baselines import run_admm, run_cc_admm, run_centralized_pogd, run_slowed_admm
from dpogd.core import ConsensusSchedule, RunContext
from dpogd.engine import OperationCounter, RunTrace, initial_iterates, run_dpogd
from dpogd.exceptions import ConfigurationError, ContractionUnderflowError, SeriesError
from dpogd.graph import (
    ContractionConstants,
    MixingSequence,
    contraction_constants,
    estimate_connectivity_window,
    validate,
)
from dpogd.metrics import (
    DiagnosticsSummary,
    RegretLedger,
    consensus_diagnostics,
    diagnostics_frame,
    dynamic_regret,
    path_residual,
    loglog_slope,
    summarize_diagnostics,
    theoretical_overlay,
)
from dpogd.problem import ProblemStream, SmoothnessConstants, solve_oracle_trace, stream_constants
from dpogd.utils import await_sync_function, canonical_hash, write_csv, write_json

from .config import AlgorithmName, ExperimentConfig, NetworkSection
from .report import write_report


class AlgorithmResult(BaseModel):
    """Outcome of one algorithm on one seed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    algorithm: str
    ledger: RegretLedger
    updates: int
    flops_per_update: float
    diagnostics: DiagnosticsSummary | None = None


class SeedResult(BaseModel):
    """All algorithms run on the instance of one seed."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    seed: int
    directory: Path
    manifest_hash: str
    path_length: float
    path_residual: float
    results: dict[str, AlgorithmResult]


class ExperimentResult(BaseModel):
    """Seeds of one experiment with their median aggregates."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    output: Path
    manifest_hash: str
    label: str
    seeds: list[SeedResult]
    medians: dict[str, pd.DataFrame]
    final_over_T: dict[str, float]
    slopes: dict[str, float]
    path_slope: float


class RunInputs(BaseModel):
    """Everything an algorithm runner needs for one seed."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ExperimentConfig
    seed: int
    stream: ProblemStream
    schedule: ConsensusSchedule
    mixing: MixingSequence
    counter: OperationCounter


def _run_dpogd(inputs: RunInputs) -> RunTrace:
    stream, section = inputs.stream, inputs.config.algorithms
    x_init = initial_iterates(stream.N, stream.n, inputs.seed, kind=section.init)
    return run_dpogd(stream, inputs.schedule, inputs.mixing, section.alpha_dpogd, x_init, counter=inputs.counter)


def _run_pogd(inputs: RunInputs) -> RunTrace:
    return run_centralized_pogd(inputs.stream, inputs.config.algorithms.alpha_pogd, counter=inputs.counter)


def _run_pogd_slowed(inputs: RunInputs) -> RunTrace:
    return run_centralized_pogd(
        inputs.stream, inputs.config.algorithms.alpha_pogd, inputs.schedule, counter=inputs.counter
    )


def _run_admm(inputs: RunInputs) -> RunTrace:
    return run_admm(inputs.stream, inputs.config.algorithms.admm, counter=inputs.counter)


def _run_admm_slowed(inputs: RunInputs) -> RunTrace:
    return run_slowed_admm(inputs.stream, inputs.schedule, inputs.config.algorithms.admm, counter=inputs.counter)


def _run_cc_admm_sh(inputs: RunInputs) -> RunTrace:
    return run_cc_admm(inputs.stream, inputs.mixing, "sh", inputs.config.algorithms.admm, counter=inputs.counter)


def _run_cc_admm_mh(inputs: RunInputs) -> RunTrace:
    return run_cc_admm(inputs.stream, inputs.mixing, "mh", inputs.config.algorithms.admm, counter=inputs.counter)


ALGORITHM_RUNNERS: dict[AlgorithmName, Callable[[RunInputs], RunTrace]] = {
    AlgorithmName.DPOGD: _run_dpogd,
    AlgorithmName.POGD: _run_pogd,
    AlgorithmName.POGD_SLOWED: _run_pogd_slowed,
    AlgorithmName.ADMM: _run_admm,
    AlgorithmName.ADMM_SLOWED: _run_admm_slowed,
    AlgorithmName.CC_ADMM_SH: _run_cc_admm_sh,
    AlgorithmName.CC_ADMM_MH: _run_cc_admm_mh,
}
"""Maps every algorithm name to the function running it on a shared instance."""


def certify_contraction(
    network: NetworkSection, mixing: MixingSequence, horizon: int
) -> ContractionConstants | None:
    """
    Contraction constants of a mixing sequence, or None when they cannot be certified.

    The window B is taken from the config or estimated from the first probe slots.
    """
    if mixing.N < 2:
        return None
    B = network.B
    if B is None:
        probe = mixing.window(1, 1 + min(network.probe_slots, horizon))
        B = estimate_connectivity_window(probe, network.max_B)
        if B is None:
            logger.warning(f"{mixing.label}: no connectivity window up to B={network.max_B}")
            return None
    try:
        return contraction_constants(mixing.eta, mixing.N, B)
    except ContractionUnderflowError as exc:
        logger.warning(f"{mixing.label}: {exc.details}")
        return None


def instance_manifest(
    config: ExperimentConfig,
    stream: ProblemStream,
    schedule: ConsensusSchedule,
    contraction: ContractionConstants | None,
) -> dict[str, Any]:
    """Reproducibility manifest of one seed's instance, including its own hash."""
    manifest = {
        "experiment": config.run.name,
        "config": config.model_dump(mode="json"),
        "instance": stream.manifest(),
        "graph": config.network.label,
        "schedule": {"K": schedule.K, "R_T": schedule.consensus_steps[-1], **config.schedule.params},
        "contraction": contraction.model_dump() if contraction is not None else None,
    }
    manifest["manifest_hash"] = canonical_hash(manifest)
    return manifest


def run_seed(config: ExperimentConfig, seed: int, directory: Path) -> SeedResult:
    """
    Generate one instance and run every configured algorithm on it.

    Writes manifest.json, schedule.csv, metrics_<alg>.csv, diagnostics_dpogd.csv
    and optionally trace_<alg>.csv into `directory`.

    Args:
        config: The experiment config.
        seed: The run seed.
        directory: Output directory of this seed.

    Returns:
        SeedResult: Regret ledgers and diagnostics summaries per algorithm.

    Raises:
        DivergenceError: If an algorithm diverges.
        OracleFailureError: If the reference solver fails on a slot.
    """
    context = RunContext(config.run.name, seed)
    horizon = config.run.horizon
    logger.info(f"[{context.tag}] Generating instance (T={horizon}, N={config.problem.N})")
    stream = ProblemStream(config.problem, horizon, seed)
    schedule = config.schedule.build(horizon)
    mixing = config.network.build(config.problem.N, seed)
    oracle = solve_oracle_trace(stream, config.run.oracle_tol)
    contraction = certify_contraction(config.network, mixing, horizon)

    manifest = instance_manifest(config, stream, schedule, contraction)
    manifest_hash = manifest["manifest_hash"]
    write_json(directory / "manifest.json", manifest)
    write_csv(schedule.to_frame(), directory / "schedule.csv", manifest_hash)

    results: dict[str, AlgorithmResult] = {}
    for name in config.algorithms.names:
        run_context = context.for_algorithm(name.value)
        counter = OperationCounter()
        inputs = RunInputs(
            config=config, seed=seed, stream=stream, schedule=schedule, mixing=mixing, counter=counter
        )
        trace = ALGORITHM_RUNNERS[name](inputs)
        ledger = dynamic_regret(trace, stream, oracle)

        overlay = None
        summary = None
        if name is AlgorithmName.DPOGD:
            if contraction is not None:
                overlay = theoretical_overlay(
                    schedule, contraction, ledger.path, rebuild=config.run.overlay_rebuild
                )
            smoothness = stream_constants(stream, schedule.sample_times)
            records = consensus_diagnostics(
                trace, stream, config.algorithms.alpha_dpogd, oracle, contraction, smoothness
            )
            write_csv(diagnostics_frame(records), directory / "diagnostics_dpogd.csv", manifest_hash)
            summary = summarize_diagnostics(records)
            if not summary.satisfied():
                logger.warning(f"[{run_context.tag}] per-iteration bounds violated: {summary}")
        write_csv(ledger.to_frame(overlay), directory / f"metrics_{name.value}.csv", manifest_hash)
        if config.run.write_traces:
            frame = trace.to_frame(oracle.x_star, include_x=config.run.trace_x)
            write_csv(frame, directory / f"trace_{name.value}.csv", manifest_hash)

        results[name.value] = AlgorithmResult(
            algorithm=name.value,
            ledger=ledger,
            updates=trace.update_count,
            flops_per_update=counter.per_update(name.value),
            diagnostics=summary,
        )
        logger.info(
            f"[{run_context.tag}] Reg_T/T={ledger.final_over_T:.4e} after {trace.update_count} updates "
            f"({run_context.elapsed_time} ms)"
        )

    residual = path_residual(oracle, schedule)
    if residual < -1e-12:
        logger.warning(f"[{context.tag}] subsampled path length exceeds C_T by {-residual:.3e}")
    return SeedResult(
        seed=seed,
        directory=directory,
        manifest_hash=manifest_hash,
        path_length=oracle.path_length,
        path_residual=residual,
        results=results,
    )


def _safe_slope(t: np.ndarray, values: np.ndarray) -> float:
    try:
        return loglog_slope(t, values)
    except SeriesError:
        return math.nan


def aggregate_seeds(config: ExperimentConfig, seeds: list[SeedResult]) -> ExperimentResult:
    """
    Median-over-seeds series per algorithm; writes manifest.json and median_<alg>.csv.

    Args:
        config: The experiment config.
        seeds: Seed results in seed order.

    Returns:
        ExperimentResult: Medians, final Reg_T/T and last-decade slopes.
    """
    output = config.run.output
    manifest = {
        "experiment": config.run.name,
        "config": config.model_dump(mode="json"),
        "seeds": {str(result.seed): result.manifest_hash for result in seeds},
    }
    manifest["manifest_hash"] = canonical_hash(manifest)
    write_json(output / "manifest.json", manifest)

    t = np.arange(1, config.run.horizon + 1)
    path_over_T = np.zeros(t.size)
    medians: dict[str, pd.DataFrame] = {}
    final: dict[str, float] = {}
    slopes: dict[str, float] = {}
    for algorithm, results in _by_algorithm(seeds).items():
        regret = np.median(np.stack([r.ledger.cumulative for r in results]), axis=0) / t
        path = np.median(np.stack([r.ledger.path for r in results]), axis=0) / t
        frame = pd.DataFrame({"t": t, "regret_cum_over_T": regret, "C_t_over_T": path})
        write_csv(frame, output / f"median_{algorithm}.csv", manifest["manifest_hash"])
        medians[algorithm] = frame
        final[algorithm] = float(regret[-1])
        slopes[algorithm] = _safe_slope(t, regret)
        path_over_T = path
    return ExperimentResult(
        name=config.run.name,
        output=output,
        manifest_hash=manifest["manifest_hash"],
        label=config.network.label,
        seeds=seeds,
        medians=medians,
        final_over_T=final,
        slopes=slopes,
        path_slope=_safe_slope(t, path_over_T),
    )


def _by_algorithm(seeds: list[SeedResult]) -> dict[str, list[AlgorithmResult]]:
    grouped: dict[str, list[AlgorithmResult]] = {}
    for seed in seeds:
        for algorithm, result in seed.results.items():
            grouped.setdefault(algorithm, []).append(result)
    return grouped


async def run_experiment_async(config: ExperimentConfig, executor: Executor) -> ExperimentResult:
    """
    Run every seed of an experiment in the executor and aggregate the results.

    Args:
        config: The experiment config.
        executor: Executor the per-seed runs are submitted to.

    Returns:
        ExperimentResult: The aggregated experiment.
    """
    context = RunContext(config.run.name, 0)
    logger.info(f"Running {config.run.name}: {len(config.run.seeds)} seeds, algorithms "
                f"{[name.value for name in config.algorithms.names]}")
    run = await_sync_function(run_seed, executor)
    seeds = await asyncio.gather(
        *(run(config, seed, config.run.output / f"seed_{seed}") for seed in config.run.seeds)
    )
    result = aggregate_seeds(config, list(seeds))
    write_report(result, config, config.run.output / "report.md")
    logger.info(f"Finished {config.run.name} in {context.elapsed_time} ms -> {config.run.output}")
    return result


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run an experiment on a thread pool of `run.threads` workers."""

    async def main() -> ExperimentResult:
        with ThreadPoolExecutor(max_workers=config.run.threads) as executor:
            return await run_experiment_async(config, executor)

    return asyncio.run(main())


def sweep_cells(config: ExperimentConfig) -> list[ExperimentConfig]:
    """
    One config per (graph family, S) cell of the sweep grid.

    Raises:
        ConfigurationError: If an iota is outside [1, N - 1].
    """
    N = config.problem.N
    if any(not 1 <= iota <= N - 1 for iota in config.sweep.iotas):
        raise ConfigurationError(f"sweep.iotas must lie in [1, {N - 1}] for N={N}")
    families: list[int | None] = list(config.sweep.iotas) + ([None] if config.sweep.complete else [])
    return [config.with_cell(iota, steps) for iota in families for steps in config.sweep.steps]


def run_sweep(config: ExperimentConfig) -> dict[str, ExperimentResult]:
    """
    Run the grid over graph families and S(k); cells share one thread pool.

    Writes sweep_summary.csv (one row per cell and algorithm) at the sweep root.

    Args:
        config: The experiment config with a sweep section.

    Returns:
        dict[str, ExperimentResult]: Results keyed by cell directory name.
    """
    cells = sweep_cells(config)

    async def main() -> list[ExperimentResult]:
        with ThreadPoolExecutor(max_workers=config.run.threads) as executor:
            return await asyncio.gather(*(run_experiment_async(cell, executor) for cell in cells))

    results = {cell.run.output.name: result for cell, result in zip(cells, asyncio.run(main()))}
    rows = [
        {
            "cell": name,
            "graph": result.label,
            "S": int(name.rsplit("_S", 1)[1]),
            "algorithm": algorithm,
            "regret_cum_over_T": value,
            "slope": result.slopes[algorithm],
            "C_t_slope": result.path_slope,
        }
        for name, result in results.items()
        for algorithm, value in result.final_over_T.items()
    ]
    sweep_hash = canonical_hash({"sweep": config.model_dump(mode="json"),
                                 "cells": {name: r.manifest_hash for name, r in results.items()}})
    write_csv(pd.DataFrame(rows), config.run.output / "sweep_summary.csv", sweep_hash)
    return results


class ConfigCheck(BaseModel):
    """Outcome of the graph and assumption checks of `validate`."""

    model_config = ConfigDict(frozen=True)

    slots_checked: int
    failures: list[tuple[int, list[int]]]
    eta: float
    B: int | None
    contraction: ContractionConstants | None
    smoothness: SmoothnessConstants
    alpha: float
    alpha_max: float
    iterations: int

    @property
    def passed(self) -> bool:
        """Every checked matrix is valid and a connectivity window was found."""
        return not self.failures and self.B is not None


def validate_config(config: ExperimentConfig, seed: int | None = None) -> ConfigCheck:
    """
    Check the weight assumptions and connectivity without running any algorithm.

    Args:
        config: The experiment config.
        seed: Seed of the checked instance (default: the first configured seed).

    Returns:
        ConfigCheck: Per-slot validation failures, window B, constants and step range.
    """
    seed = config.run.seeds[0] if seed is None else seed
    horizon = config.run.horizon
    mixing = config.network.build(config.problem.N, seed)
    probe = mixing.window(1, 1 + min(config.network.probe_slots, horizon))
    failures = []
    for matrix in probe:
        report = validate(matrix)
        if not report.passed:
            failures.append((matrix.slot, report.failed_clauses))
            logger.warning(f"slot {matrix.slot}: clauses {report.failed_clauses} fail ({report})")
    B = config.network.B or (estimate_connectivity_window(probe, config.network.max_B) if mixing.N > 1 else 1)
    contraction = certify_contraction(config.network, mixing, horizon)
    schedule = config.schedule.build(horizon)
    stream = ProblemStream(config.problem, horizon, seed)
    smoothness = stream_constants(stream, schedule.sample_times[: min(schedule.K, 50)])
    alpha = config.algorithms.alpha_dpogd
    if alpha >= smoothness.alpha_max():
        logger.warning(
            f"alpha_dpogd={alpha} is outside (0, 2 mu / L^2) = (0, {smoothness.alpha_max():.3e}); "
            "the per-iteration progress bound is not guaranteed"
        )
    return ConfigCheck(
        slots_checked=len(probe),
        failures=failures,
        eta=mixing.eta,
        B=B,
        contraction=contraction,
        smoothness=smoothness,
        alpha=alpha,
        alpha_max=smoothness.alpha_max(),
        iterations=schedule.K,
    )
