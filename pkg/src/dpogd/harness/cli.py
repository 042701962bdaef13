import logging
from pathlib import Path
from typing import Annotated, Any, Callable, Optional

import logzero
import typer

from dpogd.exceptions import ConfigurationError, resolve_exit_code

from .config import load_config
from .plots import PlotStyle, emit_plot
from .runner import ExperimentResult, run_experiment, run_sweep, validate_config

app = typer.Typer(
    name="dpogd",
    help="Simulate distributed proximal online gradient descent and its baselines.",
    no_args_is_help=True,
    add_completion=False,
)

SeedOption = Annotated[Optional[int], typer.Option("--seed", help="Run this single seed.")]
OutOption = Annotated[Optional[Path], typer.Option("--out", help="Output directory.")]
ThreadsOption = Annotated[Optional[int], typer.Option("--threads", help="Worker threads.")]


def _invoke(func: Callable[..., Any], *args: Any, **kwargs: Any) -> Any:
    """Run a command body, turning known errors into their exit codes."""
    try:
        return func(*args, **kwargs)
    except Exception as exc:
        code = resolve_exit_code(exc)
        if code is None:
            raise
        raise typer.Exit(code=int(code)) from exc


def _summarize(result: ExperimentResult) -> None:
    typer.echo(f"{result.name}: {result.output} (manifest {result.manifest_hash[:12]})")
    for algorithm, final in result.final_over_T.items():
        typer.echo(f"  {algorithm:<12} Reg_T/T={final:.4e}  slope={result.slopes[algorithm]:.3f}")


@app.callback()
def main(
    verbose: Annotated[bool, typer.Option("--verbose", "-v", help="Log debug messages.")] = False,
    quiet: Annotated[bool, typer.Option("--quiet", "-q", help="Log warnings and errors only.")] = False,
) -> None:
    logzero.loglevel(logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO)


@app.command()
def run(
    config: Annotated[Path, typer.Argument(help="YAML experiment config.")],
    seed: SeedOption = None,
    out: OutOption = None,
    threads: ThreadsOption = None,
) -> None:
    """Run every configured algorithm on every seed and write CSVs, manifests and a report."""

    def body() -> None:
        experiment = load_config(config).with_overrides(seed=seed, output=out, threads=threads)
        _summarize(run_experiment(experiment))

    _invoke(body)


@app.command()
def sweep(
    config: Annotated[Path, typer.Argument(help="YAML experiment config with a sweep section.")],
    seed: SeedOption = None,
    out: OutOption = None,
    threads: ThreadsOption = None,
) -> None:
    """Run the grid over graph families and consensus step counts."""

    def body() -> None:
        experiment = load_config(config).with_overrides(seed=seed, output=out, threads=threads)
        for result in run_sweep(experiment).values():
            _summarize(result)

    _invoke(body)


@app.command()
def validate(
    config: Annotated[Path, typer.Argument(help="YAML experiment config.")],
    seed: SeedOption = None,
) -> None:
    """Check mixing matrices, connectivity and step sizes without running any algorithm."""

    def body() -> None:
        check = validate_config(load_config(config), seed)
        typer.echo(f"slots checked: {check.slots_checked}, eta={check.eta:.4g}, B={check.B}")
        if check.contraction is not None:
            typer.echo(f"Gamma={check.contraction.Gamma:.4e}, log gamma={check.contraction.log_gamma:.4e}")
        smoothness = check.smoothness
        typer.echo(
            f"mu={smoothness.mu:.4e}, L={smoothness.L:.4e}, M={smoothness.M:.4e}, "
            f"alpha={check.alpha} (progress bound needs alpha < {check.alpha_max:.4e})"
        )
        typer.echo(f"iterations K={check.iterations}")
        if not check.passed:
            raise ConfigurationError(
                f"{len(check.failures)} invalid mixing matrices, connectivity window B={check.B}"
            )
        typer.echo("ok")

    _invoke(body)


@app.command()
def plot(
    directory: Annotated[Path, typer.Argument(help="Experiment, seed or sweep directory.")],
    style: Annotated[
        PlotStyle, typer.Option("--style", help="fig1: algorithms compared; fig2: one panel per graph family.")
    ] = PlotStyle.FIG1,
    out: OutOption = None,
) -> None:
    """Write a log-log SVG of Reg_T/T against T."""
    typer.echo(_invoke(emit_plot, directory, style, out))


if __name__ == "__main__":
    app()
