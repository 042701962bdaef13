import math
from enum import Enum
from pathlib import Path

import matplotlib as mpl
import numpy as np
import pandas as pd
from logzero import logger
from matplotlib.axes import Axes
from matplotlib.figure import Figure

from dpogd.exceptions import SeriesError
from dpogd.metrics import log_grid
from dpogd.utils import read_csv


class PlotStyle(str, Enum):
    """fig1: one panel comparing algorithms; fig2: one panel per graph family of a sweep."""

    FIG1 = "fig1"
    FIG2 = "fig2"


SERIES_PREFIXES = ("median_", "metrics_")
"""Experiment roots hold median_<alg>.csv, seed directories metrics_<alg>.csv."""


def load_series(directory: Path) -> tuple[dict[str, pd.DataFrame], list[str]]:
    """
    Read the per-algorithm regret series of a run directory.

    Median files are preferred; a seed directory falls back to its metrics files.

    Args:
        directory: Experiment root or seed directory.

    Returns:
        tuple[dict[str, pd.DataFrame], list[str]]: Frames keyed by algorithm and
            the manifest hashes they reference.

    Raises:
        SeriesError: If the directory holds no series.
    """
    for prefix in SERIES_PREFIXES:
        files = sorted(directory.glob(f"{prefix}*.csv"))
        if files:
            break
    else:
        raise SeriesError(f"no median_*.csv or metrics_*.csv series in {directory}")
    series: dict[str, pd.DataFrame] = {}
    hashes: list[str] = []
    for path in files:
        frame, manifest_hash = read_csv(path)
        missing = {"t", "regret_cum_over_T", "C_t_over_T"} - set(frame.columns)
        if missing:
            raise SeriesError(f"{path} lacks columns {sorted(missing)}")
        series[path.stem.removeprefix(prefix)] = frame
        if manifest_hash is not None and manifest_hash not in hashes:
            hashes.append(manifest_hash)
    return series, hashes


def _thin(frame: pd.DataFrame, points: int = 400) -> pd.DataFrame:
    horizon = int(frame["t"].iloc[-1])
    if horizon < 3:
        return frame
    keep = np.isin(frame["t"].to_numpy(), log_grid(horizon, points=points, start=1))
    return frame[keep]


def _draw_panel(axes: Axes, series: dict[str, pd.DataFrame], title: str) -> None:
    reference = None
    for label, frame in series.items():
        thinned = _thin(frame)
        positive = thinned[thinned["regret_cum_over_T"] > 0.0]
        axes.plot(positive["t"], positive["regret_cum_over_T"], label=label, linewidth=1.2)
        if "overlay" in thinned and thinned["overlay"].notna().any():
            overlay = thinned[thinned["overlay"] > 0.0]
            axes.plot(overlay["t"], overlay["overlay"] / overlay["t"], linestyle=":", label=f"{label} bound")
        if reference is None:
            reference = thinned
    if reference is not None:
        path = reference[reference["C_t_over_T"] > 0.0]
        axes.plot(path["t"], path["C_t_over_T"], color="black", linestyle="--", label="C_T/T")
    axes.set_xscale("log")
    axes.set_yscale("log")
    axes.set_xlabel("T")
    axes.set_ylabel("Reg_T / T")
    axes.set_title(title)
    axes.grid(True, which="major", linewidth=0.3)
    axes.legend(fontsize="small")


def _sweep_panels(directory: Path) -> dict[str, dict[str, pd.DataFrame]]:
    panels: dict[str, dict[str, pd.DataFrame]] = {}
    for cell in sorted(path for path in directory.iterdir() if path.is_dir() and "_S" in path.name):
        family, steps = cell.name.rsplit("_S", 1)
        try:
            series, _ = load_series(cell)
        except SeriesError:
            logger.warning(f"Skipping sweep cell {cell.name}: no series")
            continue
        panel = panels.setdefault(family, {})
        for algorithm, frame in series.items():
            panel[f"{algorithm} S={steps}"] = frame
    return panels


def emit_plot(directory: Path, style: PlotStyle | str = PlotStyle.FIG1, output: Path | None = None) -> Path:
    """
    Write a log-log SVG of Reg_T/T against T with the C_T/T reference.

    fig1 plots one experiment (or seed) directory; fig2 plots a sweep root with
    one panel per graph family. Axis scales and the plotted series are recorded
    in the SVG metadata.

    Args:
        directory: Run directory.
        style: fig1 or fig2.
        output: Destination (default: <directory>/<style>.svg).

    Returns:
        Path: The written file.

    Raises:
        SeriesError: If no series can be found.
    """
    style = PlotStyle(style)
    output = output or directory / f"{style.value}.svg"
    if style is PlotStyle.FIG1:
        series, hashes = load_series(directory)
        panels = {directory.name: series}
    else:
        panels = _sweep_panels(directory)
        if not panels:
            raise SeriesError(f"no sweep cells with series in {directory}")
        hashes = []

    columns = min(len(panels), 2)
    rows = math.ceil(len(panels) / columns)
    figure = Figure(figsize=(6.0 * columns, 4.5 * rows))
    grid = figure.subplots(rows, columns, squeeze=False)
    for axes, (title, series) in zip(grid.flat, panels.items()):
        _draw_panel(axes, series, title)
    for axes in list(grid.flat)[len(panels):]:
        axes.set_visible(False)
    figure.tight_layout()

    description = ";".join(
        [
            "xscale=log",
            "yscale=log",
            f"style={style.value}",
            f"panels={','.join(panels)}",
            f"series={','.join(sorted({name for series in panels.values() for name in series}))}",
        ]
    )
    output.parent.mkdir(parents=True, exist_ok=True)
    with mpl.rc_context({"svg.hashsalt": "dpogd", "svg.fonttype": "none"}):
        figure.savefig(
            output,
            format="svg",
            metadata={
                "Title": f"{directory.name} {style.value}",
                "Description": description,
                "Source": ",".join(hashes) or str(directory),
                "Date": None,
            },
        )
    logger.info(f"Wrote {output} ({len(panels)} panel(s))")
    return output
