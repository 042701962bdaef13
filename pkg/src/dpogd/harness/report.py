import math
from pathlib import Path
from statistics import median
from typing import TYPE_CHECKING, Any

from jinja2 import Template
from logzero import logger

if TYPE_CHECKING:
    from .config import ExperimentConfig
    from .runner import ExperimentResult

REPORT_TEMPLATE = """# {{ name }}

manifest: `{{ manifest_hash }}`

| setting | value |
|---|---|
| nodes N | {{ config.problem.N }} |
| dimension n | {{ config.problem.n }} |
| measurements per node d | {{ config.problem.d }} |
| horizon T | {{ config.run.horizon }} |
| graph | {{ label }} |
| schedule | {{ config.schedule.kind.value }} {{ schedule_params }} |
| seeds | {{ seeds | join(", ") }} |

## Regret (median over seeds)

| algorithm | Reg_T / T | slope (last decade) | updates | flops / update | bounds |
|---|---|---|---|---|---|
{% for row in rows -%}
| {{ row.algorithm }} | {{ row.final }} | {{ row.slope }} | {{ row.updates }} | {{ row.flops }} | {{ row.bounds }} |
{% endfor %}
Path length C_T / T slope: {{ path_slope }}

## Seeds

| seed | manifest | C_T | C_T - subsampled path |
|---|---|---|---|
{% for seed in seed_rows -%}
| {{ seed.seed }} | `{{ seed.manifest_hash[:12] }}` | {{ seed.path }} | {{ seed.residual }} |
{% endfor %}
"""
"""Jinja2 template of report.md."""


def _number(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.4e}"


def render_report(result: "ExperimentResult", config: "ExperimentConfig") -> str:
    """
    Render the markdown summary of an experiment.

    The report holds no timings, so reruns with the same config produce identical bytes.

    Args:
        result: The aggregated experiment.
        config: Its config.

    Returns:
        str: The markdown text.
    """
    rows: list[dict[str, Any]] = []
    for algorithm, final in result.final_over_T.items():
        per_seed = [seed.results[algorithm] for seed in result.seeds]
        summaries = [r.diagnostics for r in per_seed if r.diagnostics is not None]
        if summaries:
            bounds = "hold" if all(s.satisfied() for s in summaries) else "violated"
        else:
            bounds = "-"
        rows.append(
            {
                "algorithm": algorithm,
                "final": _number(final),
                "slope": _number(result.slopes[algorithm]),
                "updates": int(median(r.updates for r in per_seed)),
                "flops": _number(median(r.flops_per_update for r in per_seed)),
                "bounds": bounds,
            }
        )
    seed_rows = [
        {
            "seed": seed.seed,
            "manifest_hash": seed.manifest_hash,
            "path": _number(seed.path_length),
            "residual": _number(seed.path_residual),
        }
        for seed in result.seeds
    ]
    schedule_params = ", ".join(f"{key}={value}" for key, value in config.schedule.params.items())
    template = Template(REPORT_TEMPLATE)
    return template.render(
        name=result.name,
        manifest_hash=result.manifest_hash,
        config=config,
        label=result.label,
        schedule_params=schedule_params,
        seeds=config.run.seeds,
        rows=rows,
        seed_rows=seed_rows,
        path_slope=_number(result.path_slope),
    )


def write_report(result: "ExperimentResult", config: "ExperimentConfig", path: Path) -> None:
    """Render the report and write it to `path`."""
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_report(result, config))
    logger.debug(f"Wrote report {path}")
