from enum import Enum
from pathlib import Path
from typing import Any, Literal

import yaml
from logzero import logger
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dpogd.baselines import AdmmParams
from dpogd.core import ConsensusSchedule, ScheduleKind, build_schedule
from dpogd.exceptions import ConfigurationError
from dpogd.graph import CompleteMixing, MixingSequence, PermutationMixing
from dpogd.problem import ProblemSpec
from dpogd.types import Seed


class AlgorithmName(str, Enum):
    """Algorithms the harness can run on a shared instance."""

    DPOGD = "dpogd"
    POGD = "pogd"
    POGD_SLOWED = "pogd-slowed"
    ADMM = "admm"
    ADMM_SLOWED = "admm-slowed"
    CC_ADMM_SH = "cc-admm-sh"
    CC_ADMM_MH = "cc-admm-mh"


class NetworkSection(BaseModel):
    """
    Graph family: the complete graph or A_t built from iota basis permutations.

    Attributes:
        family: "complete" or "permutation".
        iota: Number of mixed non-identity permutations (1 <= iota <= N - 1).
        B: Connectivity window used for the contraction constants
            (None: estimated from the first `probe_slots` matrices).
        max_B: Largest window tried by the estimate.
        probe_slots: Number of slots inspected by the estimate and by `validate`.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Literal["complete", "permutation"] = "permutation"
    iota: int = Field(default=1, ge=1)
    B: int | None = Field(default=None, ge=1)
    max_B: int = Field(default=10, ge=1)
    probe_slots: int = Field(default=200, ge=1)

    @property
    def label(self) -> str:
        return "complete" if self.family == "complete" else f"iota{self.iota}"

    def build(self, N: int, seed: int) -> MixingSequence:
        """The run's mixing sequence."""
        if self.family == "complete" or N == 1:
            return CompleteMixing(N)
        return PermutationMixing(N, self.iota, seed)


class ScheduleSection(BaseModel):
    """Consensus schedule: explicit S(k) list (default [5]), constant u or logarithmic c."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: ScheduleKind = ScheduleKind.EXPLICIT
    steps: list[int] = Field(default_factory=lambda: [5], min_length=1)
    u: float | None = Field(default=None, gt=0.0, lt=1.0)
    c: float | None = Field(default=None, gt=1.0)
    reject_non_monotone: bool = True

    @model_validator(mode="after")
    def _check_params(self) -> "ScheduleSection":
        if self.kind is ScheduleKind.CONSTANT and self.u is None:
            raise ValueError("constant schedule needs u")
        if self.kind is ScheduleKind.LOGARITHMIC and self.c is None:
            raise ValueError("logarithmic schedule needs c")
        return self

    @property
    def params(self) -> dict[str, Any]:
        if self.kind is ScheduleKind.CONSTANT:
            return {"u": self.u}
        if self.kind is ScheduleKind.LOGARITHMIC:
            return {"c": self.c}
        return {"steps": list(self.steps)}

    def build(self, horizon: int) -> ConsensusSchedule:
        return build_schedule(self.kind, self.params, horizon, reject_non_monotone=self.reject_non_monotone)


class AlgorithmSection(BaseModel):
    """Algorithms to run and their step parameters."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    names: list[AlgorithmName] = Field(
        default_factory=lambda: [
            AlgorithmName.DPOGD,
            AlgorithmName.POGD_SLOWED,
            AlgorithmName.ADMM_SLOWED,
            AlgorithmName.CC_ADMM_SH,
            AlgorithmName.CC_ADMM_MH,
        ],
        min_length=1,
    )
    alpha_dpogd: float = Field(default=0.5, gt=0.0)
    alpha_pogd: float = Field(default=0.005, gt=0.0)
    varrho: float = Field(default=1.0, gt=0.0)
    varpi: float = Field(default=0.1, ge=0.0)
    init: Literal["zeros", "random"] = "zeros"

    @property
    def admm(self) -> AdmmParams:
        return AdmmParams(varrho=self.varrho, varpi=self.varpi)


class RunSection(BaseModel):
    """Horizon, seeds, output location and what gets written."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "experiment"
    horizon: int = Field(default=20_000, ge=3)
    seeds: list[Seed] = Field(default_factory=lambda: list(range(10)), min_length=1)
    output: Path = Path("runs")
    threads: int = Field(default=4, ge=1)
    oracle_tol: float = Field(default=1e-10, gt=0.0)
    write_traces: bool = False
    trace_x: bool = False
    overlay_rebuild: bool = False

    @field_validator("seeds")
    @classmethod
    def _check_seeds(cls, seeds: list[int]) -> list[int]:
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        return seeds


class SweepSection(BaseModel):
    """Grid of graph families and constant S(k) values for `sweep`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    iotas: list[int] = Field(default_factory=lambda: [1, 2, 3])
    complete: bool = True
    steps: list[int] = Field(default_factory=lambda: [5, 30], min_length=1)


class ExperimentConfig(BaseModel):
    """A full experiment; every missing section falls back to its defaults."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    problem: ProblemSpec = Field(default_factory=ProblemSpec)
    network: NetworkSection = Field(default_factory=NetworkSection)
    schedule: ScheduleSection = Field(default_factory=ScheduleSection)
    algorithms: AlgorithmSection = Field(default_factory=AlgorithmSection)
    run: RunSection = Field(default_factory=RunSection)
    sweep: SweepSection = Field(default_factory=SweepSection)

    @model_validator(mode="after")
    def _check_network(self) -> "ExperimentConfig":
        N = self.problem.N
        if self.network.family == "permutation" and N > 1 and self.network.iota > N - 1:
            raise ValueError(f"network.iota must lie in [1, {N - 1}] for N={N}")
        return self

    def with_overrides(
        self, seed: int | None = None, output: Path | None = None, threads: int | None = None
    ) -> "ExperimentConfig":
        """
        Apply command line overrides.

        Args:
            seed: Run this single seed instead of the configured list.
            output: Output directory.
            threads: Worker thread count.

        Returns:
            ExperimentConfig: A validated copy.
        """
        run = self.run.model_dump()
        if seed is not None:
            run["seeds"] = [seed]
        if output is not None:
            run["output"] = output
        if threads is not None:
            run["threads"] = threads
        return ExperimentConfig.model_validate({**self.model_dump(), "run": run})

    def with_cell(self, iota: int | None, steps: int) -> "ExperimentConfig":
        """Copy for one sweep cell (iota None means the complete graph)."""
        network = {**self.network.model_dump(), "family": "complete" if iota is None else "permutation"}
        if iota is not None:
            network["iota"] = iota
        label = "complete" if iota is None else f"iota{iota}"
        run = {**self.run.model_dump(), "name": f"{self.run.name}-{label}-S{steps}"}
        run["output"] = self.run.output / f"{label}_S{steps}"
        schedule = {"kind": ScheduleKind.EXPLICIT, "steps": [steps]}
        return ExperimentConfig.model_validate(
            {**self.model_dump(), "network": network, "schedule": schedule, "run": run}
        )


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    field = ".".join(str(part) for part in error["loc"]) or "<root>"
    return f"field '{field}': {error['msg']}"


def parse_config(data: Any, source: str = "<config>") -> ExperimentConfig:
    """
    Validate a parsed YAML document.

    Args:
        data: The document (None for an empty file).
        source: Name used in error messages.

    Returns:
        ExperimentConfig: The validated config with defaults filled in.

    Raises:
        ConfigurationError: If the document is not a mapping or violates a constraint.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError(f"{source}: top level must be a mapping of sections")
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"{source}: {_first_error(exc)}") from exc


def load_config(path: Path) -> ExperimentConfig:
    """
    Load and validate a YAML experiment config.

    Args:
        path: Config file.

    Returns:
        ExperimentConfig: The validated config.

    Raises:
        ConfigurationError: If the file is missing, does not parse (with the
            line number) or fails validation (with the field name).
    """
    if not path.exists():
        raise ConfigurationError(f"config file {path} not found")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise ConfigurationError(f"{path}: YAML parse error{where}") from exc
    config = parse_config(data, source=str(path))
    logger.debug(f"Loaded config {path}: N={config.problem.N}, T={config.run.horizon}")
    return config
