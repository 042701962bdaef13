import time
import uuid


class RunContext:
    """
    Context for a single deterministic algorithm run.

    Tags log lines with the run identity (experiment, seed, algorithm) and
    tracks execution time.
    """

    def __init__(self, experiment: str, seed: int, algorithm: str = "") -> None:
        """
        Initialize the RunContext.

        Args:
            experiment: Name of the experiment the run belongs to.
            seed: The run seed.
            algorithm: The algorithm being executed (default: "").
        """
        self.experiment = experiment
        self.seed = seed
        self.algorithm = algorithm
        self.run_id = uuid.uuid5(uuid.NAMESPACE_OID, f"{experiment}:{seed}:{algorithm}").hex[:12]
        self._start_time = time.perf_counter()

    @property
    def elapsed_time(self) -> int:
        """
        Calculate the time elapsed since context initialization in milliseconds.

        Returns:
            int: Elapsed time in milliseconds.
        """
        return int((time.perf_counter() - self._start_time) * 1000)

    @property
    def tag(self) -> str:
        """Short label used as a log prefix."""
        label = f"{self.experiment}/seed={self.seed}"
        return f"{label}/{self.algorithm}" if self.algorithm else label

    def for_algorithm(self, algorithm: str) -> "RunContext":
        """
        Derive the context of one algorithm within this seed.

        Args:
            algorithm: The algorithm name.

        Returns:
            RunContext: A fresh context sharing experiment and seed.
        """
        return RunContext(self.experiment, self.seed, algorithm)

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.tag}, run_id={self.run_id})"
