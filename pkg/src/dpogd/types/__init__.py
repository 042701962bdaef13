from .types import RealVector, RealMatrix, BoolMatrix, Seed, as_real

__all__: list[str] = ["RealVector", "RealMatrix", "BoolMatrix", "Seed", "as_real"]
