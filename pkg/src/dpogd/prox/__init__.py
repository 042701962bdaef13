from .operators import NonsmoothSpec, soft_threshold, project_ball, prox_composite

__all__: list[str] = [
    "NonsmoothSpec",
    "soft_threshold",
    "project_ball",
    "prox_composite",
]
