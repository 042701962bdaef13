from .pogd import centralized_trace, run_centralized_pogd
from .admm import (
    AdmmParams,
    AdmmState,
    admm_step,
    run_admm,
    run_slowed_admm,
    cc_admm_firing_slots,
    run_cc_admm,
)

__all__: list[str] = [
    "centralized_trace",
    "run_centralized_pogd",
    "AdmmParams",
    "AdmmState",
    "admm_step",
    "run_admm",
    "run_slowed_admm",
    "cc_admm_firing_slots",
    "run_cc_admm",
]
