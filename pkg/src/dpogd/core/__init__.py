from .schedule import (
    ScheduleKind,
    SlotKind,
    ConsensusSchedule,
    BoundComponents,
    build_schedule,
    schedule_from_steps,
    floor_time,
    bound_components,
)
from .context import RunContext

__all__: list[str] = [
    "ScheduleKind",
    "SlotKind",
    "ConsensusSchedule",
    "BoundComponents",
    "build_schedule",
    "schedule_from_steps",
    "floor_time",
    "bound_components",
    "RunContext",
]
