from ._core import (
    BudgetExceeded,
    DimensionMismatch,
    Geometry,
    PreconditionViolation,
    ScheduleEntry,
    __version__,
    acceptance,
    adversary,
    dual_norm,
    fit_rate,
    norm,
    probe_bound,
    run,
    schedule_general,
    schedule_smooth,
)

__all__ = [
    "BudgetExceeded",
    "DimensionMismatch",
    "Geometry",
    "PreconditionViolation",
    "ScheduleEntry",
    "__version__",
    "acceptance",
    "adversary",
    "dual_norm",
    "fit_rate",
    "norm",
    "probe_bound",
    "run",
    "schedule_general",
    "schedule_smooth",
]
