"""Data-driven distributionally robust chance constraints."""

from ._ddcc import (
    EmptyState,
    MomentMode,
    MomentState,
    NotEnoughSamples,
    SupportSet,
    betting,
    comparison_constants,
    cor1_auto_p,
    inverse_normal_cdf,
    merge,
    min_samples_cor1,
    schedule_cor1,
    schedule_cor2,
    schedule_cor3,
    schedule_prop2,
    schedule_thm1,
)

__all__ = [
    "EmptyState",
    "MomentMode",
    "MomentState",
    "NotEnoughSamples",
    "SupportSet",
    "betting",
    "comparison_constants",
    "cor1_auto_p",
    "inverse_normal_cdf",
    "merge",
    "min_samples_cor1",
    "schedule_cor1",
    "schedule_cor2",
    "schedule_cor3",
    "schedule_prop2",
    "schedule_thm1",
]
