"""
Dynamique agrégée des TCL après un décalage de consigne
"""

from .timeline import (
    AffineForm,
    IntervalPiece,
    MigrationTimeline,
    DelayOrder,
    CycleGap,
    build_timeline,
    build_timelines,
    build_timeline_from_quantities,
    timeline_quantities,
    expected_cycle_times,
    junction_jumps,
)
from .aggregate import cluster_duty, aggregate_power, reserve_capacity, baseline_power, power_trajectory

__all__ = [
    'AffineForm',
    'IntervalPiece',
    'MigrationTimeline',
    'DelayOrder',
    'CycleGap',
    'build_timeline',
    'build_timelines',
    'build_timeline_from_quantities',
    'timeline_quantities',
    'expected_cycle_times',
    'junction_jumps',
    'cluster_duty',
    'aggregate_power',
    'reserve_capacity',
    'baseline_power',
    'power_trajectory',
]
