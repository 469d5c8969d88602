"""
Puissance agrégée d'une flotte regroupée et capacité de réserve équivalente
"""

import logging
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ...core.unit_manager import UnitManager
from ..fleet.clustering import Cluster
from .timeline import MigrationTimeline, expected_cycle_times

logger = logging.getLogger(__name__)


def cluster_duty(T_on: float, T_off: float, return_flag: bool = False) -> Union[float, Tuple[float, bool]]:
    """
    Rapport cyclique η = T_on / (T_on + T_off), dans [0, 1].

    Si les deux durées sont nulles, η = 0 et l'entrée est signalée dégénérée.
    """
    total = T_on + T_off
    degenerate = not total > 0
    if degenerate:
        logger.warning("Rapport cyclique demandé pour T_on = T_off = 0")
        eta = 0.0
    else:
        eta = min(max(T_on / total, 0.0), 1.0)
    if return_flag:
        return eta, degenerate
    return eta


def _check_pairs(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline]):
    if len(clusters) != len(timelines):
        raise ValueError(f"{len(clusters)} groupes mais {len(timelines)} chronologies")


def aggregate_power(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline], t: float) -> float:
    """P_g(t) = Σ_c η_c(t)·w_c, en MW ; w_c = Σp_c, ou Σ_v p_v·η_v⁰ / η_c⁰ pour un groupe issu du k-means"""
    _check_pairs(clusters, timelines)
    total_kw = 0.0
    for cluster, timeline in zip(clusters, timelines):
        total_kw += cluster_duty(*expected_cycle_times(timeline, t)) * cluster.power_weight
    return UnitManager.kw_to_mw(total_kw)


def baseline_power(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline]) -> float:
    """Puissance P⁰ avant le décalage (régime établi initial), en MW"""
    _check_pairs(clusters, timelines)
    total_kw = sum(cluster_duty(*timeline.base_times) * cluster.power_weight
                   for cluster, timeline in zip(clusters, timelines))
    return UnitManager.kw_to_mw(total_kw)


def reserve_capacity(P0: float, P_t: float) -> float:
    """RC(t) = P⁰ − P(t), en MW"""
    return P0 - P_t


def power_trajectory(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline],
                     times: np.ndarray) -> pd.DataFrame:
    """Trajectoire (time_h, power_mw, reserve_mw) sur une grille de temps en heures"""
    p0 = baseline_power(clusters, timelines)
    power = np.array([aggregate_power(clusters, timelines, t) for t in times])
    return pd.DataFrame({
        "time_h": np.asarray(times, dtype=float),
        "power_mw": power,
        "reserve_mw": reserve_capacity(p0, power),
    })
