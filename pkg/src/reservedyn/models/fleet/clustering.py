"""
Regroupement des TCL par temps de cycle (k-means) et choix du nombre de groupes
par le critère de Calinski-Harabasz.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from sklearn.cluster import KMeans
from sklearn.metrics import calinski_harabasz_score

from ..thermal.device import DeviceParams, HysteresisBand
from .population import Fleet

logger = logging.getLogger(__name__)

KMEANS_MAX_ITER = 300
KMEANS_TOL = 1e-6
KMEANS_N_INIT = 4


@dataclass(frozen=True)
class Cluster:
    """
    Groupe de TCL représenté par l'appareil le plus proche du centroïde.

    member_power_sum est en kW (somme des puissances nominales des membres).
    steady_power_sum est Σ p_v·η_v⁰ des membres (kW) ; s'il est connu, la puissance du groupe
    suit η_rep(t)/η_rep⁰ à partir de cette base exacte au lieu de η_rep(t)·Σp.
    """
    representative: DeviceParams
    band: HysteresisBand
    member_power_sum: float
    member_count: int
    members: Optional[np.ndarray] = None
    steady_power_sum: Optional[float] = None
    representative_duty: Optional[float] = None

    @property
    def power_weight(self) -> float:
        """Puissance (kW) multipliée par le rapport cyclique du représentant"""
        if self.steady_power_sum is None or not self.representative_duty:
            return self.member_power_sum
        return self.steady_power_sum / self.representative_duty

    def scaled(self, share: float) -> "Cluster":
        """Même groupe dont la puissance est multipliée par share (répartition par nœud)"""
        steady = None if self.steady_power_sum is None else self.steady_power_sum * share
        return Cluster(self.representative, self.band, self.member_power_sum * share,
                       self.member_count, self.members, steady, self.representative_duty)

    def __str__(self) -> str:
        return (f"Cluster({self.member_count} TCL, {self.member_power_sum / 1000.0:.2f} MW, "
                f"représentant {self.representative}, {self.band})")


def _features(fleet: Fleet, ambient: float) -> np.ndarray:
    """Caractéristiques (T_on⁰, T_off⁰) en minutes, non normalisées"""
    t_on, t_off = fleet.cycle_times(ambient)
    return np.column_stack([np.atleast_1d(t_on), np.atleast_1d(t_off)]) * 60.0


def _kmeans(features: np.ndarray, n_clusters: int, seed: int) -> KMeans:
    model = KMeans(n_clusters=n_clusters, init="k-means++", n_init=KMEANS_N_INIT,
                   max_iter=KMEANS_MAX_ITER, tol=KMEANS_TOL, random_state=seed)
    return model.fit(features)


def cluster_by_cycle_times(devices: Fleet, ambient: float, Q: int, seed: int = 0) -> List[Cluster]:
    """
    k-means sur les temps de cycle ; chaque représentant est le membre le plus proche
    du centroïde de son groupe.
    """
    n = len(devices)
    if Q < 1:
        raise ValueError(f"Le nombre de groupes doit être ≥ 1 (reçu {Q})")
    if Q > n:
        raise ValueError(f"Nombre de groupes Q={Q} supérieur au nombre d'appareils ({n})")

    features = _features(devices, ambient)
    duties = features[:, 0] / features.sum(axis=1)
    if Q == 1:
        labels = np.zeros(n, dtype=int)
        centers = features.mean(axis=0, keepdims=True)
    else:
        model = _kmeans(features, Q, seed)
        labels, centers = model.labels_, model.cluster_centers_

    clusters = []
    for c in range(Q):
        members = np.flatnonzero(labels == c)
        if members.size == 0:
            continue
        distances = np.linalg.norm(features[members] - centers[c], axis=1)
        representative = int(members[np.argmin(distances)])
        params, band = devices[representative]
        clusters.append(Cluster(params, band, float(devices.p[members].sum()), int(members.size), members,
                                float(devices.p[members] @ duties[members]), float(duties[representative])))

    #ordre déterministe : temps de cycle croissant du représentant
    clusters.sort(key=lambda cl: (cl.band.setpoint, cl.representative.C, cl.representative.R))
    logger.info(f"{len(clusters)} groupes de TCL formés")
    for cluster in clusters:
        logger.debug(str(cluster))
    return clusters


def choose_cluster_count(devices: Fleet, ambient: float, Qmax: int, seed: int = 0) -> int:
    """Nombre de groupes dans [2, Qmax] maximisant l'indice de Calinski-Harabasz"""
    if Qmax < 2:
        raise ValueError(f"Qmax doit être ≥ 2 (reçu {Qmax})")
    n = len(devices)
    upper = min(Qmax, n - 1)
    if upper < 2:
        raise ValueError(f"Trop peu d'appareils ({n}) pour choisir un nombre de groupes")
    if upper == 2:
        return 2

    features = _features(devices, ambient)
    best_q, best_score = 2, -np.inf
    for q in range(2, upper + 1):
        model = _kmeans(features, q, seed)
        if len(np.unique(model.labels_)) < 2:
            continue
        score = calinski_harabasz_score(features, model.labels_)
        logger.debug(f"Calinski-Harabasz Q={q}: {score:.1f}")
        if score > best_score:
            best_q, best_score = q, score
    logger.info(f"Nombre de groupes retenu : {best_q}")
    return best_q
