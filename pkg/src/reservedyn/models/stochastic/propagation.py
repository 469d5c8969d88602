"""
Propagation des écarts d'ambiance et de consigne vers la puissance agrégée.

Pour chaque groupe, la probabilité d'être dans le morceau ξ de la chronologie vient de
lois gaussiennes sur les bornes des morceaux ; la variance de chaque borne est obtenue
au premier ordre à partir des sensibilités (différences finies) du vecteur q. L'écart
ΔP est linéarisé : ΔP = A·Δθa + B·Δθset, d'où κ_v(ΔP) = A^v·κ_v(Δθa) + B^v·κ_v(Δθset).
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from ...core.exceptions import DomainError
from ...core.unit_manager import UnitManager
from ..dynamics.aggregate import cluster_duty
from ..dynamics.timeline import IntervalPiece, MigrationTimeline, timeline_quantities
from ..fleet.clustering import Cluster
from ..thermal.device import DeviceParams, HysteresisBand
from .gram_charlier import CumulantSet, PowerDistribution
from .uncertainty import UncertaintySpec

logger = logging.getLogger(__name__)

NEGLIGIBLE_PROBABILITY = 1e-12


@dataclass(frozen=True)
class EndpointDistribution:
    """Loi gaussienne d'une borne de morceau (h, relative à t_s) ; std = 0 donne un échelon"""
    mean: float
    std: float

    def cdf(self, tau: float) -> float:
        if self.std <= 0:
            return 1.0 if tau >= self.mean else 0.0
        return float(stats.norm.cdf((tau - self.mean) / self.std))


@dataclass(frozen=True)
class ClusterTerms:
    """Grandeurs d'un groupe à l'instant t, une valeur par morceau"""
    rho: np.ndarray
    eta: np.ndarray
    d_eta_ambient: np.ndarray
    d_eta_setpoint: np.ndarray

    @property
    def mean_duty(self) -> float:
        return float(np.sum(self.eta * self.rho))

    @property
    def ambient_sensitivity(self) -> float:
        return float(np.sum(self.rho * self.d_eta_ambient))

    @property
    def setpoint_sensitivity(self) -> float:
        return float(np.sum(self.rho * self.d_eta_setpoint))


# === GRANDEURS PERTURBÉES ===

@lru_cache(maxsize=65536)
def _cached_quantities(params: DeviceParams, band: HysteresisBand, ambient: float, beta: float) -> Tuple[float, ...]:
    return tuple(timeline_quantities(params, band, ambient, beta))


def perturbed_quantities(cluster: Cluster, beta: float, ambient: float, setpoint_shift: float = 0.0) -> np.ndarray:
    """Vecteur q du représentant pour une ambiance donnée et une consigne décalée de setpoint_shift"""
    band = cluster.band
    if setpoint_shift != 0.0:
        band = HysteresisBand(band.setpoint + setpoint_shift, band.deadband)
    return np.array(_cached_quantities(cluster.representative, band, float(ambient), float(beta)))


def _derivative(fn: Callable[[float], np.ndarray], h: float) -> np.ndarray:
    """Différence centrée de pas h ; différence décentrée si un côté est infaisable"""
    if h == 0:
        raise ValueError("Le pas des différences finies doit être non nul")
    try:
        plus = fn(h)
    except DomainError:
        plus = None
    try:
        minus = fn(-h)
    except DomainError:
        minus = None
    if plus is not None and minus is not None:
        return (plus - minus) / (2.0 * h)
    center = fn(0.0)
    if plus is not None:
        logger.debug("Point perturbé infaisable côté −h : différence avant")
        return (plus - center) / h
    if minus is not None:
        logger.debug("Point perturbé infaisable côté +h : différence arrière")
        return (center - minus) / h
    raise DomainError(f"Sensibilité non calculable : points perturbés de ±{h} °C infaisables")


def _piece_duties(pieces: Sequence[IntervalPiece], q: np.ndarray, tau: float) -> np.ndarray:
    """η de chaque morceau, τ ramené dans l'intervalle du morceau"""
    return np.array([0.0 if piece.always_off else cluster_duty(*piece.clamped_times(q, tau)) for piece in pieces])


# === PROBABILITÉS D'INTERVALLE ===

def endpoint_distributions(cluster: Cluster, timeline: MigrationTimeline, uncertainty: UncertaintySpec,
                           t: float) -> List[EndpointDistribution]:
    """Lois des bornes intérieures (une par jonction de morceaux) à l'instant t"""
    ambient = uncertainty.ambient_mean(t)
    h = uncertainty.fd_step
    q = perturbed_quantities(cluster, timeline.beta, ambient)
    var_a = uncertainty.ambient_dev.variance
    var_set = uncertainty.setpoint_dev.variance
    dq_a = _derivative(lambda d: perturbed_quantities(cluster, timeline.beta, ambient + d), h) if var_a > 0 \
        else np.zeros_like(q)
    dq_set = _derivative(lambda d: perturbed_quantities(cluster, timeline.beta, ambient, d), h) if var_set > 0 \
        else np.zeros_like(q)

    dists = []
    for piece in timeline.pieces[1:]:
        coeffs = np.asarray(piece.lower_form.coeffs)
        sens_a = float(np.dot(coeffs, dq_a))
        sens_set = float(np.dot(coeffs, dq_set))
        std = math.sqrt(sens_a ** 2 * var_a + sens_set ** 2 * var_set)
        dists.append(EndpointDistribution(piece.lower_form(q), std))
    return dists


def interval_probabilities(timeline: MigrationTimeline, endpoint_dists: Sequence[EndpointDistribution],
                           t: float) -> np.ndarray:
    """
    ρ_ξ(t) = (1 − F_ξ^H(τ))·F_ξ^L(τ), renormalisé à 1.

    endpoint_dists[k] est la loi de la borne entre les morceaux k et k+1.
    """
    if len(endpoint_dists) != len(timeline.pieces) - 1:
        raise ValueError(f"{len(endpoint_dists)} lois de bornes pour {len(timeline.pieces)} morceaux")
    tau = t - timeline.t_s
    cdfs = np.array([dist.cdf(tau) for dist in endpoint_dists])
    lower_cdf = np.concatenate([[1.0], cdfs])
    upper_cdf = np.concatenate([cdfs, [0.0]])
    rho = (1.0 - upper_cdf) * lower_cdf
    total = rho.sum()
    if not total > 0:
        #bornes de lois quasi confondues : on revient au morceau nominal
        rho = np.zeros(len(timeline.pieces))
        rho[timeline.piece_at(t).index] = 1.0
        return rho
    return rho / total


# === SENSIBILITÉS DU RAPPORT CYCLIQUE ===

def duty_sensitivities(cluster: Cluster, timeline: MigrationTimeline, piece: IntervalPiece, t: float,
                       means: Tuple[float, float], h: float = 0.01) -> Tuple[float, float]:
    """
    (∂η/∂θa, ∂η/∂θset) du morceau piece à l'instant t, par différences centrées
    autour de means = (θ̄a, θ̄set) en °C.
    """
    if h == 0:
        raise ValueError("Le pas des différences finies doit être non nul")
    ambient, setpoint = means
    shift = setpoint - cluster.band.setpoint
    tau = t - timeline.t_s

    def duty(d_ambient: float, d_setpoint: float) -> float:
        q = perturbed_quantities(cluster, timeline.beta, ambient + d_ambient, shift + d_setpoint)
        return cluster_duty(*piece.clamped_times(q, tau))

    d_ambient = float(_derivative(lambda d: np.float64(duty(d, 0.0)), h))
    d_setpoint = float(_derivative(lambda d: np.float64(duty(0.0, d)), h))
    return d_ambient, d_setpoint


def cluster_terms(cluster: Cluster, timeline: MigrationTimeline, uncertainty: UncertaintySpec,
                  t: float) -> ClusterTerms:
    """ρ, η et sensibilités de tous les morceaux d'un groupe à l'instant t"""
    ambient = uncertainty.ambient_mean(t)
    tau = t - timeline.t_s
    h = uncertainty.fd_step
    pieces = timeline.pieces

    rho = interval_probabilities(timeline, endpoint_distributions(cluster, timeline, uncertainty, t), t)
    q = perturbed_quantities(cluster, timeline.beta, ambient)
    eta = _piece_duties(pieces, q, tau)

    d_ambient = np.zeros(len(pieces))
    d_setpoint = np.zeros(len(pieces))
    #morceaux de puissance nulle : ni moyenne ni variance
    active = (rho > NEGLIGIBLE_PROBABILITY) & np.array([not piece.always_off for piece in pieces])
    active_pieces = [piece for piece, keep in zip(pieces, active) if keep]
    if uncertainty.ambient_dev.variance > 0:
        d_ambient[active] = _derivative(
            lambda d: _piece_duties(active_pieces, perturbed_quantities(cluster, timeline.beta, ambient + d), tau), h)
    if uncertainty.setpoint_dev.variance > 0:
        d_setpoint[active] = _derivative(
            lambda d: _piece_duties(active_pieces, perturbed_quantities(cluster, timeline.beta, ambient, d), tau), h)
    return ClusterTerms(rho, eta, d_ambient, d_setpoint)


def _check_pairs(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline]):
    if len(clusters) != len(timelines):
        raise ValueError(f"{len(clusters)} groupes mais {len(timelines)} chronologies")


def fleet_terms(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline],
                uncertainty: UncertaintySpec, t: float) -> List[ClusterTerms]:
    _check_pairs(clusters, timelines)
    return [cluster_terms(cluster, timeline, uncertainty, t) for cluster, timeline in zip(clusters, timelines)]


# === PUISSANCE MOYENNE ET CUMULANTS ===

def _mean_from_terms(clusters: Sequence[Cluster], terms: Sequence[ClusterTerms]) -> float:
    total_kw = 0.0
    for cluster, term in zip(clusters, terms):
        total_kw += term.mean_duty * cluster.power_weight
    return UnitManager.kw_to_mw(total_kw)


def _cumulants_from_terms(clusters: Sequence[Cluster], terms: Sequence[ClusterTerms],
                          uncertainty: UncertaintySpec, order: int) -> CumulantSet:
    kappa_a = np.array(uncertainty.ambient_dev.cumulants(order), dtype=float)
    kappa_set = np.array(uncertainty.setpoint_dev.cumulants(order), dtype=float)
    #les écarts sont centrés : κ_1 des entrées forcé à 0
    kappa_a[0] = kappa_set[0] = 0.0

    weights = np.array([UnitManager.kw_to_mw(cluster.power_weight) for cluster in clusters])
    a_terms = weights * np.array([term.ambient_sensitivity for term in terms])
    b_terms = weights * np.array([term.setpoint_sensitivity for term in terms])
    A, B = float(a_terms.sum()), float(b_terms.sum())

    values = np.zeros(order)
    for v in range(1, order + 1):
        if uncertainty.per_cluster_setpoint:
            setpoint_part = float(np.sum(b_terms ** v)) * kappa_set[v - 1]
        else:
            setpoint_part = B ** v * kappa_set[v - 1]
        values[v - 1] = A ** v * kappa_a[v - 1] + setpoint_part
    return CumulantSet.from_array(values)


def mean_aggregate_power(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline],
                         uncertainty: UncertaintySpec, t: float) -> float:
    """P̄(t) = Σ_c (Σ_ξ η_c,ξ(t)·ρ_c,ξ(t))·Σp_c, en MW"""
    return _mean_from_terms(clusters, fleet_terms(clusters, timelines, uncertainty, t))


def deviation_cumulants(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline],
                        uncertainty: UncertaintySpec, t: float, order: Optional[int] = None) -> CumulantSet:
    """κ_1..κ_order de ΔP(t), en MW^v"""
    order = uncertainty.order if order is None else order
    if order < 1:
        raise ValueError(f"Ordre de cumulant invalide ({order})")
    terms = fleet_terms(clusters, timelines, uncertainty, t)
    return _cumulants_from_terms(clusters, terms, uncertainty, order)


def power_distribution(clusters: Sequence[Cluster], timelines: Sequence[MigrationTimeline],
                       uncertainty: UncertaintySpec, t: float) -> PowerDistribution:
    """Loi de P(t) : moyenne, cumulants de ΔP et densité de Gram-Charlier"""
    terms = fleet_terms(clusters, timelines, uncertainty, t)
    mean = _mean_from_terms(clusters, terms)
    cumulants = _cumulants_from_terms(clusters, terms, uncertainty, uncertainty.order)
    distribution = PowerDistribution(mean, cumulants)
    logger.debug(f"t={60.0 * t:.1f} min : {distribution}")
    return distribution
