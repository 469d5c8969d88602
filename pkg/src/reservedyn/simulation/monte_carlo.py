"""
Référence Monte Carlo des indices de fiabilité : tirage des états des éléments, du
réseau et de la puissance des TCL (réplications de la simulation de flotte), même OPF
que la méthode analytique.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy import stats

from ..config.scenario.scenario_loader import Scenario
from ..core.unit_manager import UnitManager
from ..models.grid.opf import CURTAILMENT_EPSILON, CurtailmentSolver
from ..models.multistate.lz_polynomial import LzPolynomial
from .fleet_simulator import ReplicationSet, replicate_fleet
from .reliability_manager import VARIANTS, IndexSeries, ReliabilityManager

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10000
MIN_EMPIRICAL_SAMPLES = 100
RESERVE_RESOLUTION = 0.1   # MW, réserve tirée arrondie vers le bas


# === LOI EMPIRIQUE ===

@dataclass(frozen=True)
class EmpiricalDistribution:
    """Fonction de répartition en escalier d'un échantillon"""
    samples: np.ndarray

    @property
    def size(self) -> int:
        return self.samples.size

    def cdf(self, x):
        """F_n(x) = #{échantillons ≤ x} / n"""
        counts = np.searchsorted(self.samples, np.asarray(x, dtype=float), side="right")
        return counts / self.samples.size

    def ks_distance(self, cdf: Callable) -> float:
        """Statistique de Kolmogorov-Smirnov contre une fonction de répartition"""
        return float(stats.kstest(self.samples, cdf).statistic)

    def ks_critical(self, alpha: float = 0.05) -> float:
        """Seuil asymptotique c(α)/√n (1.36/√n à 95 %)"""
        return float(stats.kstwobign.isf(alpha) / np.sqrt(self.samples.size))


def empirical_distribution(samples) -> EmpiricalDistribution:
    values = np.sort(np.asarray(samples, dtype=float).ravel())
    if values.size < MIN_EMPIRICAL_SAMPLES:
        raise ValueError(f"Au moins {MIN_EMPIRICAL_SAMPLES} échantillons attendus (reçu {values.size})")
    return EmpiricalDistribution(values)


# === TIRAGES ===

def _sample_states(poly: LzPolynomial, t: float, rng: np.random.Generator, size: int) -> np.ndarray:
    """Capacités tirées selon ρ(t) (inversion de la fonction de répartition)"""
    rho = poly.probabilities_at(t)
    cumulative = np.cumsum(rho)
    index = np.searchsorted(cumulative / cumulative[-1], rng.random(size), side="right")
    return poly.capacities[np.minimum(index, len(poly) - 1)]


def fleet_replications(scenario: Scenario, manager: ReliabilityManager,
                       replications: Optional[int] = None, workers: Optional[int] = None) -> ReplicationSet:
    """
    Réplications de la flotte : sous-échantillon de oracle.devices appareils, puissance
    remise à l'échelle de la flotte complète.
    """
    manager.prepare_fleet()
    fleet = manager.fleet
    settings = scenario.oracle
    count = min(settings.devices, len(fleet))
    indices = np.arange(count)
    subset = fleet.subset(indices)
    scale = fleet.total_power_kw / subset.total_power_kw

    labels = np.zeros(len(fleet), dtype=int)
    for c, cluster in enumerate(manager.clusters):
        if cluster.members is not None:
            labels[cluster.members] = c

    return replicate_fleet(subset, scenario.uncertainty, scenario.t_s, scenario.beta, scenario.horizon,
                           replications or settings.replications, settings.seed, settings.dt_s,
                           record_dt=scenario.dt, power_scale=scale,
                           workers=scenario.workers if workers is None else workers,
                           cluster_labels=labels[indices])


def mc_reliability(scenario: Scenario, samples: Optional[int] = None, seed: Optional[int] = None,
                   variant: str = "ORT", manager: Optional[ReliabilityManager] = None,
                   replications: Optional[ReplicationSet] = None) -> IndexSeries:
    """
    Indices estimés par échantillonnage à chaque instant de la grille.

    Pour chaque tirage : états des générateurs et des réserves selon leurs lois à t,
    état du réseau, et réserve des TCL RC = P⁰ − P_r(t) d'une réplication r tirée au
    hasard (nulle avant t_s ou en cas de défaillance en attente).
    """
    if variant not in VARIANTS:
        raise ValueError(f"Variante inconnue '{variant}', attendu l'une de {VARIANTS}")
    samples = scenario.oracle.samples if samples is None else samples
    seed = scenario.oracle.seed if seed is None else seed
    if samples < MIN_SAMPLES:
        raise ValueError(f"Au moins {MIN_SAMPLES} tirages attendus (reçu {samples})")

    manager = manager or ReliabilityManager(scenario)
    network = scenario.network
    times = scenario.times
    bus_ids = network.bus_ids
    position = {bus: i for i, bus in enumerate(bus_ids)}
    n = len(bus_ids)

    units = scenario.generation_units()
    if variant == "ORT+CR":
        units += scenario.reserve_units()
    polys: List[LzPolynomial] = [unit.lz(times) for unit in units]
    columns = [position[unit.bus] for unit in units]

    with_ort = variant != "WoOR"
    share = np.zeros(n)
    trace = None
    if with_ort:
        manager.prepare_fleet()
        if manager.P0 > 0:
            if replications is None:
                replications = fleet_replications(scenario, manager)
            trace = replications.power_mw
            for bus, value in manager.shares.items():
                share[position[bus]] = value
    network_probs = np.array([state.probability for state in network.states()])

    solver = CurtailmentSolver(network)
    lolp = np.zeros((times.size, n))
    lolp_err = np.zeros((times.size, n))
    system = np.zeros(times.size)
    system_err = np.zeros(times.size)
    curtailment = np.zeros((times.size, n))
    curtailment_err = np.zeros((times.size, n))

    for k, t in enumerate(times):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
        available = np.zeros((samples, n))
        for poly, column in zip(polys, columns):
            available[:, column] += _sample_states(poly, float(t), rng, samples)

        if trace is not None and t >= scenario.t_s:
            replica = rng.integers(0, trace.shape[0], samples)
            reserve = np.maximum(manager.P0 - trace[replica, k], 0.0)
            reserve = np.floor(reserve / RESERVE_RESOLUTION) * RESERVE_RESOLUTION
            if scenario.standby_failure > 0:
                reserve[rng.random(samples) < scenario.standby_failure] = 0.0
            available += reserve[:, None] * share[None, :]

        network_states = rng.choice(network_probs.size, size=samples, p=network_probs)
        lc = solver.solve_many(available, network.loads_at(float(t)), network_states)

        curtailed = lc > CURTAILMENT_EPSILON
        lolp[k] = curtailed.mean(axis=0)
        system[k] = curtailed.any(axis=1).mean()
        curtailment[k] = lc.mean(axis=0)
        lolp_err[k] = np.sqrt(lolp[k] * (1.0 - lolp[k]) / samples)
        system_err[k] = np.sqrt(system[k] * (1.0 - system[k]) / samples)
        curtailment_err[k] = lc.std(axis=0, ddof=1) / np.sqrt(samples)
        if k % 30 == 0:
            logger.debug(f"t={UnitManager.hours_to_minutes(float(t)):.0f} min : LOLP système {system[k]:.3e}, "
                         f"{solver.lp_count} PL cumulés")

    logger.info(f"✅ Monte Carlo {variant} : {samples} tirages × {times.size} instants, {solver.lp_count} PL")
    return IndexSeries(times, bus_ids, lolp, system, curtailment, variant,
                       lolp_stderr=lolp_err, system_lolp_stderr=system_err, curtailment_stderr=curtailment_err)


def eens_stderr(series: IndexSeries, bus: Optional[int] = None) -> float:
    """Écart-type d'estimation de l'EENS sur l'horizon (instants tirés indépendamment)"""
    if series.curtailment_stderr is None:
        return 0.0
    errors = series.curtailment_stderr.sum(axis=1) if bus is None \
        else series.curtailment_stderr[:, series.bus_ids.index(bus)]
    return float(np.sqrt(np.sum(errors[:-1] ** 2)) * series.dt)


def relative_errors(analytical: IndexSeries, monte_carlo: IndexSeries) -> List[Dict]:
    """Lignes (index, bus, analytical, monte_carlo, rel_error) pour EENS et LOLE"""
    rows = []
    for bus in list(analytical.bus_ids) + [None]:
        label = "system" if bus is None else bus
        for index, getter in (("EENS", "eens"), ("LOLE", "lole")):
            a = getattr(analytical, getter)(bus=bus)
            m = getattr(monte_carlo, getter)(bus=bus)
            rel = abs(a - m) / abs(m) if m != 0 else (0.0 if a == 0 else float("inf"))
            rows.append({"index": index, "bus": label, "analytical": a, "monte_carlo": m, "rel_error": rel})
    return rows
