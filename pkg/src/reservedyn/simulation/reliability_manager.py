"""
Indices de fiabilité variables dans le temps (LOLP, EENS, LOLE) et chaîne d'évaluation
complète d'un scénario :

    1. flotte et groupes de TCL
    2. loi de la puissance agrégée P(t)
    3. polynôme MORT de la réserve des TCL
    4. composition hybride par nœud (génération, réserves)
    5. OPF d'effacement minimal pour chaque état du système
    6. indices
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..config.scenario.scenario_loader import Scenario
from ..core.exceptions import ConfigError, NumericalError, ReserveDynError
from ..core.unit_manager import UnitManager
from ..models.dynamics.aggregate import baseline_power, power_trajectory
from ..models.dynamics.timeline import MigrationTimeline, build_timelines
from ..models.fleet.clustering import Cluster, choose_cluster_count, cluster_by_cycle_times
from ..models.fleet.population import Fleet, allocate_to_buses, sample_population
from ..models.grid.network import Network
from ..models.grid.opf import CURTAILMENT_EPSILON, CurtailmentSolver
from ..models.grid.system_states import SharedComponent, SystemStateSet, enumerate_system_states, solve_states
from ..models.multistate.lz_polynomial import LzPolynomial, lz_reduce
from ..models.multistate.reserve_states import (StateGrid, discretize_reserve_states, generation_lz,
                                                hybrid_generation_reserve_lz, hybrid_reserve_lz, ort_lz, scale_lz,
                                                sigma_by_level)
from ..models.stochastic.gram_charlier import PowerDistribution
from ..models.stochastic.propagation import power_distribution

logger = logging.getLogger(__name__)

VARIANTS = ("WoOR", "ORT", "ORT+CR")
STAGE_LABELS = {
    1: "population",
    2: "distribution",
    3: "MORT",
    4: "composition hybride",
    5: "OPF",
    6: "indices",
}


# === INDICES ===

def lolp_at(states: SystemStateSet, bus: Optional[int] = None) -> float:
    """
    Σ_j ρ_j·1(LC_j,i > ε_LC) pour le nœud bus ; sans nœud, probabilité qu'au moins
    un nœud soit effacé.
    """
    if not states.is_solved:
        raise ValueError("États non résolus : appeler solve_states avant lolp_at")
    curtailed = states.curtailment > CURTAILMENT_EPSILON
    if bus is None:
        indicator = curtailed.any(axis=1)
    else:
        indicator = curtailed[:, states.bus_ids.index(bus)]
    return float(np.clip(states.probabilities @ indicator, 0.0, 1.0))


def expected_curtailment(states: SystemStateSet, bus: Optional[int] = None) -> float:
    """Σ_j ρ_j·LC_j,i (MW) ; sans nœud, effacement total"""
    if not states.is_solved:
        raise ValueError("États non résolus : appeler solve_states avant expected_curtailment")
    if bus is None:
        return float(states.probabilities @ states.curtailment.sum(axis=1))
    return float(states.probabilities @ states.curtailment[:, states.bus_ids.index(bus)])


def _steps_to(tau: float, dt: float, length: int) -> int:
    if tau < 0:
        raise ValueError(f"τ doit être positif (reçu {tau})")
    n = int(round(tau / dt))
    if n > length - 1:
        raise ValueError(f"τ = {tau:g} h au-delà de l'horizon ({(length - 1) * dt:g} h)")
    return n


def eens(curtailment_trace: np.ndarray, tau: float, dt: float) -> float:
    """EENS(τ) en MWh : rectangles à gauche Σ_{k<n} E[LC](t_k)·Δt, n = τ/Δt"""
    trace = np.asarray(curtailment_trace, dtype=float)
    n = _steps_to(tau, dt, trace.size)
    return float(trace[:n].sum() * dt)


def lole(lolp_trace: np.ndarray, tau: float, dt: float) -> float:
    """LOLE(τ) en heures : rectangles à gauche de LOLP(t)"""
    trace = np.asarray(lolp_trace, dtype=float)
    n = _steps_to(tau, dt, trace.size)
    return float(trace[:n].sum() * dt)


def _cumulative(trace: np.ndarray, dt: float) -> np.ndarray:
    """Intégrale à gauche cumulée : valeur 0 au premier instant"""
    return np.concatenate([np.zeros((1,) + trace.shape[1:]), np.cumsum(trace[:-1], axis=0) * dt])


@dataclass
class IndexSeries:
    """
    LOLP(t) et effacement attendu E[LC](t) par nœud (colonnes dans l'ordre de bus_ids)
    et pour le système. Les écarts-types d'estimation ne sont renseignés que par la
    référence Monte Carlo.
    """
    times: np.ndarray
    bus_ids: List[int]
    lolp: np.ndarray
    system_lolp: np.ndarray
    expected_curtailment: np.ndarray
    variant: str = "ORT"
    lolp_stderr: Optional[np.ndarray] = None
    system_lolp_stderr: Optional[np.ndarray] = None
    curtailment_stderr: Optional[np.ndarray] = None

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 else 0.0

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def _column(self, values: np.ndarray, system: np.ndarray, bus: Optional[int]) -> np.ndarray:
        return system if bus is None else values[:, self.bus_ids.index(bus)]

    def lolp_trace(self, bus: Optional[int] = None) -> np.ndarray:
        return self._column(self.lolp, self.system_lolp, bus)

    def curtailment_trace(self, bus: Optional[int] = None) -> np.ndarray:
        return self._column(self.expected_curtailment, self.expected_curtailment.sum(axis=1), bus)

    def eens(self, tau: Optional[float] = None, bus: Optional[int] = None) -> float:
        return eens(self.curtailment_trace(bus), self.horizon if tau is None else tau, self.dt)

    def lole(self, tau: Optional[float] = None, bus: Optional[int] = None) -> float:
        return lole(self.lolp_trace(bus), self.horizon if tau is None else tau, self.dt)

    def eens_trace(self, bus: Optional[int] = None) -> np.ndarray:
        return _cumulative(self.curtailment_trace(bus), self.dt)

    def lole_trace(self, bus: Optional[int] = None) -> np.ndarray:
        return _cumulative(self.lolp_trace(bus), self.dt)

    # === TABLEAUX ===

    def _frame(self, per_bus: np.ndarray, system: np.ndarray) -> pd.DataFrame:
        data = {"time_min": UnitManager.hours_to_minutes(self.times)}
        for k, bus in enumerate(self.bus_ids):
            data[f"bus_{bus}"] = per_bus[:, k]
        data["system"] = system
        return pd.DataFrame(data)

    def lolp_frame(self) -> pd.DataFrame:
        frame = self._frame(self.lolp, self.system_lolp)
        if self.system_lolp_stderr is not None:
            frame["system_stderr"] = self.system_lolp_stderr
        return frame

    def eens_frame(self) -> pd.DataFrame:
        per_bus = _cumulative(self.expected_curtailment, self.dt)
        return self._frame(per_bus, self.eens_trace())

    def lole_frame(self) -> pd.DataFrame:
        per_bus = _cumulative(self.lolp, self.dt)
        return self._frame(per_bus, self.lole_trace())

    def summary(self) -> pd.DataFrame:
        """EENS et LOLE sur l'horizon par nœud et pour le système"""
        rows = []
        for bus in list(self.bus_ids) + [None]:
            rows.append({"variant": self.variant, "bus": "system" if bus is None else bus,
                         "eens_mwh": self.eens(bus=bus), "lole_h": self.lole(bus=bus),
                         "lolp_max": float(self.lolp_trace(bus).max())})
        return pd.DataFrame(rows)

    def validate(self) -> List[str]:
        errors = []
        if np.any(self.lolp < 0) or np.any(self.lolp > 1) or np.any(self.system_lolp > 1):
            errors.append("LOLP hors de [0, 1]")
        if np.any(self.expected_curtailment < -1e-9):
            errors.append("effacement attendu négatif")
        return errors


# === CHAÎNE D'ÉVALUATION ===

@dataclass
class ReliabilityResult:
    """Indices d'une variante, tableaux intermédiaires et durées des étapes (s)"""
    indices: IndexSeries
    artifacts: Dict[str, pd.DataFrame] = field(default_factory=dict)
    timings: Dict[str, float] = field(default_factory=dict)


@contextmanager
def _stage(number: int, timings: Dict[str, float]):
    """Chronomètre une étape et préfixe les erreurs métier par son libellé"""
    label = f"étape {number} : {STAGE_LABELS[number]}"
    start = time.perf_counter()
    try:
        yield
    except ReserveDynError as exc:
        message = exc.args[0] if exc.args else ""
        exc.args = (f"[{label}] {message}",) + exc.args[1:]
        exc.stage = label
        raise
    finally:
        timings[label] = time.perf_counter() - start
    logger.info(f"{label} terminée en {timings[label]:.2f} s")


def _solve_time_points(bus_polynomials: Dict[int, LzPolynomial], shared: Sequence[SharedComponent],
                       network: Network, times: np.ndarray, prob_floor: float, state_cap: int,
                       keep: Sequence[int] = ()) -> Tuple[np.ndarray, np.ndarray, np.ndarray, Dict[int, SystemStateSet]]:
    """LOLP par nœud, LOLP système et effacement attendu sur un lot d'instants"""
    solver = CurtailmentSolver(network)
    n = network.bus_count
    lolp = np.zeros((times.size, n))
    system = np.zeros(times.size)
    curtailment = np.zeros((times.size, n))
    kept: Dict[int, SystemStateSet] = {}
    for k, t in enumerate(times):
        states = enumerate_system_states(bus_polynomials, network, float(t), prob_floor, shared, state_cap)
        solve_states(states, network, network.loads_at(float(t)), solver)
        curtailed = states.curtailment > CURTAILMENT_EPSILON
        lolp[k] = states.probabilities @ curtailed
        system[k] = lolp_at(states)
        curtailment[k] = states.probabilities @ states.curtailment
        if k in keep:
            kept[k] = states
    logger.debug(f"{times.size} instants : {solver.lp_count} PL résolus, {solver.certified_count} états certifiés")
    return np.clip(lolp, 0.0, 1.0), system, curtailment, kept


def _solve_chunk(args):
    return _solve_time_points(*args)


class ReliabilityManager:
    """
    Évalue un scénario variante par variante. Les étapes 1 à 3 (flotte, loi de P(t),
    MORT) sont communes à toutes les variantes et calculées une seule fois.
    """

    def __init__(self, scenario: Scenario, workers: Optional[int] = None):
        errors = scenario.validate()
        if errors:
            raise ConfigError("; ".join(errors))
        self.scenario = scenario
        self.network = scenario.network
        self.times = scenario.times
        self.workers = scenario.workers if workers is None else workers
        self.timings: Dict[str, float] = {}

        self.fleet: Optional[Fleet] = None
        self.clusters: List[Cluster] = []
        self.timelines: List[MigrationTimeline] = []
        self.P0 = 0.0
        self.shares: Dict[int, float] = {}
        self.distributions: List[Optional[PowerDistribution]] = []
        self.grid: Optional[StateGrid] = None
        self.mort: Optional[LzPolynomial] = None
        self.artifacts: Dict[str, pd.DataFrame] = {}

    # --- étape 1 ---
    def prepare_fleet(self):
        if self.fleet is not None:
            return
        scenario = self.scenario
        ambient = scenario.nominal_ambient
        self.fleet = sample_population(scenario.population)
        if len(self.fleet) == 0:
            logger.warning("Flotte vide : la réserve des TCL est nulle")
            self.shares = {}
            return
        if scenario.clusters == "auto":
            count = choose_cluster_count(self.fleet, ambient, scenario.max_clusters, scenario.population.seed)
        else:
            count = min(scenario.clusters, len(self.fleet))
        self.clusters = cluster_by_cycle_times(self.fleet, ambient, count, scenario.population.seed)
        self.timelines = build_timelines(self.clusters, scenario.beta, ambient, scenario.t_s)
        self.P0 = baseline_power(self.clusters, self.timelines)

        base_loads = {bus: self.network.buses[bus].load_at(0.0) for bus in self.network.bus_ids}
        self.shares = allocate_to_buses(base_loads, scenario.tcl_buses)
        trajectory = power_trajectory(self.clusters, self.timelines, self.times)
        trajectory.insert(0, "time_min", UnitManager.hours_to_minutes(self.times))
        self.artifacts["aggregate"] = trajectory.drop(columns="time_h")
        logger.info(f"✅ {len(self.clusters)} groupes, P⁰ = {self.P0:.2f} MW")

    # --- étape 2 ---
    def compute_distributions(self):
        if self.distributions:
            return
        scenario = self.scenario
        uncertainty = scenario.uncertainty
        rows = []
        for t in self.times:
            if t < scenario.t_s or not self.clusters:
                self.distributions.append(None)
                continue
            distribution = power_distribution(self.clusters, self.timelines, uncertainty, float(t))
            self.distributions.append(distribution)
            rows.append({"time_min": UnitManager.hours_to_minutes(float(t)), "mean_mw": distribution.mean,
                         "std_mw": distribution.cumulants.std, "reserve_mean_mw": self.P0 - distribution.mean})
        self.artifacts["distribution"] = pd.DataFrame(rows, columns=["time_min", "mean_mw", "std_mw",
                                                                     "reserve_mean_mw"])

    # --- étape 3 ---
    def build_mort(self):
        if self.mort is not None:
            return
        scenario = self.scenario
        table = self.artifacts.get("distribution")
        if self.P0 <= 0 or table is None or table.empty:
            self.grid = discretize_reserve_states(0.0, 0.0)
            self.mort = LzPolynomial.identity()
            return
        sigma = sigma_by_level(table["reserve_mean_mw"].to_numpy(), table["std_mw"].to_numpy())
        self.grid = discretize_reserve_states(self.P0, sigma)
        self.mort = ort_lz(self.grid, self.distributions, self.P0, self.times, scenario.t_s,
                           scenario.standby_failure)
        frame = pd.DataFrame(self.mort.probabilities, columns=[f"rc_{c:.3f}" for c in self.mort.capacities])
        frame.insert(0, "time_min", UnitManager.hours_to_minutes(self.times))
        self.artifacts["mort"] = frame

    # --- étape 4 ---
    def compose(self, variant: str) -> Tuple[Dict[int, LzPolynomial], List[SharedComponent]]:
        scenario = self.scenario
        times = self.times
        generation = scenario.generation_units()
        reserves = scenario.reserve_units() if variant == "ORT+CR" else []
        with_ort = variant != "WoOR" and self.mort is not None and len(self.mort) > 1

        shared: List[SharedComponent] = []
        if with_ort and scenario.ort_mode == "shared":
            shared.append(SharedComponent(self.mort, self.shares, "ORT"))

        bus_polynomials: Dict[int, LzPolynomial] = {}
        for bus in self.network.bus_ids:
            units = [unit for unit in generation if unit.bus == bus]
            conventional = [unit for unit in reserves if unit.bus == bus]
            share = self.shares.get(bus, 0.0) if with_ort and scenario.ort_mode == "per_bus" else 0.0
            if not units and not conventional and share == 0.0:
                continue
            poly = generation_lz(units, times) if units else LzPolynomial.identity().on_grid(times)
            ort = scale_lz(self.mort, share) if share > 0 else LzPolynomial.identity()
            if conventional or share > 0:
                reserve = hybrid_reserve_lz(ort, conventional, times=times)
                poly = hybrid_generation_reserve_lz(poly, reserve)
            bus_polynomials[bus] = lz_reduce(poly, scenario.prob_floor, scenario.max_states)

        rows = {"time_min": UnitManager.hours_to_minutes(times)}
        for bus, poly in bus_polynomials.items():
            rows[f"bus_{bus}"] = poly.expectation()
        for component in shared:
            expectation = component.poly.expectation()
            for bus, share in component.shares.items():
                key = f"bus_{bus}"
                rows[key] = rows.get(key, 0.0) + share * expectation
        self.artifacts[f"capacity_{variant}"] = pd.DataFrame(rows)
        return bus_polynomials, shared

    # --- étape 5 ---
    def solve(self, bus_polynomials: Dict[int, LzPolynomial], shared: Sequence[SharedComponent],
              keep_times: Sequence[float] = ()):
        scenario = self.scenario
        keep = sorted({int(np.argmin(np.abs(self.times - t))) for t in keep_times})
        if self.workers <= 1 or self.times.size < 2 * self.workers:
            return _solve_time_points(bus_polynomials, shared, self.network, self.times, scenario.prob_floor,
                                      scenario.state_cap, keep)

        chunks = np.array_split(np.arange(self.times.size), self.workers)
        jobs = [(bus_polynomials, shared, self.network, self.times[chunk], scenario.prob_floor, scenario.state_cap,
                 [k - chunk[0] for k in keep if chunk[0] <= k <= chunk[-1]]) for chunk in chunks]
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            outputs = list(pool.map(_solve_chunk, jobs))
        kept = {}
        for chunk, (_, _, _, chunk_kept) in zip(chunks, outputs):
            kept.update({int(chunk[0]) + k: states for k, states in chunk_kept.items()})
        return (np.vstack([out[0] for out in outputs]), np.concatenate([out[1] for out in outputs]),
                np.vstack([out[2] for out in outputs]), kept)

    def run(self, variant: str = "ORT") -> ReliabilityResult:
        """Exécute les six étapes pour une variante"""
        if variant not in VARIANTS:
            raise ValueError(f"Variante inconnue '{variant}', attendu l'une de {VARIANTS}")
        scenario = self.scenario
        timings: Dict[str, float] = {}
        logger.info(f"Évaluation du scénario '{scenario.name}', variante {variant}")

        with _stage(1, timings):
            self.prepare_fleet()
        with _stage(2, timings):
            if variant != "WoOR":
                self.compute_distributions()
        with _stage(3, timings):
            if variant != "WoOR":
                self.build_mort()
        with _stage(4, timings):
            bus_polynomials, shared = self.compose(variant)
        with _stage(5, timings):
            keep_times = [UnitManager.minutes_to_hours(t) for t in scenario.states_at_min]
            lolp, system, curtailment, kept = self.solve(bus_polynomials, shared, keep_times)
        with _stage(6, timings):
            indices = IndexSeries(self.times, self.network.bus_ids, lolp, system, curtailment, variant)
            errors = indices.validate()
            if errors:
                raise NumericalError("; ".join(errors))

        artifacts = {name: frame for name, frame in self.artifacts.items()
                     if not name.startswith("capacity_") or name == f"capacity_{variant}"}
        for k, states in kept.items():
            artifacts[f"states_{UnitManager.hours_to_minutes(self.times[k]):g}"] = states.to_frame()
        self.timings.update({f"{variant} {label}": value for label, value in timings.items()})
        logger.info(f"✅ {variant} : EENS = {indices.eens():.5f} MWh, LOLE = {indices.lole():.6f} h")
        return ReliabilityResult(indices, artifacts, timings)


def evaluate_scenario(scenario: Scenario, variant: str = "ORT", workers: Optional[int] = None) -> ReliabilityResult:
    """Indices et tableaux intermédiaires d'une variante du scénario"""
    return ReliabilityManager(scenario, workers).run(variant)


def compare_variants(scenario: Scenario, variants: Sequence[str] = VARIANTS,
                     workers: Optional[int] = None) -> Dict[str, ReliabilityResult]:
    """Toutes les variantes demandées, étapes 1 à 3 partagées"""
    manager = ReliabilityManager(scenario, workers)
    return {variant: manager.run(variant) for variant in variants}
