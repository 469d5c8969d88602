"""
Simulation appareil par appareil d'une flotte de TCL (référence Monte Carlo de la
dynamique agrégée).

Au décalage t_s, chaque appareil poursuit sa trajectoire : un appareil en marche
refroidit jusqu'à l'ancienne borne basse θ₋⁰ puis suit la nouvelle bande ; un appareil
à l'arrêt se réchauffe jusqu'à la nouvelle borne haute θ₊⁰+β. Aucune commutation
forcée à t_s.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..core.unit_manager import UnitManager
from ..models.fleet.population import Fleet
from ..models.stochastic.uncertainty import UncertaintySpec
from ..models.thermal.device import DeviceParams, DeviceState, HysteresisBand
from ..models.thermal.thermal_converter import ThermalConverter

logger = logging.getLogger(__name__)

MAX_DT_S = 10.0

Ambient = Union[float, Callable[[float], float]]


@dataclass
class FleetTrace:
    """Puissance agrégée (MW) sur la grille d'enregistrement (heures)"""
    times: np.ndarray
    power_mw: np.ndarray
    seed: object = None
    excluded: int = 0
    states: Optional[np.ndarray] = field(default=None, repr=False)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"time_h": self.times, "power_mw": self.power_mw})


def _ambient_function(ambient: Ambient) -> Callable[[float], float]:
    if callable(ambient):
        return ambient
    value = float(ambient)
    return lambda _t: value


def _initial_phase(rng: np.random.Generator, t_on: np.ndarray, t_off: np.ndarray, time_constant: np.ndarray,
                   rq: np.ndarray, lower: np.ndarray, upper: np.ndarray, ambient: float):
    """Phase uniforme sur le cycle établi : (θ, mode) de chaque appareil"""
    phase = rng.uniform(0.0, t_on + t_off)
    on = phase < t_on
    theta_on = (ambient - rq) + (upper - ambient + rq) * np.exp(-phase / time_constant)
    theta_off = ambient + (lower - ambient) * np.exp(-(phase - t_on) / time_constant)
    return np.where(on, theta_on, theta_off), on.astype(float)


def simulate_fleet(devices: Fleet, ambient: Ambient, t_s: float, beta: float, dt_mc: float = 1.0,
                   horizon: float = 4.0, seed=0, record_dt: float = 1.0 / 60.0,
                   setpoint_shift: Union[float, np.ndarray] = 0.0, ambient_shift: float = 0.0,
                   power_scale: float = 1.0, record_states: bool = False) -> FleetTrace:
    """
    Simule la flotte par pas exacts de dt_mc secondes jusqu'à horizon (h).

    Args:
        ambient: température ambiante (°C) constante ou fonction des heures
        setpoint_shift: écart de consigne commun (scalaire) ou par appareil
        ambient_shift: écart d'ambiance ajouté à la prévision
        power_scale: facteur appliqué à la puissance (flotte sous-échantillonnée)
    """
    if not 0 < dt_mc <= MAX_DT_S:
        raise ValueError(f"Le pas de simulation doit être dans ]0, {MAX_DT_S}] s (reçu {dt_mc})")
    if beta < 0:
        raise ValueError(f"Le décalage de consigne doit être positif (reçu {beta})")
    rng = np.random.default_rng(seed)
    ambient_fn = _ambient_function(ambient)
    ambient0 = ambient_fn(0.0) + ambient_shift

    setpoint = devices.setpoint + setpoint_shift
    lower = setpoint - 0.5 * devices.deadband
    upper = setpoint + 0.5 * devices.deadband
    time_constant, rq = devices.time_constant, devices.rq

    feasible = ThermalConverter.feasible(time_constant, rq, lower, upper, ambient0)
    if beta > 0:
        feasible &= ThermalConverter.feasible(time_constant, rq, lower + beta, upper + beta, ambient0)
    excluded = int((~feasible).sum())
    if excluded:
        logger.warning(f"{excluded} appareils infaisables exclus de la simulation")
    keep = np.flatnonzero(feasible)
    lower, upper = lower[keep], upper[keep]
    time_constant, rq, power_kw = time_constant[keep], rq[keep], devices.p[keep]

    if keep.size:
        t_on, t_off = ThermalConverter.cycle_times(time_constant, rq, lower, upper, ambient0)
        theta, mode = _initial_phase(rng, np.atleast_1d(t_on), np.atleast_1d(t_off), time_constant, rq,
                                     lower, upper, ambient0)
    else:
        theta, mode = np.empty(0), np.empty(0)

    dt_h = UnitManager.seconds_to_hours(dt_mc)
    steps = int(round(horizon / dt_h))
    record_every = max(int(round(record_dt / dt_h)), 1)
    shift_step = int(np.ceil(t_s / dt_h - 1e-9)) if beta > 0 else steps + 1
    decay = np.exp(-dt_h / time_constant)

    lower_now, upper_now = lower.copy(), upper.copy()
    pending = np.zeros(keep.size, dtype=bool)
    times, power, states = [], [], []
    for k in range(steps + 1):
        if k == shift_step:
            #les appareils en marche terminent leur descente vers θ₋⁰
            pending = mode == 1.0
            lower_now = np.where(pending, lower, lower + beta)
            upper_now = upper + beta
        if k % record_every == 0:
            times.append(k * dt_h)
            power.append(UnitManager.kw_to_mw(float(power_kw @ mode)) * power_scale)
            if record_states:
                states.append(mode.copy())
        if k == steps:
            break
        theta = ThermalConverter.exact_step(theta, mode, ambient_fn(k * dt_h) + ambient_shift, rq,
                                            time_constant, dt_h, decay)
        turn_on = theta > upper_now
        turn_off = theta < lower_now
        mode = np.where(turn_on, 1.0, np.where(turn_off, 0.0, mode))
        if pending.any():
            released = pending & turn_off
            lower_now[released] = lower[released] + beta
            pending &= ~released

    return FleetTrace(np.array(times), np.array(power), seed, excluded,
                      np.array(states) if record_states else None)


# === RÉPLICATIONS ===

@dataclass
class ReplicationSet:
    """Puissance agrégée (MW) de chaque réplication : matrice (R, T)"""
    times: np.ndarray
    power_mw: np.ndarray
    ambient_deviations: np.ndarray
    setpoint_deviations: List[np.ndarray]
    excluded: np.ndarray

    @property
    def mean_power(self) -> np.ndarray:
        return self.power_mw.mean(axis=0)

    def to_frame(self) -> pd.DataFrame:
        data = {"time_h": self.times, "mean_power_mw": self.mean_power,
                "std_power_mw": self.power_mw.std(axis=0, ddof=1) if len(self.power_mw) > 1
                else np.zeros_like(self.times)}
        return pd.DataFrame(data)


def replication_rng(seed: int, replication: int) -> np.random.Generator:
    """Flux aléatoire propre à une réplication (indépendant de l'ordre d'exécution)"""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(replication,)))


def _run_replication(args) -> Tuple[FleetTrace, float, np.ndarray]:
    devices, uncertainty, t_s, beta, dt_mc, horizon, record_dt, power_scale, seed, replication, labels = args
    rng = replication_rng(seed, replication)
    ambient_dev = float(uncertainty.ambient_dev.sample(rng, 1)[0])
    if uncertainty.per_cluster_setpoint and labels is not None:
        unique = np.unique(labels)
        draws = uncertainty.setpoint_dev.sample(rng, unique.size)
        setpoint_dev = draws[np.searchsorted(unique, labels)]
    else:
        setpoint_dev = np.full(len(devices), float(uncertainty.setpoint_dev.sample(rng, 1)[0]))
    trace = simulate_fleet(devices, uncertainty.ambient_mean, t_s, beta, dt_mc, horizon, rng, record_dt,
                           setpoint_shift=setpoint_dev, ambient_shift=ambient_dev, power_scale=power_scale)
    return trace, ambient_dev, setpoint_dev


def replicate_fleet(devices: Fleet, uncertainty: UncertaintySpec, t_s: float, beta: float, horizon: float,
                    replications: int, seed: int = 0, dt_mc: float = 1.0, record_dt: float = 1.0 / 60.0,
                    power_scale: float = 1.0, workers: int = 1,
                    cluster_labels: Optional[np.ndarray] = None) -> ReplicationSet:
    """
    Réplications indépendantes de la flotte, chacune avec ses écarts (Δθa, Δθset) tirés.
    Le flux de la réplication r ne dépend que de (seed, r) : exécutions série et
    parallèle identiques.
    """
    if replications < 1:
        raise ValueError(f"Au moins une réplication attendue (reçu {replications})")
    jobs = [(devices, uncertainty, t_s, beta, dt_mc, horizon, record_dt, power_scale, seed, r, cluster_labels)
            for r in range(replications)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_replication, jobs))
    else:
        outputs = [_run_replication(job) for job in jobs]

    traces = [trace for trace, _, _ in outputs]
    logger.info(f"✅ {replications} réplications de flotte simulées ({len(devices)} TCL)")
    return ReplicationSet(
        times=traces[0].times,
        power_mw=np.vstack([trace.power_mw for trace in traces]),
        ambient_deviations=np.array([dev for _, dev, _ in outputs]),
        setpoint_deviations=[dev for _, _, dev in outputs],
        excluded=np.array([trace.excluded for trace in traces]),
    )


def simulated_cycle_times(params: DeviceParams, band: HysteresisBand, ambient: float, dt_s: float = 1.0,
                          cycles: int = 3) -> Tuple[float, float]:
    """
    Durées ON/OFF moyennes (h) mesurées sur des cycles complets d'une trajectoire simulée.
    """
    t_on, t_off = ThermalConverter.steady_cycle_times(params, band, ambient)
    dt_h = UnitManager.seconds_to_hours(dt_s)
    steps = int(np.ceil((cycles + 1.5) * (t_on + t_off) / dt_h))
    start = DeviceState(band.upper, 1)
    _, modes = ThermalConverter.temperature_trajectory(start, lambda _t: ambient, params, band, dt_h, steps)

    switches = np.flatnonzero(np.diff(modes) != 0) + 1
    runs_on, runs_off = [], []
    for begin, end in zip(switches[:-1], switches[1:]):
        (runs_on if modes[begin] == 1 else runs_off).append((end - begin) * dt_h)
    if not runs_on or not runs_off:
        raise ValueError("Trajectoire trop courte pour mesurer un cycle complet")
    return float(np.mean(runs_on)), float(np.mean(runs_off))
