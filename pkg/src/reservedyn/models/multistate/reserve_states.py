"""
Discrétisation de la capacité de réserve des TCL (ORT) en états et polynômes Lz
de la réserve, seule ou hybride avec des réserves conventionnelles.

L'état j de capacité RC_j couvre RC ∈ (RC_j − τ_j, RC_j], soit P ∈ [P⁰ − RC_j, P⁰ − RC_j + τ_j),
τ_j étant l'écart au niveau précédent. La masse au-delà du dernier niveau lui est
attribuée, celle des réserves négatives (P > P⁰) va à l'état 0.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np

from .lz_polynomial import LzPolynomial, lz_compose_all, lz_parallel_compose
from .units import ConventionalReserveUnit, MultiStateUnit

logger = logging.getLogger(__name__)

MIN_SPACING_FRACTION = 1.0 / 50.0


@dataclass(frozen=True)
class StateGrid:
    """Niveaux de réserve croissants (MW) et largeur de cellule de chaque niveau"""
    capacities: np.ndarray
    spacings: np.ndarray

    def __len__(self) -> int:
        return self.capacities.size

    @property
    def edges(self) -> np.ndarray:
        """Bornes des cellules en réserve : −τ_0, RC_0 = 0, RC_1, ..., RC_{K−1}"""
        return np.concatenate([[-self.spacings[0]], self.capacities])

    def validate(self):
        errors = []
        if self.capacities.size == 0 or self.capacities[0] != 0.0:
            errors.append("la grille doit commencer à 0 MW")
        if np.any(np.diff(self.capacities) <= 0):
            errors.append("niveaux non strictement croissants")
        if np.any(self.spacings <= 0):
            errors.append("largeurs de cellule non positives")
        return errors

    def __str__(self) -> str:
        return f"StateGrid({len(self)} états, 0..{self.capacities[-1]:.1f} MW)"


def discretize_reserve_states(max_rc: float, sigma_trace: Union[float, Callable[[float], float]]) -> StateGrid:
    """
    Niveaux 0, RC_1, ... : chaque pas vaut l'écart-type de la réserve au niveau courant,
    avec un plancher max_rc/50 ; le dernier niveau est ≥ max_rc.
    """
    if max_rc < 0:
        raise ValueError(f"max_rc doit être positif (reçu {max_rc})")
    sigma = sigma_trace if callable(sigma_trace) else (lambda _level, value=float(sigma_trace): value)
    if max_rc == 0:
        return StateGrid(np.array([0.0]), np.array([1.0]))

    floor = max_rc * MIN_SPACING_FRACTION
    levels, spacings = [0.0], []
    while levels[-1] < max_rc - 1e-9 * max_rc:
        step = max(float(sigma(levels[-1])), floor)
        spacings.append(step)
        levels.append(levels[-1] + step)
    spacings.append(max(float(sigma(levels[-1])), floor))
    grid = StateGrid(np.array(levels), np.array(spacings))
    logger.info(f"Grille de réserve : {grid}")
    return grid


def sigma_by_level(mean_reserve: np.ndarray, std_reserve: np.ndarray) -> Callable[[float], float]:
    """σ de la réserve en fonction du niveau, interpolé depuis les couples (RC moyenne, σ) d'une trajectoire"""
    order = np.argsort(mean_reserve)
    levels = np.asarray(mean_reserve, dtype=float)[order]
    sigmas = np.asarray(std_reserve, dtype=float)[order]
    return lambda level: float(np.interp(level, levels, sigmas))


def ort_state_probabilities(grid: StateGrid, P0: float, cdf: Callable, standby_failure: float = 0.0) -> np.ndarray:
    """
    ρ_j = F(P⁰ − RC_j + τ_j) − F(P⁰ − RC_j), τ_j = RC_j − RC_{j−1} ; P > P⁰ va à
    l'état 0, P < P⁰ − RC_{K−1} au dernier état.

    standby_failure multiplie les probabilités des états non nuls ; la masse retirée
    revient à l'état 0.
    """
    if not 0.0 <= standby_failure <= 1.0:
        raise ValueError(f"standby_failure doit être dans [0, 1] (reçu {standby_failure})")
    power_edges = P0 - grid.edges
    F = np.clip(np.asarray(cdf(power_edges), dtype=float), 0.0, 1.0)
    #F est évaluée sur des puissances décroissantes
    F = np.minimum.accumulate(F)
    rho = F[:-1] - F[1:]
    rho[0] += 1.0 - F[0]
    rho[-1] += F[-1]
    if standby_failure > 0 and rho.size > 1:
        lost = rho[1:].sum() * standby_failure
        rho[1:] *= 1.0 - standby_failure
        rho[0] += lost
    return rho / rho.sum()


def ort_lz(grid: StateGrid, distribution_traces: Sequence, P0: float, times: np.ndarray, t_s: float,
           standby_failure: float = 0.0) -> LzPolynomial:
    """
    Polynôme MORT(t) sur la grille times. distribution_traces[k] est la loi de P(times[k])
    (objet muni d'une méthode cdf) ; avant t_s, toute la masse est sur RC = 0.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if len(distribution_traces) != times.size:
        raise ValueError(f"{len(distribution_traces)} lois pour {times.size} instants")
    rows = np.zeros((times.size, len(grid)))
    for k, (t, distribution) in enumerate(zip(times, distribution_traces)):
        if t < t_s or distribution is None:
            rows[k, 0] = 1.0
        else:
            rows[k] = ort_state_probabilities(grid, P0, distribution.cdf, standby_failure)
    return LzPolynomial(grid.capacities, rows, times, merge=False)


def scale_lz(poly: LzPolynomial, share: float) -> LzPolynomial:
    """Même polynôme dont les capacités sont multipliées par share (part d'un nœud)"""
    if share < 0:
        raise ValueError(f"Part négative ({share})")
    return LzPolynomial(poly.capacities * share, poly.probabilities, poly.times)


def hybrid_reserve_lz(ort: LzPolynomial, conventional: Sequence[MultiStateUnit],
                      deployment_schedule: Optional[Dict[str, float]] = None,
                      times: Optional[np.ndarray] = None) -> LzPolynomial:
    """
    MHOR(t) : composition de l'ORT avec les réserves conventionnelles. Une réserve ne
    contribue qu'à partir de son engagement (deployment_schedule[id] ou commit_time)
    augmenté de son délai.
    """
    if times is None:
        times = ort.times if ort.times is not None else np.array([0.0])
    schedule = deployment_schedule or {}
    result = ort.on_grid(times)
    for unit in conventional:
        if isinstance(unit, ConventionalReserveUnit):
            poly = unit.lz(times, schedule.get(unit.id))
        else:
            poly = unit.lz(times)
        result = lz_parallel_compose(result, poly)
    return result


def hybrid_generation_reserve_lz(generation: LzPolynomial, reserve: LzPolynomial) -> LzPolynomial:
    """MHGR(t) : l'exposant est la génération disponible équivalente AG*"""
    return lz_parallel_compose(generation, reserve)


def generation_lz(units: Sequence[MultiStateUnit], times: np.ndarray) -> LzPolynomial:
    """Composition parallèle des générateurs d'un nœud"""
    return lz_compose_all([unit.lz(times) for unit in units]).on_grid(times)
