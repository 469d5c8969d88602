"""
Éléments multi-états du système : générateurs à deux états (chaîne de Markov),
tables d'états fixes, fermes éoliennes et réserves conventionnelles avec délai.
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .lz_polynomial import LzPolynomial, lz_reduce

logger = logging.getLogger(__name__)


class UnitKind(Enum):
    """Nature d'un élément multi-états"""
    ORT = "ORT"
    CONVENTIONAL_RESERVE = "conventional_reserve"
    GENERATOR = "generator"
    WIND_FARM = "wind_farm"


def unit_availability(failure_rate: float, repair_rate: float, t, initial_state: int = 1):
    """
    Probabilité d'être disponible à t (h) pour une chaîne à deux états.

    Depuis l'état disponible : A(t) = μ/(λ+μ) + λ/(λ+μ)·exp(−(λ+μ)t) ;
    depuis l'état en panne : A(t) = μ/(λ+μ)·(1 − exp(−(λ+μ)t)).
    λ = μ = 0 : l'élément reste dans son état initial.
    """
    if failure_rate < 0 or repair_rate < 0:
        raise ValueError(f"Taux négatifs interdits (λ={failure_rate}, μ={repair_rate})")
    if initial_state not in (0, 1):
        raise ValueError(f"État initial 0 ou 1 attendu (reçu {initial_state})")
    t = np.maximum(np.asarray(t, dtype=float), 0.0)
    total = failure_rate + repair_rate
    if total == 0:
        result = np.full_like(t, float(initial_state))
    else:
        steady = repair_rate / total
        decay = np.exp(-total * t)
        if initial_state == 1:
            result = steady + (failure_rate / total) * decay
        else:
            result = steady * (1.0 - decay)
    return float(result) if result.ndim == 0 else result


class MultiStateUnit(ABC):
    """
    Classe de base abstraite des éléments multi-états.

    Chaque élément fournit son polynôme Lz sur une grille de temps (heures).
    """

    def __init__(self, unit_id: str, kind: UnitKind, bus: Optional[int] = None):
        if not unit_id or not isinstance(unit_id, str):
            raise ValueError("L'ID de l'élément doit être une chaîne non vide")
        self.id = unit_id.strip()
        if not self.id:
            raise ValueError("L'ID de l'élément ne peut pas être vide")
        self.kind = kind
        self.bus = bus

    @abstractmethod
    def lz(self, times: np.ndarray) -> LzPolynomial:
        """Polynôme Lz de l'élément sur la grille times"""

    @property
    @abstractmethod
    def max_capacity(self) -> float:
        """Capacité maximale (MW)"""

    def validate(self) -> List[str]:
        errors = []
        if not self.id:
            errors.append("ID de l'élément manquant")
        if self.bus is not None and (not isinstance(self.bus, int) or self.bus < 0):
            errors.append(f"nœud invalide ({self.bus})")
        return errors

    def __str__(self) -> str:
        return f"{self.__class__.__name__}(id='{self.id}', nœud={self.bus}, {self.max_capacity:g} MW)"


#élément à table d'états fixe---------------------------------------------------------------------------------
class TableUnit(MultiStateUnit):
    """Élément décrit par une liste explicite (capacité, probabilité) constante dans le temps"""

    def __init__(self, unit_id: str, capacities: Sequence[float], probabilities: Sequence[float],
                 bus: Optional[int] = None, kind: UnitKind = UnitKind.GENERATOR):
        super().__init__(unit_id, kind, bus)
        self.capacities = [float(c) for c in capacities]
        self.probabilities = [float(p) for p in probabilities]

    @property
    def max_capacity(self) -> float:
        return max(self.capacities) if self.capacities else 0.0

    def validate(self) -> List[str]:
        errors = super().validate()
        if len(self.capacities) != len(self.probabilities):
            errors.append("autant de capacités que de probabilités attendues")
        if any(c < 0 for c in self.capacities):
            errors.append("capacité négative")
        if any(p < 0 for p in self.probabilities):
            errors.append("probabilité négative")
        if abs(sum(self.probabilities) - 1.0) > 1e-9:
            errors.append(f"les probabilités somment à {sum(self.probabilities)}")
        return errors

    def lz(self, times: np.ndarray) -> LzPolynomial:
        return LzPolynomial.constant(self.capacities, self.probabilities)


#générateur à deux états---------------------------------------------------------------------------------
class TwoStateUnit(MultiStateUnit):
    """
    Générateur disponible (capacity) ou en panne (0), transitoire de Markov depuis start_time.
    """

    def __init__(self, unit_id: str, capacity: float, failure_rate: float, repair_rate: float,
                 initial_state: int = 1, bus: Optional[int] = None, kind: UnitKind = UnitKind.GENERATOR,
                 start_time: float = 0.0):
        super().__init__(unit_id, kind, bus)
        self.capacity = float(capacity)
        self.failure_rate = float(failure_rate)
        self.repair_rate = float(repair_rate)
        self.initial_state = int(initial_state)
        self.start_time = float(start_time)

    @property
    def max_capacity(self) -> float:
        return self.capacity

    def validate(self) -> List[str]:
        errors = super().validate()
        if self.capacity < 0:
            errors.append("la capacité doit être positive")
        if self.failure_rate < 0 or self.repair_rate < 0:
            errors.append("les taux de panne et de réparation doivent être positifs")
        if self.initial_state not in (0, 1):
            errors.append("l'état initial doit être 0 ou 1")
        return errors

    def availability(self, times: np.ndarray) -> np.ndarray:
        return np.atleast_1d(unit_availability(self.failure_rate, self.repair_rate,
                                               np.asarray(times, dtype=float) - self.start_time,
                                               self.initial_state))

    def lz(self, times: np.ndarray) -> LzPolynomial:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        available = self.availability(times)
        return LzPolynomial([0.0, self.capacity], np.column_stack([1.0 - available, available]), times)


#réserve conventionnelle engagée avec délai---------------------------------------------------------------------------------
class ConventionalReserveUnit(TwoStateUnit):
    """
    Réserve conventionnelle : 1·z⁰ avant commit_time + lead_time (h), puis élément à
    deux états démarrant disponible à cet instant.
    """

    def __init__(self, unit_id: str, capacity: float, failure_rate: float, repair_rate: float,
                 commit_time: Optional[float] = None, lead_time: float = 0.0, bus: Optional[int] = None):
        super().__init__(unit_id, capacity, failure_rate, repair_rate, initial_state=1, bus=bus,
                         kind=UnitKind.CONVENTIONAL_RESERVE)
        self.commit_time = commit_time
        self.lead_time = float(lead_time)

    def delivery_time(self, commit_time: Optional[float] = None) -> float:
        """Instant (h) à partir duquel la capacité est livrée ; +∞ si jamais engagée"""
        commit = self.commit_time if commit_time is None else commit_time
        return np.inf if commit is None else commit + self.lead_time

    def validate(self) -> List[str]:
        errors = super().validate()
        if self.lead_time < 0:
            errors.append("le délai de mobilisation doit être positif")
        return errors

    def lz(self, times: np.ndarray, commit_time: Optional[float] = None) -> LzPolynomial:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        delivery = self.delivery_time(commit_time)
        delivered = times >= delivery
        available = np.zeros_like(times)
        if np.any(delivered):
            available[delivered] = np.atleast_1d(unit_availability(self.failure_rate, self.repair_rate,
                                                                   times[delivered] - delivery, 1))
        return LzPolynomial([0.0, self.capacity], np.column_stack([1.0 - available, available]), times)


#ferme éolienne---------------------------------------------------------------------------------
class WindFarmUnit(MultiStateUnit):
    """
    N éoliennes identiques : courbe de puissance (démarrage, nominale, coupure en km/h,
    rampe linéaire), table d'états de vent et disponibilité à deux états par éolienne
    (nombre d'éoliennes disponibles binomial).
    """

    def __init__(self, unit_id: str, turbines: int, rated_mw: float, cut_in: float, rated_speed: float,
                 cut_out: float, wind_states: Sequence[Tuple[float, float]], failure_rate: float = 0.0,
                 repair_rate: float = 0.0, bus: Optional[int] = None, prob_floor: float = 1e-9):
        super().__init__(unit_id, UnitKind.WIND_FARM, bus)
        self.turbines = int(turbines)
        self.rated_mw = float(rated_mw)
        self.cut_in = float(cut_in)
        self.rated_speed = float(rated_speed)
        self.cut_out = float(cut_out)
        self.wind_states = [(float(v), float(p)) for v, p in wind_states]
        self.failure_rate = float(failure_rate)
        self.repair_rate = float(repair_rate)
        self.prob_floor = prob_floor

    @property
    def max_capacity(self) -> float:
        return self.turbines * self.rated_mw

    def turbine_output(self, speed: float) -> float:
        """Puissance d'une éolienne (MW) pour une vitesse de vent (km/h)"""
        if speed < self.cut_in or speed >= self.cut_out:
            return 0.0
        if speed >= self.rated_speed:
            return self.rated_mw
        return self.rated_mw * (speed - self.cut_in) / (self.rated_speed - self.cut_in)

    def validate(self) -> List[str]:
        errors = super().validate()
        if self.turbines < 1:
            errors.append("au moins une éolienne attendue")
        if not self.cut_in < self.rated_speed < self.cut_out:
            errors.append("vitesses attendues : démarrage < nominale < coupure")
        if abs(sum(p for _, p in self.wind_states) - 1.0) > 1e-9:
            errors.append("les probabilités des états de vent doivent sommer à 1")
        if self.failure_rate < 0 or self.repair_rate < 0:
            errors.append("les taux de panne et de réparation doivent être positifs")
        return errors

    def lz(self, times: np.ndarray) -> LzPolynomial:
        times = np.atleast_1d(np.asarray(times, dtype=float))
        available = np.atleast_1d(unit_availability(self.failure_rate, self.repair_rate, times, 1))
        counts = np.arange(self.turbines + 1)
        #(T, N+1) : loi binomiale du nombre d'éoliennes disponibles
        count_probs = stats.binom.pmf(counts[None, :], self.turbines, available[:, None])

        capacities, columns = [], []
        for speed, weight in self.wind_states:
            capacities.append(counts * self.turbine_output(speed))
            columns.append(weight * count_probs)
        poly = LzPolynomial(np.concatenate(capacities), np.concatenate(columns, axis=1), times)
        return lz_reduce(poly, self.prob_floor, max_states=max(len(poly), 1))
