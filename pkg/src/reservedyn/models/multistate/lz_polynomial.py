"""
Polynômes Lz : Σ_j ρ_j(t)·z^{g_j} pour un élément multi-états à probabilités variables.

Les capacités g_j (MW) sont distinctes et triées. Les probabilités sont échantillonnées
sur une grille de temps (heures) ; un polynôme sans grille (times = None) a des
probabilités constantes et se compose avec n'importe quelle grille.
"""

import logging
from typing import List, Optional, Sequence, Union

import numpy as np

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9
CAPACITY_DECIMALS = 9   # capacités égales à 1e-9 MW près fusionnées


class LzPolynomial:
    """
    capacities    : (K,) MW, croissantes
    probabilities : (T, K), chaque ligne somme à 1 ; T = 1 si times est None
    times         : (T,) heures ou None
    """

    def __init__(self, capacities, probabilities, times=None, merge: bool = True):
        capacities = np.atleast_1d(np.asarray(capacities, dtype=float))
        probabilities = np.atleast_2d(np.asarray(probabilities, dtype=float))
        if probabilities.shape[1] != capacities.size:
            raise ValueError(f"{capacities.size} capacités pour {probabilities.shape[1]} colonnes de probabilités")
        if times is not None:
            times = np.atleast_1d(np.asarray(times, dtype=float))
            if times.size != probabilities.shape[0]:
                raise ValueError(f"{times.size} instants pour {probabilities.shape[0]} lignes de probabilités")
        elif probabilities.shape[0] != 1:
            raise ValueError("Un polynôme sans grille de temps n'a qu'une ligne de probabilités")

        if merge:
            capacities, probabilities = _merge_equal(capacities, probabilities)
        self.capacities = capacities
        self.probabilities = probabilities
        self.times = times

    # === CONSTRUCTEURS ===

    @classmethod
    def constant(cls, capacities: Sequence[float], probabilities: Sequence[float]) -> "LzPolynomial":
        return cls(capacities, [probabilities])

    @classmethod
    def identity(cls) -> "LzPolynomial":
        """1·z⁰, élément neutre de la composition parallèle"""
        return cls([0.0], [[1.0]], merge=False)

    @classmethod
    def deterministic(cls, capacity: float) -> "LzPolynomial":
        return cls([capacity], [[1.0]], merge=False)

    # === ACCÈS ===

    def __len__(self) -> int:
        return self.capacities.size

    @property
    def is_constant(self) -> bool:
        return self.times is None

    def probabilities_at(self, t: float) -> np.ndarray:
        """Vecteur ρ(t), interpolé linéairement entre les points de la grille"""
        if self.times is None:
            return self.probabilities[0].copy()
        if self.times.size == 1:
            return self.probabilities[0].copy()
        index = int(np.searchsorted(self.times, t, side="right")) - 1
        if index < 0:
            return self.probabilities[0].copy()
        if index >= self.times.size - 1:
            return self.probabilities[-1].copy()
        t0, t1 = self.times[index], self.times[index + 1]
        weight = (t - t0) / (t1 - t0)
        if weight == 0.0:
            return self.probabilities[index].copy()
        return (1.0 - weight) * self.probabilities[index] + weight * self.probabilities[index + 1]

    def at(self, t: float) -> "LzPolynomial":
        """Polynôme figé à l'instant t"""
        return LzPolynomial(self.capacities, [self.probabilities_at(t)], merge=False)

    def on_grid(self, times: np.ndarray) -> "LzPolynomial":
        """Même polynôme échantillonné sur une autre grille"""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        if self.times is not None and np.array_equal(self.times, times):
            return self
        rows = np.array([self.probabilities_at(t) for t in times])
        return LzPolynomial(self.capacities, rows, times, merge=False)

    def expectation(self, t: Optional[float] = None) -> Union[float, np.ndarray]:
        """Capacité moyenne (MW) ; sans t, une valeur par instant de la grille"""
        if t is None:
            values = self.probabilities @ self.capacities
            return float(values[0]) if self.is_constant else values
        return float(self.probabilities_at(t) @ self.capacities)

    def variance(self, t: Optional[float] = None) -> Union[float, np.ndarray]:
        if t is None:
            mean = self.probabilities @ self.capacities
            values = self.probabilities @ self.capacities ** 2 - mean ** 2
            values = np.maximum(values, 0.0)
            return float(values[0]) if self.is_constant else values
        rho = self.probabilities_at(t)
        mean = rho @ self.capacities
        return max(float(rho @ self.capacities ** 2 - mean ** 2), 0.0)

    def states_at(self, t: float) -> List[tuple]:
        """Couples (capacité MW, probabilité) à l'instant t"""
        return list(zip(self.capacities.tolist(), self.probabilities_at(t).tolist()))

    # === VALIDATION ===

    def validate(self) -> List[str]:
        errors = []
        if np.any(np.diff(self.capacities) <= 0):
            errors.append("les capacités doivent être distinctes et croissantes")
        if np.any(self.probabilities < -NORMALIZATION_TOLERANCE):
            errors.append("probabilité négative")
        sums = self.probabilities.sum(axis=1)
        worst = float(np.max(np.abs(sums - 1.0))) if sums.size else 0.0
        if worst > NORMALIZATION_TOLERANCE:
            errors.append(f"probabilités non normalisées (écart {worst:.2e})")
        return errors

    def __str__(self) -> str:
        rho = self.probabilities[0]
        terms = " + ".join(f"{p:.4g}·z^{c:g}" for c, p in zip(self.capacities, rho))
        suffix = "" if self.is_constant else f" (t={self.times[0]:g} h, {self.times.size} instants)"
        return f"Lz[{terms}]{suffix}"


def _merge_equal(capacities: np.ndarray, probabilities: np.ndarray):
    """Fusion des capacités égales (probabilités additionnées) et tri croissant"""
    keys = np.round(capacities, CAPACITY_DECIMALS)
    unique, inverse = np.unique(keys, return_inverse=True)
    if unique.size == keys.size and np.all(np.diff(keys) > 0):
        return capacities, probabilities
    merged = np.zeros((unique.size, probabilities.shape[0]))
    np.add.at(merged, inverse, probabilities.T)
    return unique, merged.T


def _common_grid(a: LzPolynomial, b: LzPolynomial):
    """Ramène deux polynômes sur la même grille de temps"""
    if a.times is None and b.times is None:
        return None, a.probabilities, b.probabilities
    if a.times is None:
        return b.times, np.broadcast_to(a.probabilities, (b.times.size, len(a))), b.probabilities
    if b.times is None:
        return a.times, a.probabilities, np.broadcast_to(b.probabilities, (a.times.size, len(b)))
    if not np.array_equal(a.times, b.times):
        raise ValueError("Composition de polynômes Lz définis sur des grilles de temps différentes")
    return a.times, a.probabilities, b.probabilities


def lz_parallel_compose(a: LzPolynomial, b: LzPolynomial) -> LzPolynomial:
    """
    Composition parallèle : capacités additionnées, probabilités multipliées pour
    chaque couple d'états, capacités égales fusionnées.
    """
    times, pa, pb = _common_grid(a, b)
    capacities = (a.capacities[:, None] + b.capacities[None, :]).ravel()
    probabilities = (pa[:, :, None] * pb[:, None, :]).reshape(pa.shape[0], -1)
    return LzPolynomial(capacities, probabilities, times)


def lz_compose_all(polynomials: Sequence[LzPolynomial]) -> LzPolynomial:
    """Composition parallèle d'une suite de polynômes (identité si vide)"""
    result = LzPolynomial.identity()
    for poly in polynomials:
        result = lz_parallel_compose(result, poly)
    return result


def lz_reduce(poly: LzPolynomial, prob_floor: float = 1e-9, max_states: int = 5000) -> LzPolynomial:
    """
    Fusionne les capacités égales, retire les états de probabilité < prob_floor à tous
    les instants puis renormalise ; au-delà de max_states, fusionne les voisins les plus
    proches (capacité pondérée par la probabilité moyenne).
    """
    if not 0.0 <= prob_floor <= 1e-4:
        raise ValueError(f"prob_floor doit être dans [0, 1e-4] (reçu {prob_floor})")
    if max_states < 1:
        raise ValueError(f"max_states doit être ≥ 1 (reçu {max_states})")

    capacities, probabilities = _merge_equal(poly.capacities, poly.probabilities)
    if capacities.size <= 1:
        return LzPolynomial(capacities, probabilities, poly.times, merge=False)

    keep = probabilities.max(axis=0) >= prob_floor
    if not np.any(keep):
        keep[np.argmax(probabilities.max(axis=0))] = True
    dropped = int((~keep).sum())
    capacities, probabilities = capacities[keep], probabilities[:, keep]
    probabilities = probabilities / probabilities.sum(axis=1, keepdims=True)

    capacities = capacities.copy()
    probabilities = probabilities.copy()
    merges = 0
    while capacities.size > max_states:
        j = int(np.argmin(np.diff(capacities)))
        weights = probabilities[:, j:j + 2].mean(axis=0)
        total = weights.sum()
        merged_capacity = (capacities[j:j + 2] @ weights) / total if total > 0 else capacities[j:j + 2].mean()
        capacities[j] = merged_capacity
        probabilities[:, j] += probabilities[:, j + 1]
        capacities = np.delete(capacities, j + 1)
        probabilities = np.delete(probabilities, j + 1, axis=1)
        merges += 1

    if dropped or merges:
        logger.debug(f"Réduction Lz : {dropped} états négligeables retirés, {merges} fusions de voisins")
    return LzPolynomial(capacities, probabilities, poly.times, merge=False)
