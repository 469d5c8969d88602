"""
Densité de Gram-Charlier de type A de l'écart de puissance agrégée ΔP et loi de P(t).

La série est écrite autour de la densité normale standard φ : les coefficients c_k
sont E[He_k(Z)]/k! pour Z = (ΔP − κ_1)/√κ_2, obtenus depuis les moments standardisés.
Les lobes négatifs de la série tronquée sont ramenés à 0 puis la densité est renormalisée.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import hermite_e
from scipy import integrate, stats

from ...core.exceptions import NumericalError

logger = logging.getLogger(__name__)

SUPPORT_WIDTH = 12.0     # demi-largeur du support, en écarts-types
CDF_GRID_POINTS = 4001
QUAD_LIMIT = 200


@dataclass(frozen=True)
class CumulantSet:
    """κ_1..κ_n de ΔP(t) ; κ_v est en MW^v"""
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) >= 2 and self.values[1] < 0:
            if self.values[1] < -1e-12:
                raise ValueError(f"κ_2 négatif ({self.values[1]})")
            object.__setattr__(self, "values", (self.values[0], 0.0, *self.values[2:]))

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "CumulantSet":
        return cls(tuple(float(v) for v in values))

    @classmethod
    def gaussian(cls, mean: float, std: float, order: int = 6) -> "CumulantSet":
        values = [0.0] * order
        values[0] = mean
        if order >= 2:
            values[1] = std ** 2
        return cls(tuple(values))

    @property
    def order(self) -> int:
        return len(self.values)

    def kappa(self, v: int) -> float:
        """κ_v (v à partir de 1), nul au-delà de l'ordre calculé"""
        if v < 1:
            raise ValueError("Les cumulants sont indexés à partir de 1")
        return self.values[v - 1] if v <= self.order else 0.0

    @property
    def mean(self) -> float:
        return self.kappa(1)

    @property
    def variance(self) -> float:
        return self.kappa(2)

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def _moments_from_cumulants(kappas: Sequence[float]) -> np.ndarray:
    """Moments bruts m_0..m_n : m_n = Σ_k C(n−1, k−1)·κ_k·m_{n−k}"""
    n = len(kappas)
    moments = np.zeros(n + 1)
    moments[0] = 1.0
    for order in range(1, n + 1):
        moments[order] = sum(math.comb(order - 1, k - 1) * kappas[k - 1] * moments[order - k]
                             for k in range(1, order + 1))
    return moments


def hermite_coefficients(cumulants: CumulantSet) -> np.ndarray:
    """Coefficients c_0..c_n de la série en He_k pour la variable standardisée"""
    sigma = cumulants.std
    standardized = [0.0, 1.0] + [cumulants.kappa(v) / sigma ** v for v in range(3, cumulants.order + 1)]
    moments = _moments_from_cumulants(standardized[:max(cumulants.order, 2)])
    coefficients = np.zeros(len(moments))
    for k in range(len(moments)):
        unit = np.zeros(k + 1)
        unit[k] = 1.0
        power_coeffs = hermite_e.herme2poly(unit)
        coefficients[k] = float(np.dot(power_coeffs, moments[:k + 1])) / math.factorial(k)
    return coefficients


class GramCharlierDensity:
    """
    Densité de ΔP : f(u) = φ(z)·(1 + Σ c_k He_k(z))⁺ / (σ·N), z = (u − κ_1)/σ.

    Si κ_2 ≤ 0 la loi est dégénérée (masse ponctuelle en κ_1) : is_degenerate vaut True
    et la densité n'est pas définie (renvoie 0).
    """

    def __init__(self, cumulants: CumulantSet):
        self.cumulants = cumulants
        self.location = cumulants.mean
        self.is_degenerate = not cumulants.variance > 0
        if self.is_degenerate:
            self.scale = 0.0
            self.coefficients = np.array([1.0])
            self.normalization = 1.0
            return

        self.scale = cumulants.std
        self.coefficients = hermite_coefficients(cumulants)
        self.is_gaussian = bool(np.all(np.abs(self.coefficients[3:]) < 1e-15))
        if self.is_gaussian:
            self.normalization = 1.0
        else:
            value, abserr = integrate.quad(self._clipped_standard, -SUPPORT_WIDTH, SUPPORT_WIDTH, limit=QUAD_LIMIT)
            if not value > 0:
                raise NumericalError(f"Normalisation de Gram-Charlier nulle ({value})", stage="gram_charlier")
            self.normalization = value
            logger.debug(f"Gram-Charlier : normalisation {value:.6f} (erreur {abserr:.1e})")

    def _clipped_standard(self, z):
        series = hermite_e.hermeval(z, self.coefficients)
        return stats.norm.pdf(z) * np.maximum(series, 0.0)

    def standardized(self, z):
        """Densité de la variable standardisée Z"""
        if self.is_degenerate:
            return np.zeros_like(np.asarray(z, dtype=float))
        if self.is_gaussian:
            return stats.norm.pdf(z)
        return self._clipped_standard(z) / self.normalization

    def __call__(self, u):
        if self.is_degenerate:
            return np.zeros_like(np.asarray(u, dtype=float))
        return self.standardized((np.asarray(u, dtype=float) - self.location) / self.scale) / self.scale

    @property
    def support(self) -> Tuple[float, float]:
        """Intervalle (MW, en écart ΔP) hors duquel la densité est considérée nulle"""
        half = SUPPORT_WIDTH * self.scale
        return self.location - half, self.location + half


def gram_charlier_pdf(cumulants: CumulantSet) -> GramCharlierDensity:
    """Densité tronquée, écrêtée et renormalisée de ΔP"""
    density = GramCharlierDensity(cumulants)
    if density.is_degenerate:
        logger.debug(f"κ_2 = {cumulants.variance} : loi dégénérée en {density.location} MW")
    return density


def aggregate_cdf(mean: float, pdf: Callable, x: float) -> float:
    """
    F_P(x) = ∫_{−∞}^{x} f_ΔP(u − P̄) du par quadrature adaptative, bornée à [0, 1].
    """
    if getattr(pdf, "is_degenerate", False):
        return 1.0 if x >= mean + pdf.location else 0.0
    upper = x - mean
    support = getattr(pdf, "support", None)
    if support is None:
        value = integrate.quad(pdf, -np.inf, upper, limit=QUAD_LIMIT)[0]
    else:
        lower, top = support
        if upper <= lower:
            return 0.0
        if upper >= top:
            return 1.0
        value = integrate.quad(pdf, lower, upper, limit=QUAD_LIMIT)[0]
    return min(max(value, 0.0), 1.0)


@dataclass
class PowerDistribution:
    """Loi de P(t) = P̄(t) + ΔP(t) ; mean en MW"""
    mean: float
    cumulants: CumulantSet
    density: GramCharlierDensity = field(repr=False, default=None)

    def __post_init__(self):
        if self.density is None:
            self.density = gram_charlier_pdf(self.cumulants)

    @property
    def is_degenerate(self) -> bool:
        return self.density.is_degenerate

    @property
    def support(self) -> Tuple[float, float]:
        """Support de P(t) en MW"""
        if self.is_degenerate:
            point = self.mean + self.density.location
            return point, point
        lower, upper = self.density.support
        return self.mean + lower, self.mean + upper

    def pdf(self, x):
        return self.density(np.asarray(x, dtype=float) - self.mean)

    @cached_property
    def _cdf_table(self) -> Tuple[np.ndarray, np.ndarray]:
        lower, upper = self.support
        grid = np.linspace(lower, upper, CDF_GRID_POINTS)
        cumulative = integrate.cumulative_trapezoid(self.pdf(grid), grid, initial=0.0)
        if not cumulative[-1] > 0:
            raise NumericalError("CDF tabulée nulle sur tout le support", stage="gram_charlier")
        return grid, cumulative / cumulative[-1]

    def cdf(self, x):
        """CDF tabulée puis interpolée (croissante, de 0 à 1)"""
        if self.is_degenerate:
            return np.where(np.asarray(x, dtype=float) >= self.support[0], 1.0, 0.0)
        grid, values = self._cdf_table
        return np.interp(x, grid, values, left=0.0, right=1.0)

    def exact_cdf(self, x: float) -> float:
        """Même CDF par quadrature adaptative (référence de la version tabulée)"""
        return aggregate_cdf(self.mean, self.density, x)

    def table(self, step: float = 0.1) -> pd.DataFrame:
        """Échantillons (x_mw, pdf, cdf) sur une grille de pas step MW"""
        lower, upper = self.support
        start = math.floor(lower / step) * step
        stop = math.ceil(upper / step) * step
        x = np.arange(start, stop + 0.5 * step, step) if stop > start else np.array([start])
        return pd.DataFrame({"x_mw": x, "pdf": self.pdf(x), "cdf": self.cdf(x)})

    def __str__(self) -> str:
        return (f"PowerDistribution(moyenne {self.mean:.3f} MW, écart-type "
                f"{self.cumulants.std:.3f} MW, ordre {self.cumulants.order})")
