#Lois de probabilité des paramètres de flotte et des écarts (ambiance, consigne)

from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

DISTRIBUTION_KINDS = ("uniform", "normal", "constant")


@dataclass(frozen=True)
class ParamDistribution:
    """
    Loi d'un paramètre : uniform(low, high), normal(mean, std) ou constant(value).
    Pour une constante, low = high = value.
    """
    kind: str
    a: float
    b: float = 0.0

    @classmethod
    def uniform(cls, low: float, high: float) -> "ParamDistribution":
        return cls("uniform", float(low), float(high))

    @classmethod
    def normal(cls, mean: float, std: float) -> "ParamDistribution":
        return cls("normal", float(mean), float(std))

    @classmethod
    def constant(cls, value: float) -> "ParamDistribution":
        return cls("constant", float(value), float(value))

    @classmethod
    def from_dict(cls, data: Any) -> "ParamDistribution":
        """Construit la loi depuis sa forme JSON (un nombre seul est une constante)"""
        if isinstance(data, (int, float)):
            return cls.constant(data)
        kind = data.get("dist")
        if kind == "uniform":
            return cls.uniform(data["low"], data["high"])
        if kind == "normal":
            return cls.normal(data["mean"], data["std"])
        if kind == "constant":
            return cls.constant(data["value"])
        raise ValueError(f"Loi inconnue '{kind}', attendu l'une de {DISTRIBUTION_KINDS}")

    def to_dict(self) -> Dict[str, Any]:
        if self.kind == "uniform":
            return {"dist": "uniform", "low": self.a, "high": self.b}
        if self.kind == "normal":
            return {"dist": "normal", "mean": self.a, "std": self.b}
        return {"dist": "constant", "value": self.a}

    def validate(self) -> List[str]:
        errors = []
        if self.kind not in DISTRIBUTION_KINDS:
            errors.append(f"type de loi '{self.kind}' inconnu")
        if self.kind == "uniform" and self.a > self.b:
            errors.append(f"borne basse {self.a} > borne haute {self.b}")
        if self.kind == "normal" and self.b < 0:
            errors.append(f"écart-type négatif ({self.b})")
        return errors

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind == "uniform":
            return rng.uniform(self.a, self.b, size)
        if self.kind == "normal":
            return rng.normal(self.a, self.b, size)
        return np.full(size, self.a)

    @property
    def mean(self) -> float:
        if self.kind == "uniform":
            return 0.5 * (self.a + self.b)
        return self.a

    @property
    def variance(self) -> float:
        if self.kind == "uniform":
            return (self.b - self.a) ** 2 / 12.0
        if self.kind == "normal":
            return self.b ** 2
        return 0.0

    def cumulants(self, order: int) -> np.ndarray:
        """
        Cumulants κ_1..κ_order.

        normal : κ_1 = μ, κ_2 = σ², les autres nuls ;
        uniform : cumulants centrés de U(−h, h) (κ_2 = h²/3, κ_4 = −2h⁴/15, κ_6 = 16h⁶/63,
        κ_8 = −16h⁸/15), décalés de la moyenne pour κ_1.
        """
        kappas = np.zeros(order)
        if order >= 1:
            kappas[0] = self.mean
        if self.kind == "normal" and order >= 2:
            kappas[1] = self.b ** 2
        elif self.kind == "uniform":
            h = 0.5 * (self.b - self.a)
            #κ_2n de U(−h, h) = B_2n·(2h)^2n / (2n), B = nombres de Bernoulli
            even_terms = {2: h ** 2 / 3.0, 4: -2.0 * h ** 4 / 15.0, 6: 16.0 * h ** 6 / 63.0,
                          8: -16.0 * h ** 8 / 15.0}
            for v, value in even_terms.items():
                if v <= order:
                    kappas[v - 1] = value
        return kappas

    def __str__(self) -> str:
        if self.kind == "uniform":
            return f"U({self.a}, {self.b})"
        if self.kind == "normal":
            return f"N({self.a}, {self.b})"
        return f"{self.a}"
