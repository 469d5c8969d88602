#Description des incertitudes sur la température ambiante et sur la consigne

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from ..fleet.distributions import ParamDistribution


@dataclass(frozen=True)
class UncertaintySpec:
    """
    Incertitudes propagées vers la puissance agrégée.

    ambient_trace : points (heure, °C) de la prévision d'ambiance, interpolés linéairement
    ambient_dev   : loi de Δθa (centrée)
    setpoint_dev  : loi de Δθset (centrée, commune à tous les groupes sauf per_cluster_setpoint)
    order         : ordre n des cumulants (pair, entre 2 et 8)
    fd_step       : pas des différences finies (°C)
    """
    ambient_trace: Tuple[Tuple[float, float], ...] = ((0.0, 32.0),)
    ambient_dev: ParamDistribution = field(default_factory=lambda: ParamDistribution.normal(0.0, 1.0))
    setpoint_dev: ParamDistribution = field(default_factory=lambda: ParamDistribution.normal(0.0, 0.5))
    order: int = 6
    per_cluster_setpoint: bool = False
    fd_step: float = 0.01

    @classmethod
    def deterministic(cls, ambient: float = 32.0, order: int = 6) -> "UncertaintySpec":
        """Incertitudes nulles : la propagation redonne exactement la dynamique déterministe"""
        return cls(ambient_trace=((0.0, ambient),), ambient_dev=ParamDistribution.constant(0.0),
                   setpoint_dev=ParamDistribution.constant(0.0), order=order)

    @classmethod
    def constant_ambient(cls, ambient: float, **kwargs) -> "UncertaintySpec":
        return cls(ambient_trace=((0.0, ambient),), **kwargs)

    def ambient_mean(self, t: float) -> float:
        """θ̄a(t) en °C"""
        times = np.array([point[0] for point in self.ambient_trace])
        values = np.array([point[1] for point in self.ambient_trace])
        return float(np.interp(t, times, values))

    @property
    def is_deterministic(self) -> bool:
        return self.ambient_dev.variance == 0.0 and self.setpoint_dev.variance == 0.0

    def input_cumulants(self) -> Tuple[np.ndarray, np.ndarray]:
        """Cumulants (κ_1..κ_n) de Δθa et de Δθset"""
        return input_cumulants(self.ambient_dev, self.order), input_cumulants(self.setpoint_dev, self.order)

    def validate(self) -> List[str]:
        errors = []
        if not self.ambient_trace:
            errors.append("la prévision d'ambiance est vide")
        times = [point[0] for point in self.ambient_trace]
        if any(b <= a for a, b in zip(times, times[1:])):
            errors.append("les instants de la prévision d'ambiance doivent être croissants")
        for name in ("ambient_dev", "setpoint_dev"):
            dist = getattr(self, name)
            errors.extend(f"{name}: {err}" for err in dist.validate())
            if abs(dist.mean) > 1e-12:
                errors.append(f"{name} doit être centrée (moyenne {dist.mean})")
        if self.order < 2 or self.order > 8 or self.order % 2:
            errors.append(f"l'ordre des cumulants doit être pair entre 2 et 8 (reçu {self.order})")
        if not self.fd_step > 0:
            errors.append("fd_step doit être strictement positif")
        return errors


def input_cumulants(distribution: ParamDistribution, order: int) -> np.ndarray:
    """κ_1..κ_order d'une loi normale, uniforme ou constante"""
    return distribution.cumulants(order)
