#Classes qui définissent les paramètres thermiques d'une TCL, sa bande d'hystérésis et son état

from dataclasses import dataclass, replace
from typing import List

#lecture de R·Q dans les formules des temps de cycle :
#- cop_times_p : R·COP·p (cohérent avec le modèle hybride)
#- p_literal   : R·p, lecture littérale des formules imprimées
HEAT_RATE_MODES = ("cop_times_p", "p_literal")


@dataclass(frozen=True)
class DeviceParams:
    """
    Paramètres physiques d'une TCL (climatiseur en mode refroidissement).

    Unités : C en kWh/°C, R en °C/kW, p en kW, cop sans dimension.
    """
    C: float
    R: float
    p: float
    cop: float = 2.5
    heat_rate_mode: str = "cop_times_p"

    def __post_init__(self):
        errors = self.validate()
        if errors:
            raise ValueError("Paramètres de TCL invalides: " + "; ".join(errors))

    @property
    def Q(self) -> float:
        """Puissance frigorifique extraite (kW), Q = COP·p"""
        return self.cop * self.p

    @property
    def rq(self) -> float:
        """Terme R·Q (°C) utilisé dans les temps de cycle, selon heat_rate_mode"""
        if self.heat_rate_mode == "p_literal":
            return self.R * self.p
        return self.R * self.Q

    @property
    def time_constant(self) -> float:
        """Constante de temps C·R (h)"""
        return self.C * self.R

    def validate(self) -> List[str]:
        errors = []
        for name in ("C", "R", "p", "cop"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not value > 0:
                errors.append(f"{name} doit être un nombre strictement positif (reçu {value})")
        if self.heat_rate_mode not in HEAT_RATE_MODES:
            errors.append(f"heat_rate_mode doit être l'un de {HEAT_RATE_MODES}")
        return errors

    def __str__(self) -> str:
        return f"DeviceParams(C={self.C} kWh/°C, R={self.R} °C/kW, p={self.p} kW, cop={self.cop})"


@dataclass(frozen=True)
class HysteresisBand:
    """
    Bande d'hystérésis [lower, upper] centrée sur la consigne.
    """
    setpoint: float
    deadband: float

    def __post_init__(self):
        if not self.deadband > 0:
            raise ValueError(f"La bande morte doit être strictement positive (reçu {self.deadband})")

    @property
    def lower(self) -> float:
        return self.setpoint - 0.5 * self.deadband

    @property
    def upper(self) -> float:
        return self.setpoint + 0.5 * self.deadband

    def shifted(self, beta: float) -> "HysteresisBand":
        """Bande décalée de beta (°C), même largeur"""
        return replace(self, setpoint=self.setpoint + beta)

    def __str__(self) -> str:
        return f"HysteresisBand([{self.lower:.3f}, {self.upper:.3f}] °C)"


@dataclass(frozen=True)
class DeviceState:
    """État instantané d'une TCL : température intérieure (°C) et mode (1 = ON, 0 = OFF)"""
    theta: float
    mode: int

    def __post_init__(self):
        if self.mode not in (0, 1):
            raise ValueError(f"Le mode doit valoir 0 ou 1 (reçu {self.mode})")
