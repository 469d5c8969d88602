"""
Modèle thermique hybride d'une TCL et temps de cycle en forme fermée.

Toutes les fonctions sont pures. Les temps sont en heures, les températures en °C.
"""

import math
from typing import Callable, Tuple, Union

import numpy as np

from ...core.exceptions import DomainError
from .device import DeviceParams, DeviceState, HysteresisBand

ArrayLike = Union[float, np.ndarray]


class ThermalConverter:
    """
    Regroupe les relations du modèle thermique du premier ordre :
    pas de temps exact, règle de commutation et temps ON/OFF en régime établi.
    """

    # === MODÈLE HYBRIDE ===

    @staticmethod
    def temperature_step(state: DeviceState, ambient: float, params: DeviceParams, dt: float) -> DeviceState:
        """
        Solution exacte de l'équation différentielle sur dt à mode constant :
        θ' = (θa − m·R·Q) + (θ − θa + m·R·Q)·exp(−dt/(C·R))

        R·Q suit heat_rate_mode, comme les temps de cycle.
        """
        if not dt > 0:
            raise ValueError(f"Le pas de temps doit être strictement positif (reçu {dt})")
        theta = ThermalConverter.exact_step(state.theta, state.mode, ambient, params.rq,
                                            params.time_constant, dt)
        return DeviceState(theta=float(theta), mode=state.mode)

    @staticmethod
    def exact_step(theta: ArrayLike, mode: ArrayLike, ambient: ArrayLike, rq: ArrayLike,
                   time_constant: ArrayLike, dt: float, decay: ArrayLike = None) -> ArrayLike:
        """
        Version vectorisée du pas exact (utilisée par la simulation de flotte).
        decay = exp(−dt/(C·R)) peut être précalculé quand dt est fixe.
        """
        if decay is None:
            decay = np.exp(-dt / time_constant)
        equilibrium = ambient - mode * rq
        return equilibrium + (theta - equilibrium) * decay

    @staticmethod
    def mode_update(theta: float, prev_mode: int, band: HysteresisBand) -> int:
        """Commutation : ON au-dessus de la borne haute, OFF sous la borne basse, sinon mémoire"""
        if theta > band.upper:
            return 1
        if theta < band.lower:
            return 0
        return prev_mode

    @staticmethod
    def heat_rate(params: DeviceParams, mode: int) -> float:
        """Terme R·Q (°C) effectivement appliqué, nul en mode OFF"""
        return mode * params.rq

    @staticmethod
    def temperature_trajectory(state: DeviceState, ambient_fn: Callable[[float], float], params: DeviceParams,
                               band: HysteresisBand, dt: float, steps: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Intègre le modèle hybride par pas exacts, avec commutation après chaque pas.

        Returns:
            (thetas, modes) de longueur steps + 1, état initial compris
        """
        if steps < 0:
            raise ValueError("Le nombre de pas doit être positif")
        thetas = np.empty(steps + 1)
        modes = np.empty(steps + 1, dtype=int)
        thetas[0], modes[0] = state.theta, state.mode
        current = state
        for k in range(1, steps + 1):
            current = ThermalConverter.temperature_step(current, ambient_fn((k - 1) * dt), params, dt)
            current = DeviceState(current.theta, ThermalConverter.mode_update(current.theta, current.mode, band))
            thetas[k], modes[k] = current.theta, current.mode
        return thetas, modes

    # === TEMPS DE CYCLE EN FORME FERMÉE ===

    @staticmethod
    def cycle_times(time_constant: ArrayLike, rq: ArrayLike, lower: ArrayLike, upper: ArrayLike,
                    ambient: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
        """
        Temps ON/OFF en régime établi pour une bande [lower, upper] (scalaires ou tableaux).

        Lève DomainError si l'ambiance est dans la bande ou si l'appareil ne peut pas
        atteindre la borne basse.
        """
        on_den = rq + lower - ambient
        off_num = ambient - lower
        off_den = ambient - upper
        if np.any(np.asarray(off_den) <= 0):
            raise DomainError("Température ambiante dans la bande d'hystérésis (ou au-dessous)")
        if np.any(np.asarray(on_den) <= 0):
            raise DomainError("Refroidissement insuffisant : R·Q ≤ θa − θ₋")
        t_on = time_constant * np.log((rq + upper - ambient) / on_den)
        t_off = time_constant * np.log(off_num / off_den)
        if np.ndim(t_on) == 0:
            return float(t_on), float(t_off)
        return t_on, t_off

    @staticmethod
    def feasible(time_constant: ArrayLike, rq: ArrayLike, lower: ArrayLike, upper: ArrayLike,
                 ambient: ArrayLike) -> np.ndarray:
        """Masque des points de fonctionnement pour lesquels cycle_times est défini"""
        return (np.asarray(ambient - upper) > 0) & (np.asarray(rq + lower - ambient) > 0)

    @staticmethod
    def steady_cycle_times(params: DeviceParams, band: HysteresisBand, ambient: float) -> Tuple[float, float]:
        """(T_on⁰, T_off⁰) en heures pour la bande initiale"""
        return ThermalConverter.cycle_times(params.time_constant, params.rq, band.lower, band.upper, ambient)

    @staticmethod
    def shifted_cycle_times(params: DeviceParams, band: HysteresisBand, ambient: float,
                            beta: float) -> Tuple[float, float]:
        """
        (T_on_new, T_off_new) en heures pour la bande décalée de beta.

        beta = 0 est accepté comme cas identité : on retrouve steady_cycle_times.
        Un beta négatif est rejeté (ValueError).
        """
        if beta < 0:
            raise ValueError(f"Le décalage de consigne doit être positif ou nul (reçu {beta})")
        if not ambient > band.upper + beta:
            raise DomainError(f"θa={ambient} °C ≤ θ₊+β={band.upper + beta} °C : migration infaisable")
        return ThermalConverter.steady_cycle_times(params, band.shifted(beta), ambient)

    @staticmethod
    def migration_delay(params: DeviceParams, band: HysteresisBand, ambient: float, beta: float) -> float:
        """
        Durée OFF supplémentaire ΔT_off pour passer de θ₊⁰ à θ₊⁰+β :
        ΔT_off = C·R·ln((θa − θ₊⁰)/(θa − θ₊⁰ − β))

        beta = 0 est le cas identité (délai nul) ; un beta négatif est rejeté.
        """
        if beta < 0:
            raise ValueError(f"Le décalage de consigne doit être positif ou nul (reçu {beta})")
        margin = ambient - band.upper - beta
        if not margin > 0 or not ambient - band.upper > 0:
            raise DomainError(f"θa − θ₊⁰ − β = {margin} ≤ 0 : délai de migration non défini")
        return params.time_constant * math.log((ambient - band.upper) / margin)
