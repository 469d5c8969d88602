"""
Synthèse de flottes hétérogènes de TCL à partir des lois de paramètres.

Les appareils sont stockés en colonnes (tableaux numpy) pour pouvoir simuler 10⁵ TCL ;
la flotte reste une séquence de couples (DeviceParams, HysteresisBand).
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ...core.exceptions import DomainError
from ..thermal.device import DeviceParams, HysteresisBand, HEAT_RATE_MODES
from ..thermal.thermal_converter import ThermalConverter
from .distributions import ParamDistribution

logger = logging.getLogger(__name__)

MAX_RESAMPLING_TRIES = 100


@dataclass(frozen=True)
class PopulationSpec:
    """Description statistique d'une flotte de TCL"""
    count: int
    C: ParamDistribution = field(default_factory=lambda: ParamDistribution.uniform(1.5, 2.5))
    R: ParamDistribution = field(default_factory=lambda: ParamDistribution.uniform(1.5, 2.5))
    p: ParamDistribution = field(default_factory=lambda: ParamDistribution.uniform(4.0, 7.2))
    setpoint: ParamDistribution = field(default_factory=lambda: ParamDistribution.uniform(18.0, 27.0))
    cop: float = 2.5
    deadband: float = 1.0
    seed: int = 0
    nominal_ambient: float = 32.0
    heat_rate_mode: str = "cop_times_p"

    def validate(self) -> List[str]:
        errors = []
        if not isinstance(self.count, int) or self.count < 0:
            errors.append(f"count doit être un entier positif (reçu {self.count})")
        for name in ("C", "R", "p", "setpoint"):
            errors.extend(f"{name}: {err}" for err in getattr(self, name).validate())
        if not self.cop > 0:
            errors.append("cop doit être strictement positif")
        if not self.deadband > 0:
            errors.append("deadband doit être strictement positif")
        if self.heat_rate_mode not in HEAT_RATE_MODES:
            errors.append(f"heat_rate_mode doit être l'un de {HEAT_RATE_MODES}")
        return errors


class Fleet:
    """
    Flotte de TCL en colonnes. Indexable comme une séquence de (DeviceParams, HysteresisBand).
    """

    def __init__(self, C: np.ndarray, R: np.ndarray, p: np.ndarray, setpoint: np.ndarray,
                 cop: float = 2.5, deadband: float = 1.0, heat_rate_mode: str = "cop_times_p"):
        self.C = np.asarray(C, dtype=float)
        self.R = np.asarray(R, dtype=float)
        self.p = np.asarray(p, dtype=float)
        self.setpoint = np.asarray(setpoint, dtype=float)
        self.cop = float(cop)
        self.deadband = float(deadband)
        self.heat_rate_mode = heat_rate_mode
        sizes = {self.C.size, self.R.size, self.p.size, self.setpoint.size}
        if len(sizes) != 1:
            raise ValueError("Les colonnes de la flotte doivent avoir la même taille")

    @classmethod
    def from_devices(cls, devices: Sequence[Tuple[DeviceParams, HysteresisBand]]) -> "Fleet":
        """Construit une flotte depuis une liste de couples (paramètres, bande)"""
        if not devices:
            return cls(np.empty(0), np.empty(0), np.empty(0), np.empty(0))
        params0, band0 = devices[0]
        return cls(
            C=[d.C for d, _ in devices],
            R=[d.R for d, _ in devices],
            p=[d.p for d, _ in devices],
            setpoint=[b.setpoint for _, b in devices],
            cop=params0.cop,
            deadband=band0.deadband,
            heat_rate_mode=params0.heat_rate_mode,
        )

    @classmethod
    def homogeneous(cls, params: DeviceParams, band: HysteresisBand, count: int) -> "Fleet":
        """count copies identiques d'un appareil"""
        return cls(np.full(count, params.C), np.full(count, params.R), np.full(count, params.p),
                   np.full(count, band.setpoint), params.cop, band.deadband, params.heat_rate_mode)

    # === ACCÈS SÉQUENCE ===

    def __len__(self) -> int:
        return self.C.size

    def __getitem__(self, index: int) -> Tuple[DeviceParams, HysteresisBand]:
        params = DeviceParams(float(self.C[index]), float(self.R[index]), float(self.p[index]),
                              self.cop, self.heat_rate_mode)
        return params, HysteresisBand(float(self.setpoint[index]), self.deadband)

    def __iter__(self) -> Iterator[Tuple[DeviceParams, HysteresisBand]]:
        for index in range(len(self)):
            yield self[index]

    def subset(self, indices: np.ndarray) -> "Fleet":
        return Fleet(self.C[indices], self.R[indices], self.p[indices], self.setpoint[indices],
                     self.cop, self.deadband, self.heat_rate_mode)

    # === GRANDEURS DÉRIVÉES ===

    @property
    def rq(self) -> np.ndarray:
        if self.heat_rate_mode == "p_literal":
            return self.R * self.p
        return self.R * self.cop * self.p

    @property
    def time_constant(self) -> np.ndarray:
        return self.C * self.R

    @property
    def lower(self) -> np.ndarray:
        return self.setpoint - 0.5 * self.deadband

    @property
    def upper(self) -> np.ndarray:
        return self.setpoint + 0.5 * self.deadband

    @property
    def total_power_kw(self) -> float:
        return float(self.p.sum())

    def feasible_mask(self, ambient: float, beta: float = 0.0) -> np.ndarray:
        """Appareils dont les temps de cycle (bande initiale et décalée) sont définis"""
        mask = ThermalConverter.feasible(self.time_constant, self.rq, self.lower, self.upper, ambient)
        if beta > 0:
            mask &= ThermalConverter.feasible(self.time_constant, self.rq, self.lower + beta,
                                              self.upper + beta, ambient)
        return mask

    def cycle_times(self, ambient: float, beta: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
        """Temps ON/OFF (h) de chaque appareil pour la bande décalée de beta"""
        return ThermalConverter.cycle_times(self.time_constant, self.rq, self.lower + beta,
                                            self.upper + beta, ambient)

    def __str__(self) -> str:
        return f"Fleet({len(self)} TCL, puissance installée {self.total_power_kw / 1000.0:.2f} MW)"


def sample_population(spec: PopulationSpec) -> Fleet:
    """
    Tire count appareils indépendants selon les lois du PopulationSpec.

    Un appareil infaisable à l'ambiance nominale (ambiance dans la bande, refroidissement
    insuffisant) est retiré jusqu'à 100 fois ; au-delà, DomainError.
    """
    errors = spec.validate()
    if errors:
        raise ValueError("PopulationSpec invalide: " + "; ".join(errors))

    rng = np.random.default_rng(spec.seed)
    n = spec.count
    columns = {name: getattr(spec, name).sample(rng, n) for name in ("C", "R", "p", "setpoint")}
    fleet = Fleet(columns["C"], columns["R"], columns["p"], columns["setpoint"],
                  spec.cop, spec.deadband, spec.heat_rate_mode)
    if n == 0:
        return fleet

    bad = ~fleet.feasible_mask(spec.nominal_ambient) | ~(fleet.C > 0) | ~(fleet.R > 0) | ~(fleet.p > 0)
    tries = 0
    while np.any(bad):
        tries += 1
        if tries > MAX_RESAMPLING_TRIES:
            raise DomainError(f"{int(bad.sum())} appareils restent infaisables après "
                              f"{MAX_RESAMPLING_TRIES} tirages")
        count_bad = int(bad.sum())
        logger.debug(f"Nouveau tirage de {count_bad} appareils infaisables (essai {tries})")
        for name in ("C", "R", "p", "setpoint"):
            getattr(fleet, name)[bad] = getattr(spec, name).sample(rng, count_bad)
        bad = ~fleet.feasible_mask(spec.nominal_ambient) | ~(fleet.C > 0) | ~(fleet.R > 0) | ~(fleet.p > 0)

    logger.info(f"✅ Flotte tirée : {fleet}")
    return fleet


def allocate_to_buses(loads_mw: Dict[int, float], explicit: Optional[Dict[int, float]] = None) -> Dict[int, float]:
    """
    Parts de la flotte par nœud, normalisées à 1.

    Sans répartition explicite, les TCL sont réparties au prorata de la charge de base.
    """
    weights = explicit if explicit else {bus: load for bus, load in loads_mw.items() if load > 0}
    total = float(sum(weights.values()))
    if total <= 0:
        raise ValueError("Impossible de répartir les TCL : somme des poids nulle")
    return {int(bus): float(w) / total for bus, w in sorted(weights.items()) if w > 0}
