"""
Énumération des états du système : produit cartésien des états de capacité de chaque
nœud, des composantes partagées entre nœuds (ORT commune) et des états du réseau.
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterator, Mapping, Optional, Sequence

import numpy as np
import pandas as pd

from ...core.exceptions import NumericalError
from ..multistate.lz_polynomial import LzPolynomial
from .network import Network

logger = logging.getLogger(__name__)

DEFAULT_STATE_CAP = 200000
EXPANSION_FACTOR = 20   # taille intermédiaire tolérée avant élagage


@dataclass(frozen=True)
class SharedComponent:
    """Polynôme dont chaque état est réparti sur plusieurs nœuds selon shares (somme 1)"""
    poly: LzPolynomial
    shares: Mapping[int, float]
    label: str = "shared"


@dataclass
class SystemState:
    """AG* par nœud (MW, ordre de bus_ids), état du réseau, probabilité et effacement"""
    available: np.ndarray
    network_state: int
    probability: float
    curtailment: Optional[np.ndarray] = None

    @property
    def total_curtailment(self) -> float:
        return 0.0 if self.curtailment is None else float(self.curtailment.sum())


class SystemStateSet:
    """États du système stockés en colonnes ; indexable comme une séquence de SystemState"""

    def __init__(self, bus_ids: Sequence[int], available: np.ndarray, network_states: np.ndarray,
                 probabilities: np.ndarray):
        self.bus_ids = list(bus_ids)
        self.available = available
        self.network_states = network_states
        self.probabilities = probabilities
        self.curtailment: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return self.probabilities.size

    def __getitem__(self, index: int) -> SystemState:
        curtailment = None if self.curtailment is None else self.curtailment[index]
        return SystemState(self.available[index], int(self.network_states[index]),
                           float(self.probabilities[index]), curtailment)

    def __iter__(self) -> Iterator[SystemState]:
        for index in range(len(self)):
            yield self[index]

    @property
    def is_solved(self) -> bool:
        return self.curtailment is not None

    def expected_available(self) -> np.ndarray:
        return self.probabilities @ self.available

    def to_frame(self):
        """Tableau des états (une colonne AG* et une colonne LC par nœud)"""
        data = {"state": np.arange(len(self)), "probability": self.probabilities,
                "network_state": self.network_states}
        for k, bus in enumerate(self.bus_ids):
            data[f"ag_{bus}"] = self.available[:, k]
        if self.curtailment is not None:
            for k, bus in enumerate(self.bus_ids):
                data[f"lc_{bus}"] = self.curtailment[:, k]
        return pd.DataFrame(data)


def enumerate_system_states(bus_polynomials: Dict[int, LzPolynomial], network: Network, t: float,
                            prob_floor: float = 1e-9, shared: Sequence[SharedComponent] = (),
                            state_cap: int = DEFAULT_STATE_CAP) -> SystemStateSet:
    """
    Produit cartésien (indépendance supposée) des états des nœuds, des composantes
    partagées et des états du réseau à l'instant t. Les états de probabilité < prob_floor
    sont retirés au fil du produit puis la masse est renormalisée.
    """
    ids = network.bus_ids
    n = len(ids)
    position = {b: i for i, b in enumerate(ids)}

    dimensions = []
    for bus in sorted(bus_polynomials):
        if bus not in position:
            raise ValueError(f"Polynôme défini pour le nœud {bus} absent du réseau")
        direction = np.zeros(n)
        direction[position[bus]] = 1.0
        poly = bus_polynomials[bus]
        dimensions.append((f"nœud {bus}", poly.capacities, poly.probabilities_at(t), direction))
    for component in shared:
        direction = np.zeros(n)
        for bus, share in component.shares.items():
            direction[position[bus]] = share
        dimensions.append((component.label, component.poly.capacities, component.poly.probabilities_at(t), direction))

    probabilities = np.ones(1)
    available = np.zeros((1, n))
    for label, capacities, rho, direction in dimensions:
        nonzero = rho > 0
        capacities, rho = capacities[nonzero], rho[nonzero]
        if probabilities.size * rho.size > EXPANSION_FACTOR * state_cap:
            raise NumericalError(f"plus de {state_cap} états du système ({label}) : réduire les polynômes avec "
                                 f"lz_reduce ou augmenter prob_floor", stage="énumération")
        probabilities = (probabilities[:, None] * rho[None, :]).ravel()
        available = (available[:, None, :] + capacities[None, :, None] * direction[None, None, :]).reshape(-1, n)
        if prob_floor > 0:
            keep = probabilities >= prob_floor
            probabilities, available = probabilities[keep], available[keep]
        if probabilities.size > state_cap:
            raise NumericalError(f"{probabilities.size} états du système au-delà de la limite {state_cap} : "
                                 f"réduire les polynômes avec lz_reduce", stage="énumération")

    network_probs = np.array([state.probability for state in network.states()])
    active = np.flatnonzero(network_probs > 0)
    network_index = np.repeat(active[None, :], probabilities.size, axis=0).ravel()
    probabilities = (probabilities[:, None] * network_probs[None, active]).ravel()
    available = np.repeat(available, active.size, axis=0)
    if prob_floor > 0:
        keep = probabilities >= prob_floor
        probabilities, available, network_index = probabilities[keep], available[keep], network_index[keep]

    total = probabilities.sum()
    if not total > 0:
        raise NumericalError("masse de probabilité nulle après élagage", stage="énumération")
    probabilities = probabilities / total
    logger.debug(f"t={60.0 * t:.1f} min : {probabilities.size} états du système (masse élaguée {1.0 - total:.2e})")
    return SystemStateSet(ids, available, network_index, probabilities)


def solve_states(states: SystemStateSet, network: Network, loads: np.ndarray, solver) -> SystemStateSet:
    """Remplit l'effacement de chaque état avec un CurtailmentSolver"""
    states.curtailment = solver.solve_many(states.available, np.asarray(loads, dtype=float), states.network_states)
    return states
