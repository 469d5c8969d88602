"""
Réseau électrique : nœuds, lignes, nœud de référence et états du réseau
(masques de disponibilité des lignes avec leur probabilité).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from ...core.exceptions import ConfigError
from .links import Line
from .nodes import Bus

logger = logging.getLogger(__name__)

BASE_MVA = 100.0


@dataclass(frozen=True)
class NetworkState:
    """Masque de disponibilité des lignes (dans l'ordre du réseau) et probabilité ρ_jL"""
    available: Tuple[bool, ...]
    probability: float


class Network:
    """
    Classe représentant un réseau composé de nœuds et de lignes.
    """

    def __init__(self, name: str = "network", reference_bus: Optional[int] = None, base_mva: float = BASE_MVA):
        self.name = name
        self.buses: Dict[int, Bus] = {}
        self.lines: List[Line] = []
        self.reference_bus = reference_bus
        self.base_mva = float(base_mva)
        self.network_states: List[NetworkState] = []

    def add_bus(self, bus: Bus):
        if bus.index in self.buses:
            raise ValueError(f"Nœud d'indice {bus.index} existe déjà dans le réseau.")
        self.buses[bus.index] = bus

    def add_line(self, line: Line):
        if any(existing.id == line.id for existing in self.lines):
            raise ValueError(f"Ligne avec ID '{line.id}' existe déjà dans le réseau.")
        if line.from_bus not in self.buses or line.to_bus not in self.buses:
            raise ValueError("Les nœuds de début et de fin de la ligne doivent exister dans le réseau.")
        self.lines.append(line)

    def set_network_states(self, states: Sequence[NetworkState]):
        self.network_states = list(states)

    # === ACCÈS ===

    @property
    def bus_ids(self) -> List[int]:
        """Indices des nœuds, triés (ordre des vecteurs de l'OPF)"""
        return sorted(self.buses)

    @property
    def bus_count(self) -> int:
        return len(self.buses)

    def position(self, bus: int) -> int:
        return self.bus_ids.index(bus)

    def states(self) -> List[NetworkState]:
        """États du réseau ; par défaut un seul état, toutes lignes disponibles"""
        if self.network_states:
            return self.network_states
        return [NetworkState(tuple(True for _ in self.lines), 1.0)]

    def line_mask(self, network_state: int = 0) -> np.ndarray:
        state = self.states()[network_state]
        mask = np.array(state.available, dtype=bool)
        if mask.size != len(self.lines):
            raise ConfigError(f"masque de {mask.size} lignes pour un réseau de {len(self.lines)} lignes",
                              field="network_states")
        return mask & np.array([line.is_active for line in self.lines], dtype=bool)

    def loads_at(self, t: float) -> np.ndarray:
        """Vecteur D̄(t) (MW) dans l'ordre de bus_ids"""
        return np.array([self.buses[b].load_at(t) for b in self.bus_ids])

    def total_load(self, t: float = 0.0) -> float:
        return float(self.loads_at(t).sum())

    # === CONNEXITÉ ===

    def components(self, network_state: int = 0) -> List[List[int]]:
        """Composantes connexes (listes d'indices de nœuds) pour un état du réseau"""
        ids = self.bus_ids
        position = {b: i for i, b in enumerate(ids)}
        mask = self.line_mask(network_state)
        rows = [position[line.from_bus] for line, ok in zip(self.lines, mask) if ok]
        cols = [position[line.to_bus] for line, ok in zip(self.lines, mask) if ok]
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(ids), len(ids)))
        count, labels = connected_components(graph, directed=False)
        return [[ids[i] for i in np.flatnonzero(labels == c)] for c in range(count)]

    def check_connected(self, network_state: int = 0):
        components = self.components(network_state)
        if len(components) > 1:
            main = next(c for c in components if self.reference_bus in c) if self.reference_bus in self.buses \
                else components[0]
            isolated = sorted(b for c in components if c is not main for b in c)
            raise ConfigError(f"réseau non connexe dans l'état {network_state} : nœuds {isolated} "
                              f"isolés du nœud de référence {self.reference_bus}", field="lines")

    # === VALIDATION ===

    def validate(self) -> List[str]:
        errors = []
        if not self.buses:
            errors.append("le réseau ne contient aucun nœud")
        if self.reference_bus not in self.buses:
            errors.append(f"nœud de référence {self.reference_bus} absent du réseau")
        for bus in self.buses.values():
            bus_errors = bus.validate()
            if bus_errors:
                errors.append(f"Erreurs dans le nœud '{bus.id}': " + "; ".join(bus_errors))
        for line in self.lines:
            line_errors = line.validate()
            if line_errors:
                errors.append(f"Erreurs dans la ligne '{line.id}': " + "; ".join(line_errors))
        states = self.states()
        total = sum(state.probability for state in states)
        if abs(total - 1.0) > 1e-9:
            errors.append(f"les probabilités des états du réseau somment à {total}")
        if not errors:
            for index, state in enumerate(states):
                if state.probability <= 0:
                    continue
                try:
                    self.check_connected(index)
                except ConfigError as exc:
                    errors.append(str(exc))
        return errors

    def to_dict(self) -> Dict:
        data = {
            "name": self.name,
            "reference_bus": self.reference_bus,
            "base_mva": self.base_mva,
            "buses": [self.buses[b].to_dict() for b in self.bus_ids],
            "lines": [line.to_dict() for line in self.lines],
        }
        if self.network_states:
            data["network_states"] = [{"available": list(s.available), "probability": s.probability}
                                      for s in self.network_states]
        return data

    def __str__(self) -> str:
        return (f"Network('{self.name}', {self.bus_count} nœuds, {len(self.lines)} lignes, "
                f"charge {self.total_load():.1f} MW, référence {self.reference_bus})")


def build_susceptance(network: Network, network_state: int = 0) -> np.ndarray:
    """
    Matrice B (p.u.) complète : B_ik = −1/x_ik, B_ii = Σ_k 1/x_ik sur les lignes disponibles.
    Le nœud de référence est traité par l'OPF (angle fixé à 0).
    """
    network.check_connected(network_state)
    ids = network.bus_ids
    position = {b: i for i, b in enumerate(ids)}
    B = np.zeros((len(ids), len(ids)))
    for line, available in zip(network.lines, network.line_mask(network_state)):
        if not available:
            continue
        i, k = position[line.from_bus], position[line.to_bus]
        b = line.susceptance
        B[i, i] += b
        B[k, k] += b
        B[i, k] -= b
        B[k, i] -= b
    return B
