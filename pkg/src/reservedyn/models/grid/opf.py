"""
OPF en courant continu minimisant l'effacement total de charge d'un état du système.

Variables x = [p (n), LC (n), θ (n)] dans l'ordre des nœuds triés :
    min Σ_i w_i·LC_i,  w_i = 1 + i·1e-6
    base·Bθ − p − LC = −D̄               (bilan nodal, D = D̄ − LC)
    |base·(θ_i − θ_k)/x_ik| ≤ F_ik^max   (limites de transit)
    0 ≤ p_i ≤ AG*_i,  0 ≤ LC_i ≤ D̄_i,  θ_ref = 0
Résolution par le simplexe dual de HiGHS (solution de sommet exacte).
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np
from scipy.optimize import linprog

from ...core.exceptions import NumericalError
from .network import Network, build_susceptance

logger = logging.getLogger(__name__)

LP_METHOD = "highs-ds"
LP_MAX_ITER = 100000
TIE_BREAK_EPSILON = 1e-6
CURTAILMENT_EPSILON = 1e-6   # MW, seuil de positivité de LC
CERTIFICATE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CurtailmentResult:
    """Effacement par nœud (MW, ordre de bus_ids), production et transits de la solution"""
    curtailment: np.ndarray
    dispatch: np.ndarray
    flows: np.ndarray

    @property
    def total(self) -> float:
        return float(self.curtailment.sum())


def tie_break_weights(n: int) -> np.ndarray:
    return 1.0 + TIE_BREAK_EPSILON * np.arange(n)


class _LinearProgram:
    """Matrices du programme linéaire pour un état du réseau (indépendantes de AG* et D̄)"""

    def __init__(self, network: Network, network_state: int):
        ids = network.bus_ids
        n = len(ids)
        position = {b: i for i, b in enumerate(ids)}
        base = network.base_mva
        B = build_susceptance(network, network_state)

        self.n = n
        self.c = np.concatenate([np.zeros(n), tie_break_weights(n), np.zeros(n)])
        self.A_eq = np.hstack([-np.eye(n), -np.eye(n), base * B])

        rows, limits = [], []
        self.flow_rows = []
        for line, available in zip(network.lines, network.line_mask(network_state)):
            if not available:
                continue
            row = np.zeros(3 * n)
            i, k = position[line.from_bus], position[line.to_bus]
            row[2 * n + i] = base / line.x_pu
            row[2 * n + k] = -base / line.x_pu
            rows.extend([row, -row])
            limits.extend([line.limit_mw, line.limit_mw])
            self.flow_rows.append(row)
        self.A_ub = np.array(rows) if rows else None
        self.b_ub = np.array(limits) if rows else None
        self.flow_matrix = np.array(self.flow_rows) if self.flow_rows else np.zeros((0, 3 * n))
        self.reference = position[network.reference_bus]


def _solve(program: _LinearProgram, available: np.ndarray, loads: np.ndarray,
           state_id: Optional[int] = None) -> CurtailmentResult:
    n = program.n
    bounds = [(0.0, float(a)) for a in available]
    bounds += [(0.0, float(d)) for d in loads]
    bounds += [(0.0, 0.0) if i == program.reference else (None, None) for i in range(n)]
    result = linprog(program.c, A_ub=program.A_ub, b_ub=program.b_ub, A_eq=program.A_eq, b_eq=-loads,
                     bounds=bounds, method=LP_METHOD, options={"maxiter": LP_MAX_ITER})
    if result.status == 2:
        raise NumericalError("programme linéaire infaisable (erreur interne : l'effacement total est toujours "
                             "admissible)", stage="opf", state_id=state_id)
    if result.status != 0:
        raise NumericalError(f"échec du programme linéaire : {result.message}", stage="opf", state_id=state_id)
    x = result.x
    curtailment = np.clip(x[n:2 * n], 0.0, loads)
    curtailment[curtailment < CURTAILMENT_EPSILON] = 0.0
    flows = program.flow_matrix @ x if program.flow_rows else np.zeros(0)
    return CurtailmentResult(curtailment, x[:n].copy(), flows)


def min_total_curtailment(available: np.ndarray, network: Network, loads: np.ndarray, network_state: int = 0,
                          state_id: Optional[int] = None) -> CurtailmentResult:
    """
    Effacement minimal pour un état : available = AG* par nœud (MW), loads = D̄ (MW),
    tous deux dans l'ordre de network.bus_ids.
    """
    available = np.asarray(available, dtype=float)
    loads = np.asarray(loads, dtype=float)
    if np.any(available < 0) or np.any(loads < 0):
        raise ValueError("AG* et les charges doivent être positifs")
    program = _LinearProgram(network, network_state)
    return _solve(program, available, loads, state_id)


class CurtailmentSolver:
    """
    OPF avec cache et certificats d'effacement nul.

    Un état résolu sans effacement fournit son dispatch p* : tout état dont AG* ≥ p*
    nœud par nœud (même charge, même état du réseau) est aussi sans effacement.
    """

    def __init__(self, network: Network):
        self.network = network
        self._programs: Dict[int, _LinearProgram] = {}
        self._cache: Dict[tuple, np.ndarray] = {}
        self._certificates: Dict[tuple, List[np.ndarray]] = {}
        self.lp_count = 0
        self.certified_count = 0

    def _program(self, network_state: int) -> _LinearProgram:
        if network_state not in self._programs:
            self._programs[network_state] = _LinearProgram(self.network, network_state)
        return self._programs[network_state]

    def _certified(self, key: tuple, available: np.ndarray, loads: np.ndarray) -> bool:
        if np.all(available >= loads):
            return True
        certificates = self._certificates.get(key)
        if not certificates:
            return False
        return bool(np.any(np.all(available[None, :] >= np.array(certificates) - CERTIFICATE_TOLERANCE, axis=1)))

    def solve(self, available: np.ndarray, loads: np.ndarray, network_state: int = 0,
              state_id: Optional[int] = None) -> np.ndarray:
        """Effacement par nœud (MW)"""
        available = np.asarray(available, dtype=float)
        loads = np.asarray(loads, dtype=float)
        load_key = (network_state, tuple(np.round(loads, 9)))
        if self._certified(load_key, available, loads):
            self.certified_count += 1
            return np.zeros_like(loads)
        key = load_key + (tuple(np.round(available, 9)),)
        if key in self._cache:
            return self._cache[key]
        result = _solve(self._program(network_state), available, loads, state_id)
        self.lp_count += 1
        if result.total == 0.0:
            self._certificates.setdefault(load_key, []).append(np.minimum(result.dispatch, available))
        self._cache[key] = result.curtailment
        return result.curtailment

    def solve_many(self, available: np.ndarray, loads: np.ndarray, network_states: np.ndarray) -> np.ndarray:
        """
        Effacement de N états (available : (N, n)). Les états couverts par un certificat
        sont traités en bloc ; les autres sont résolus dans l'ordre d'indice.
        """
        count = available.shape[0]
        curtailment = np.zeros_like(available)
        pending = np.ones(count, dtype=bool)
        for network_state in np.unique(network_states):
            in_state = network_states == network_state
            load_key = (int(network_state), tuple(np.round(loads, 9)))
            pending[in_state & np.all(available >= loads[None, :], axis=1)] = False
            for certificate in self._certificates.get(load_key, []):
                pending[in_state & np.all(available >= certificate - CERTIFICATE_TOLERANCE, axis=1)] = False
            while True:
                candidates = np.flatnonzero(pending & in_state)
                if candidates.size == 0:
                    break
                index = int(candidates[0])
                before = len(self._certificates.get(load_key, []))
                curtailment[index] = self.solve(available[index], loads, int(network_state), state_id=index)
                pending[index] = False
                certificates = self._certificates.get(load_key, [])
                if len(certificates) > before:
                    covered = np.all(available >= certificates[-1] - CERTIFICATE_TOLERANCE, axis=1)
                    pending[in_state & covered] = False
        return curtailment
