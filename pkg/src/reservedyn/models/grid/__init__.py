"""
Réseau électrique, énumération des états du système et OPF d'effacement minimal
"""

from .components import GridComponent
from .nodes import Bus
from .links import Line
from .network import Network, NetworkState, build_susceptance, BASE_MVA
from .opf import CurtailmentResult, CurtailmentSolver, min_total_curtailment, tie_break_weights, CURTAILMENT_EPSILON
from .system_states import SharedComponent, SystemState, SystemStateSet, enumerate_system_states, solve_states

__all__ = [
    'GridComponent',
    'Bus',
    'Line',
    'Network',
    'NetworkState',
    'build_susceptance',
    'BASE_MVA',
    'CurtailmentResult',
    'CurtailmentSolver',
    'min_total_curtailment',
    'tie_break_weights',
    'CURTAILMENT_EPSILON',
    'SharedComponent',
    'SystemState',
    'SystemStateSet',
    'enumerate_system_states',
    'solve_states',
]
