"""
Algèbre Lz des éléments multi-états et états de réserve des TCL
"""

from .lz_polynomial import LzPolynomial, lz_parallel_compose, lz_compose_all, lz_reduce
from .units import (
    UnitKind,
    MultiStateUnit,
    TableUnit,
    TwoStateUnit,
    ConventionalReserveUnit,
    WindFarmUnit,
    unit_availability,
)
from .reserve_states import (
    StateGrid,
    discretize_reserve_states,
    sigma_by_level,
    ort_state_probabilities,
    ort_lz,
    scale_lz,
    hybrid_reserve_lz,
    hybrid_generation_reserve_lz,
    generation_lz,
)

__all__ = [
    'LzPolynomial',
    'lz_parallel_compose',
    'lz_compose_all',
    'lz_reduce',
    'UnitKind',
    'MultiStateUnit',
    'TableUnit',
    'TwoStateUnit',
    'ConventionalReserveUnit',
    'WindFarmUnit',
    'unit_availability',
    'StateGrid',
    'discretize_reserve_states',
    'sigma_by_level',
    'ort_state_probabilities',
    'ort_lz',
    'scale_lz',
    'hybrid_reserve_lz',
    'hybrid_generation_reserve_lz',
    'generation_lz',
]
