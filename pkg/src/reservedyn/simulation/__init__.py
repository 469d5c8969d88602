"""
Évaluation de la fiabilité et référence Monte Carlo
"""

from .fleet_simulator import FleetTrace, ReplicationSet, replicate_fleet, simulate_fleet, simulated_cycle_times
from .reliability_manager import (VARIANTS, IndexSeries, ReliabilityManager, ReliabilityResult, compare_variants,
                                  eens, evaluate_scenario, expected_curtailment, lole, lolp_at)
from .monte_carlo import EmpiricalDistribution, empirical_distribution, mc_reliability

__all__ = [
    'FleetTrace',
    'ReplicationSet',
    'replicate_fleet',
    'simulate_fleet',
    'simulated_cycle_times',
    'VARIANTS',
    'IndexSeries',
    'ReliabilityManager',
    'ReliabilityResult',
    'compare_variants',
    'eens',
    'evaluate_scenario',
    'expected_curtailment',
    'lole',
    'lolp_at',
    'EmpiricalDistribution',
    'empirical_distribution',
    'mc_reliability',
]
