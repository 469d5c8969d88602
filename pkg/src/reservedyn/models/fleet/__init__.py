"""
Synthèse et regroupement de flottes hétérogènes de TCL
"""

from .distributions import ParamDistribution
from .population import PopulationSpec, Fleet, sample_population, allocate_to_buses
from .clustering import Cluster, cluster_by_cycle_times, choose_cluster_count

__all__ = [
    'ParamDistribution',
    'PopulationSpec',
    'Fleet',
    'sample_population',
    'allocate_to_buses',
    'Cluster',
    'cluster_by_cycle_times',
    'choose_cluster_count',
]
