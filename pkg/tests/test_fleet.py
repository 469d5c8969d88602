"""
Tests de la synthèse de flotte, du regroupement et de la répartition par nœud
"""

import numpy as np
import pytest

from reservedyn.models.dynamics.aggregate import aggregate_power, baseline_power
from reservedyn.models.dynamics.timeline import build_timelines
from reservedyn.models.fleet.clustering import choose_cluster_count, cluster_by_cycle_times
from reservedyn.models.fleet.distributions import ParamDistribution
from reservedyn.models.fleet.population import Fleet, PopulationSpec, allocate_to_buses, sample_population

from .conftest import AMBIENT


def test_sample_population_is_reproducible():
    spec = PopulationSpec(count=500, seed=11)
    a, b = sample_population(spec), sample_population(spec)
    assert np.array_equal(a.C, b.C)
    assert np.array_equal(a.setpoint, b.setpoint)


def test_sample_population_mean_power():
    """Moyenne de p ≈ 5.6 kW pour U(4, 7.2)"""
    fleet = sample_population(PopulationSpec(count=100000, seed=42))
    assert len(fleet) == 100000
    assert fleet.p.mean() == pytest.approx(5.6, abs=0.02)
    assert fleet.p.min() >= 4.0 and fleet.p.max() <= 7.2


def test_sampled_devices_are_feasible():
    fleet = sample_population(PopulationSpec(count=2000, seed=5))
    assert fleet.feasible_mask(AMBIENT).all()


def test_empty_population():
    fleet = sample_population(PopulationSpec(count=0))
    assert len(fleet) == 0


def test_invalid_population_rejected():
    with pytest.raises(ValueError):
        sample_population(PopulationSpec(count=10, C=ParamDistribution.uniform(2.5, 1.5)))


def test_fleet_indexing(d_star, d_band):
    fleet = Fleet.homogeneous(d_star, d_band, 3)
    params, band = fleet[1]
    assert params == d_star
    assert band == d_band
    assert fleet.total_power_kw == pytest.approx(15.0)
    assert len(fleet.subset(np.array([0, 2]))) == 2


def test_single_cluster_uses_device_closest_to_mean(homogeneous_fleet, d_star):
    clusters = cluster_by_cycle_times(homogeneous_fleet, AMBIENT, 1)
    assert len(clusters) == 1
    assert clusters[0].member_count == 10000
    assert clusters[0].representative == d_star
    assert clusters[0].member_power_sum == pytest.approx(50000.0)


def test_cluster_count_above_fleet_size_rejected(d_star, d_band):
    fleet = Fleet.homogeneous(d_star, d_band, 3)
    with pytest.raises(ValueError):
        cluster_by_cycle_times(fleet, AMBIENT, 4)
    with pytest.raises(ValueError):
        cluster_by_cycle_times(fleet, AMBIENT, 0)


def test_two_separated_groups(small_fleet):
    """Deux familles bien séparées : Q = 2 et 200 membres par groupe"""
    assert choose_cluster_count(small_fleet, AMBIENT, 4) == 2
    clusters = cluster_by_cycle_times(small_fleet, AMBIENT, 2)
    assert sorted(c.member_count for c in clusters) == [200, 200]
    assert sum(c.member_power_sum for c in clusters) == pytest.approx(small_fleet.total_power_kw)


def test_choose_cluster_count_bounds(small_fleet):
    with pytest.raises(ValueError):
        choose_cluster_count(small_fleet, AMBIENT, 1)


def test_clustered_baseline_matches_device_sum(small_fleet):
    """P⁰ des groupes égale Σ p_v·η_v⁰ des appareils, quel que soit le représentant"""
    clusters = cluster_by_cycle_times(small_fleet, AMBIENT, 2)
    timelines = build_timelines(clusters, 1.0, AMBIENT, 0.0)
    t_on, t_off = small_fleet.cycle_times(AMBIENT)
    exact = float(small_fleet.p @ (t_on / (t_on + t_off))) / 1000.0
    assert baseline_power(clusters, timelines) == pytest.approx(exact, rel=1e-9)
    assert aggregate_power(clusters, timelines, -0.5) == pytest.approx(exact, rel=1e-9)


def test_cluster_power_scaling(d_cluster):
    half = d_cluster.scaled(0.5)
    assert half.member_power_sum == pytest.approx(250000.0)
    assert half.representative == d_cluster.representative


def test_allocate_by_load():
    shares = allocate_to_buses({1: 0.0, 2: 30.0, 3: 90.0})
    assert shares == pytest.approx({2: 0.25, 3: 0.75})


def test_allocate_explicit():
    shares = allocate_to_buses({1: 10.0, 2: 30.0}, {1: 2.0, 2: 2.0})
    assert shares == pytest.approx({1: 0.5, 2: 0.5})


def test_allocate_without_load_rejected():
    with pytest.raises(ValueError):
        allocate_to_buses({1: 0.0})


def test_distribution_cumulants():
    """Cumulants d'une uniforme centrée et d'une normale"""
    uniform = ParamDistribution.uniform(-1.0, 1.0).cumulants(6)
    assert uniform[0] == pytest.approx(0.0)
    assert uniform[1] == pytest.approx(1.0 / 3.0)
    assert uniform[3] == pytest.approx(-2.0 / 15.0)
    assert uniform[5] == pytest.approx(16.0 / 63.0)
    normal = ParamDistribution.normal(1.0, 0.5).cumulants(4)
    assert normal.tolist() == pytest.approx([1.0, 0.25, 0.0, 0.0])


def test_distribution_from_dict():
    assert ParamDistribution.from_dict(3.0) == ParamDistribution.constant(3.0)
    dist = ParamDistribution.from_dict({"dist": "uniform", "low": 1.5, "high": 2.5})
    assert dist.mean == pytest.approx(2.0)
    with pytest.raises(ValueError):
        ParamDistribution.from_dict({"dist": "lognormal"})


@pytest.mark.slow
def test_table1_fleet_initial_power():
    """100 000 appareils du scénario fourni : puissance initiale d'environ 180 MW"""
    from reservedyn.config.scenario.scenario_loader import load_scenario
    from reservedyn.simulation.reliability_manager import ReliabilityManager

    manager = ReliabilityManager(load_scenario("table1_fleet.json"))
    manager.prepare_fleet()
    assert 170.0 <= manager.P0 <= 190.0
    assert manager.artifacts["aggregate"]["power_mw"].iloc[0] == pytest.approx(manager.P0)


def test_fleet_from_devices(d_star, d_band):
    fleet = Fleet.from_devices([(d_star, d_band)] * 3)
    assert len(fleet) == 3
    params, band = fleet[2]
    assert params.Q == pytest.approx(12.5)
    assert band.setpoint == 25.0
    assert len(Fleet.from_devices([])) == 0
