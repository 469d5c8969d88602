"""
Données partagées des tests : appareil D*, petites flottes et réseaux à 2 et 3 nœuds
"""

import numpy as np
import pytest

from reservedyn.models.fleet.clustering import Cluster
from reservedyn.models.fleet.population import Fleet
from reservedyn.models.grid.links import Line
from reservedyn.models.grid.network import Network
from reservedyn.models.grid.nodes import Bus
from reservedyn.models.thermal.device import DeviceParams, HysteresisBand

#D* : C=2, R=2, Q=12.5 kW (p=5 kW, COP 2.5), bande [24.5, 25.5] °C, θa=32 °C
AMBIENT = 32.0


@pytest.fixture
def d_star():
    return DeviceParams(C=2.0, R=2.0, p=5.0, cop=2.5)


@pytest.fixture
def d_band():
    return HysteresisBand(setpoint=25.0, deadband=1.0)


@pytest.fixture
def d_cluster(d_star, d_band):
    """100 000 copies de D*"""
    return Cluster(d_star, d_band, member_power_sum=100000 * 5.0, member_count=100000)


@pytest.fixture
def homogeneous_fleet(d_star, d_band):
    return Fleet.homogeneous(d_star, d_band, 10000)


@pytest.fixture
def small_fleet():
    """Deux familles de 200 appareils, consignes 22 et 27 °C, faible dispersion gaussienne"""
    rng = np.random.default_rng(3)
    C = rng.normal(1.55, 0.02, 400)
    R = np.full(400, 1.55)
    p = rng.normal(5.0, 0.1, 400)
    setpoint = np.concatenate([np.full(200, 22.0), np.full(200, 27.0)])
    return Fleet(C, R, p, setpoint)


@pytest.fixture
def two_bus_network():
    """Production au nœud 1, charge de 80 MW au nœud 2, ligne limitée à 50 MW"""
    network = Network("two_bus", reference_bus=1)
    network.add_bus(Bus(1, 0.0))
    network.add_bus(Bus(2, 80.0))
    network.add_line(Line("L1", 1, 2, 0.1, 50.0))
    return network


@pytest.fixture
def three_bus_network():
    """Triangle : ligne 1-3 limitée à 20 MW, charges aux nœuds 2 et 3"""
    network = Network("triangle", reference_bus=1)
    network.add_bus(Bus(1, 0.0))
    network.add_bus(Bus(2, 40.0))
    network.add_bus(Bus(3, 60.0))
    network.add_line(Line("L12", 1, 2, 0.1, 100.0))
    network.add_line(Line("L13", 1, 3, 0.1, 20.0))
    network.add_line(Line("L23", 2, 3, 0.1, 100.0))
    return network


@pytest.fixture
def small_scenario_data():
    """Scénario réduit : 5000 TCL au nœud 2, deux groupes de 50 MW au nœud 1, horizon 2 h au pas de 5 min"""
    return {
        "name": "two_bus_small",
        "population": {
            "count": 5000,
            "C": {"dist": "uniform", "low": 1.5, "high": 2.5},
            "R": {"dist": "uniform", "low": 1.5, "high": 2.5},
            "p": {"dist": "uniform", "low": 4.0, "high": 7.2},
            "setpoint": {"dist": "uniform", "low": 18.0, "high": 27.0},
            "seed": 5,
        },
        "clusters": {"count": 2},
        "deployment": {"t_s_min": 30, "beta_c": 1.0},
        "ambient": {"mean_c": AMBIENT},
        "tcl_buses": {"2": 1.0},
        "generation": [
            {"id": "G", "type": "two_state", "bus": 1, "count": 2, "capacity_mw": 50.0,
             "failure_rate": 0.01, "repair_rate": 0.1},
        ],
        "reserve": [
            {"id": "CR", "type": "conventional_reserve", "bus": 2, "capacity_mw": 20.0,
             "commit_min": 30, "lead_min": 10},
        ],
        "network": {
            "reference_bus": 1,
            "buses": [{"id": 1, "load_mw": 0.0}, {"id": 2, "load_mw": 80.0}],
            "lines": [{"id": "L1", "from": 1, "to": 2, "x_pu": 0.1, "limit_mw": 100.0}],
        },
        "horizon_min": 120,
        "dt_min": 5,
        "states_at_min": [60],
        "oracle": {"devices": 500, "replications": 4, "dt_s": 5.0, "samples": 10000, "seed": 3},
    }
