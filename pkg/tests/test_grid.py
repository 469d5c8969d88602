"""
Tests du réseau DC, de l'OPF d'effacement minimal et de l'énumération des états du système
"""

import itertools

import numpy as np
import pytest

from reservedyn.core.exceptions import ConfigError
from reservedyn.models.grid.links import Line
from reservedyn.models.grid.network import Network, NetworkState, build_susceptance
from reservedyn.models.grid.nodes import Bus
from reservedyn.models.grid.opf import CurtailmentSolver, min_total_curtailment, tie_break_weights
from reservedyn.models.grid.system_states import SharedComponent, enumerate_system_states, solve_states
from reservedyn.models.multistate.lz_polynomial import LzPolynomial


# === RÉSEAU ===

def test_susceptance_two_bus(two_bus_network):
    B = build_susceptance(two_bus_network)
    assert np.allclose(B, [[10.0, -10.0], [-10.0, 10.0]])


def test_disconnected_network_rejected():
    network = Network("island", reference_bus=1)
    for index in (1, 2, 3):
        network.add_bus(Bus(index, 10.0))
    network.add_line(Line("L12", 1, 2, 0.1, 50.0))
    with pytest.raises(ConfigError):
        network.check_connected()
    with pytest.raises(ConfigError):
        build_susceptance(network)
    assert network.validate()


def test_line_outage_state_can_disconnect(two_bus_network):
    two_bus_network.set_network_states([NetworkState((True,), 0.99), NetworkState((False,), 0.01)])
    assert len(two_bus_network.components(0)) == 1
    assert len(two_bus_network.components(1)) == 2
    assert two_bus_network.validate()


def test_duplicate_components_rejected(two_bus_network):
    with pytest.raises(ValueError):
        two_bus_network.add_bus(Bus(1, 0.0))
    with pytest.raises(ValueError):
        two_bus_network.add_line(Line("L1", 1, 2, 0.1, 50.0))
    with pytest.raises(ValueError):
        two_bus_network.add_line(Line("L9", 1, 7, 0.1, 50.0))


def test_load_trace_interpolation():
    bus = Bus(4, 0.0, [(0.0, 10.0), (2.0, 30.0)])
    assert bus.load_at(1.0) == pytest.approx(20.0)
    assert bus.peak_load == 30.0
    assert Bus(5, -1.0).validate()


# === OPF ===

def test_two_bus_curtailment(two_bus_network):
    """100 MW au nœud 1, 80 MW de charge au nœud 2, ligne limitée à 50 MW : LC = 30 MW au nœud 2"""
    result = min_total_curtailment(np.array([100.0, 0.0]), two_bus_network, two_bus_network.loads_at(0.0))
    assert result.curtailment.tolist() == pytest.approx([0.0, 30.0], abs=1e-6)
    assert result.total == pytest.approx(30.0, abs=1e-6)
    assert abs(result.flows[0]) == pytest.approx(50.0, abs=1e-6)


def test_no_curtailment_when_capacity_suffices(two_bus_network):
    result = min_total_curtailment(np.array([100.0, 50.0]), two_bus_network, two_bus_network.loads_at(0.0))
    assert result.total == 0.0


def test_curtailment_monotone_in_availability(two_bus_network):
    loads = two_bus_network.loads_at(0.0)
    totals = [min_total_curtailment(np.array([g, local]), two_bus_network, loads).total
              for g, local in ((20.0, 0.0), (40.0, 0.0), (100.0, 0.0), (100.0, 20.0), (100.0, 40.0))]
    assert totals == pytest.approx([60.0, 40.0, 30.0, 10.0, 0.0], abs=1e-6)
    assert all(a >= b for a, b in zip(totals, totals[1:]))


def test_power_balance(three_bus_network):
    """Σ p = Σ D̄ − Σ LC et transits dans leurs limites"""
    loads = three_bus_network.loads_at(0.0)
    result = min_total_curtailment(np.array([200.0, 0.0, 0.0]), three_bus_network, loads)
    assert result.dispatch.sum() == pytest.approx(loads.sum() - result.total, abs=1e-6)
    limits = np.array([line.limit_mw for line in three_bus_network.lines])
    assert np.all(np.abs(result.flows) <= limits + 1e-6)


def test_triangle_congestion_curtails_far_bus(three_bus_network):
    """La ligne 1-3 limite l'alimentation du nœud 3 : 50 MW effacés au nœud 3"""
    loads = three_bus_network.loads_at(0.0)
    result = min_total_curtailment(np.array([200.0, 0.0, 0.0]), three_bus_network, loads)
    assert result.total == pytest.approx(50.0, abs=1e-6)
    assert result.curtailment.tolist() == pytest.approx([0.0, 0.0, 50.0], abs=1e-6)


def _vertex_curtailment(network, available, loads):
    """
    Minimum de Σ w_i·LC_i par énumération des sommets du polyèdre réduit :
    variables (p_i hors référence, LC_i), p_ref et θ éliminés par le bilan.
    """
    ids = network.bus_ids
    n = len(ids)
    ref = ids.index(network.reference_bus)
    keep = [i for i in range(n) if i != ref]
    position = {b: i for i, b in enumerate(ids)}
    B = network.base_mva * build_susceptance(network)
    X = np.zeros((n, n))
    X[np.ix_(keep, keep)] = np.linalg.inv(B[np.ix_(keep, keep)])

    m = 2 * n - 1
    #injections P = M·y + c
    M = np.zeros((n, m))
    c = -np.asarray(loads, dtype=float).copy()
    c[ref] += loads.sum()
    for col, j in enumerate(keep):
        M[j, col] = 1.0
        M[ref, col] = -1.0
    for i in range(n):
        M[i, n - 1 + i] += 1.0
        M[ref, n - 1 + i] -= 1.0

    rows, bounds = [], []
    for col, j in enumerate(keep):
        rows += [np.eye(m)[col], -np.eye(m)[col]]
        bounds += [available[j], 0.0]
    for i in range(n):
        rows += [np.eye(m)[n - 1 + i], -np.eye(m)[n - 1 + i]]
        bounds += [loads[i], 0.0]
    p_ref = -np.concatenate([np.ones(n - 1), np.ones(n)])
    rows += [p_ref, -p_ref]
    bounds += [available[ref] - loads.sum(), loads.sum()]
    for line in network.lines:
        i, k = position[line.from_bus], position[line.to_bus]
        gain = network.base_mva / line.x_pu * (X[i] - X[k])
        rows += [gain @ M, -(gain @ M)]
        bounds += [line.limit_mw - gain @ c, line.limit_mw + gain @ c]
    G, h = np.array(rows), np.array(bounds)

    cost = np.concatenate([np.zeros(n - 1), tie_break_weights(n)])
    best, best_y = np.inf, None
    for subset in itertools.combinations(range(len(h)), m):
        A = G[list(subset)]
        if abs(np.linalg.det(A)) < 1e-9:
            continue
        y = np.linalg.solve(A, h[list(subset)])
        if np.all(G @ y <= h + 1e-7) and cost @ y < best - 1e-12:
            best, best_y = float(cost @ y), y
    return best, best_y[n - 1:]


@pytest.mark.parametrize("available", [[200.0, 0.0, 0.0], [30.0, 10.0, 5.0], [0.0, 60.0, 0.0], [80.0, 0.0, 40.0]])
def test_triangle_matches_vertex_enumeration(three_bus_network, available):
    available = np.array(available)
    loads = three_bus_network.loads_at(0.0)
    objective, curtailment = _vertex_curtailment(three_bus_network, available, loads)
    result = min_total_curtailment(available, three_bus_network, loads)
    assert float(tie_break_weights(3) @ result.curtailment) == pytest.approx(objective, abs=1e-6)
    assert result.curtailment == pytest.approx(curtailment, abs=1e-6)


def test_random_instances_respect_balance_limits_and_monotonicity(three_bus_network):
    """200 tirages de AG* et D̄ : bilan, limites de transit et effacement décroissant en AG*"""
    rng = np.random.default_rng(11)
    limits = np.array([line.limit_mw for line in three_bus_network.lines])
    for _ in range(200):
        available = rng.uniform(0.0, 100.0, 3)
        loads = rng.uniform(0.0, 80.0, 3)
        result = min_total_curtailment(available, three_bus_network, loads)
        assert result.dispatch.sum() == pytest.approx(loads.sum() - result.total, abs=1e-5)
        assert np.all(result.dispatch >= -1e-7) and np.all(result.dispatch <= available + 1e-7)
        assert np.all(result.curtailment >= 0.0) and np.all(result.curtailment <= loads)
        assert np.all(np.abs(result.flows) <= limits + 1e-6)

        more = available.copy()
        more[rng.integers(3)] += rng.uniform(0.0, 50.0)
        assert min_total_curtailment(more, three_bus_network, loads).total <= result.total + 1e-6


def test_negative_inputs_rejected(two_bus_network):
    with pytest.raises(ValueError):
        min_total_curtailment(np.array([-1.0, 0.0]), two_bus_network, np.array([0.0, 80.0]))


def test_solver_cache_and_certificates(two_bus_network):
    solver = CurtailmentSolver(two_bus_network)
    loads = two_bus_network.loads_at(0.0)
    assert solver.solve(np.array([100.0, 0.0]), loads).tolist() == pytest.approx([0.0, 30.0], abs=1e-6)
    solver.solve(np.array([100.0, 0.0]), loads)
    assert solver.lp_count == 1

    assert solver.solve(np.array([100.0, 50.0]), loads).sum() == 0.0
    assert solver.lp_count == 2
    #couvert par le dispatch de l'état précédent
    assert solver.solve(np.array([100.0, 60.0]), loads).sum() == 0.0
    assert solver.lp_count == 2
    assert solver.certified_count == 1


def test_solve_many_matches_single_solves(two_bus_network):
    loads = two_bus_network.loads_at(0.0)
    available = np.array([[100.0, 0.0], [100.0, 50.0], [100.0, 70.0], [20.0, 0.0], [0.0, 80.0]])
    batch = CurtailmentSolver(two_bus_network).solve_many(available, loads, np.zeros(5, dtype=int))
    single = np.array([min_total_curtailment(row, two_bus_network, loads).curtailment for row in available])
    assert np.allclose(batch, single, atol=1e-6)


# === ÉTATS DU SYSTÈME ===

def test_enumerate_product_of_bus_states(two_bus_network):
    """3 états au nœud 1 × 2 états au nœud 2 = 6 états"""
    polys = {1: LzPolynomial.constant([0.0, 50.0, 100.0], [0.1, 0.3, 0.6]),
             2: LzPolynomial.constant([0.0, 40.0], [0.5, 0.5])}
    states = enumerate_system_states(polys, two_bus_network, 0.0, prob_floor=0.0)
    assert len(states) == 6
    assert states.probabilities.sum() == pytest.approx(1.0)
    assert states.expected_available().tolist() == pytest.approx([75.0, 20.0])
    solve_states(states, two_bus_network, two_bus_network.loads_at(0.0), CurtailmentSolver(two_bus_network))
    assert states.is_solved
    assert sum(state.probability * state.total_curtailment for state in states) == pytest.approx(
        float(states.probabilities @ states.curtailment.sum(axis=1)))
    frame = states.to_frame()
    assert {"probability", "ag_1", "ag_2", "lc_1", "lc_2"} <= set(frame.columns)


def test_network_states_multiply_system_states(two_bus_network):
    two_bus_network.set_network_states([NetworkState((True,), 0.9), NetworkState((True,), 0.1)])
    polys = {1: LzPolynomial.constant([0.0, 100.0], [0.5, 0.5])}
    states = enumerate_system_states(polys, two_bus_network, 0.0)
    assert len(states) == 4
    assert sorted(set(states.network_states.tolist())) == [0, 1]


def test_shared_component_splits_capacity(two_bus_network):
    shared = SharedComponent(LzPolynomial.constant([0.0, 10.0], [0.5, 0.5]), {1: 0.25, 2: 0.75}, "ORT")
    states = enumerate_system_states({}, two_bus_network, 0.0, shared=[shared])
    assert len(states) == 2
    assert np.allclose(states.available, [[0.0, 0.0], [2.5, 7.5]])


def test_unknown_bus_polynomial_rejected(two_bus_network):
    with pytest.raises(ValueError):
        enumerate_system_states({9: LzPolynomial.deterministic(1.0)}, two_bus_network, 0.0)
