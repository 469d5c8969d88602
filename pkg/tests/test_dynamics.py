"""
Tests de la chronologie de migration et de la puissance agrégée d'un groupe homogène D*
"""

import logging

import numpy as np
import pytest

from reservedyn.models.dynamics.aggregate import (aggregate_power, baseline_power, cluster_duty, power_trajectory,
                                                  reserve_capacity)
from reservedyn.models.dynamics.timeline import (CycleGap, DelayOrder, build_timeline,
                                                 build_timeline_from_quantities, expected_cycle_times,
                                                 junction_jumps)
from reservedyn.models.fleet.clustering import Cluster
from reservedyn.models.thermal.device import DeviceParams

from .conftest import AMBIENT


def minutes(value_h):
    return 60.0 * value_h


@pytest.fixture
def timeline(d_cluster):
    return build_timeline(d_cluster, 1.0, AMBIENT, 0.0)


def test_path_and_breakpoints(timeline):
    """Chemin C1×GAP et bornes de la chronologie de D*"""
    assert timeline.path == (DelayOrder.C1, CycleGap.GAP)
    assert [minutes(b) for b in timeline.breakpoints] == pytest.approx([13.34, 40.09, 52.72, 87.77, 92.82], abs=0.02)
    labels = [piece.label for piece in timeline.pieces]
    assert labels == ["steady_old", "draining", "all_off", "new_on_ramp", "gap_hold", "gap_fill", "steady_new"]


@pytest.mark.parametrize("tau_min, label, expected", [
    (5.0, "draining", (8.34, 39.34)),
    (20.0, "all_off", (0.0, 47.68)),
    (45.0, "new_on_ramp", (4.91, 42.77)),
    (120.0, "steady_new", (12.63, 40.09)),
])
def test_piece_values(timeline, tau_min, label, expected):
    t = tau_min / 60.0
    assert timeline.piece_at(t).label == label
    t_on, t_off = expected_cycle_times(timeline, t)
    assert (minutes(t_on), minutes(t_off)) == pytest.approx(expected, abs=0.02)


def test_before_shift_is_steady_old(timeline):
    assert timeline.piece_at(-0.5).label == "steady_old"
    assert expected_cycle_times(timeline, -0.5) == pytest.approx(timeline.base_times)


def test_nonpositive_shift_rejected(d_cluster):
    with pytest.raises(ValueError):
        build_timeline(d_cluster, 0.0, AMBIENT, 0.0)


def test_first_junction_is_continuous(timeline):
    """Draining → all_off : T_on atteint 0 et T_off vaut le cycle complet des deux côtés"""
    jumps = junction_jumps(timeline)
    assert len(jumps) == len(timeline.pieces) - 2
    tau, jump_on, jump_off = jumps[0]
    assert minutes(tau) == pytest.approx(13.34, abs=0.02)
    assert jump_on == pytest.approx(0.0, abs=1e-12)
    assert jump_off == pytest.approx(0.0, abs=1e-12)


def test_c2_path_has_early_release():
    """Délai plus court que T_on⁰ : morceau early_release"""
    q = np.array([0.3, 0.5, 0.28, 0.55, 0.1])
    timeline = build_timeline_from_quantities(q, 1.0, 1.0)
    assert timeline.path == (DelayOrder.C2, CycleGap.GAP)
    assert [piece.label for piece in timeline.pieces] == ["steady_old", "draining", "early_release", "new_on_ramp",
                                                        "gap_hold", "gap_fill", "steady_new"]
    assert timeline.breakpoints == pytest.approx([0.1, 0.3, 0.38, 0.9, 0.93])


def test_nogap_path():
    q = np.array([0.3, 0.5, 0.25, 0.5, 0.1])
    timeline = build_timeline_from_quantities(q, 0.0, 1.0)
    assert timeline.path == (DelayOrder.C2, CycleGap.NOGAP)
    assert timeline.pieces[-2].label == "nogap_drain"
    assert timeline.breakpoints[-1] == pytest.approx(0.65)


def test_cluster_duty():
    assert cluster_duty(1.0, 3.0) == pytest.approx(0.25)
    eta, degenerate = cluster_duty(0.0, 0.0, return_flag=True)
    assert eta == 0.0 and degenerate


def test_baseline_power_d_star(d_cluster, timeline):
    """η = 0.27971, soit 139.9 MW pour 100 000 appareils de 5 kW"""
    assert cluster_duty(*timeline.base_times) == pytest.approx(0.27971, abs=1e-5)
    assert baseline_power([d_cluster], [timeline]) == pytest.approx(139.86, abs=0.05)


def test_reserve_peak_and_rebound(d_cluster, timeline):
    """Réserve totale pendant all_off, 20.04 MW une fois le nouveau régime établi"""
    p0 = baseline_power([d_cluster], [timeline])
    assert aggregate_power([d_cluster], [timeline], 20.0 / 60.0) == pytest.approx(0.0)
    steady = aggregate_power([d_cluster], [timeline], 2.0)
    assert reserve_capacity(p0, steady) == pytest.approx(20.04, abs=0.02)


def test_power_trajectory_frame(d_cluster, timeline):
    frame = power_trajectory([d_cluster], [timeline], np.array([-0.5, 20.0 / 60.0, 2.0]))
    assert list(frame.columns) == ["time_h", "power_mw", "reserve_mw"]
    assert frame["reserve_mw"].iloc[0] == pytest.approx(0.0, abs=1e-9)
    assert frame["reserve_mw"].iloc[1] == pytest.approx(frame["power_mw"].iloc[0])
    assert frame["reserve_mw"].iloc[2] == pytest.approx(20.04, abs=0.02)


def test_mismatched_timelines_rejected(d_cluster, timeline):
    with pytest.raises(ValueError):
        aggregate_power([d_cluster, d_cluster], [timeline], 0.0)


@pytest.mark.parametrize("q", [
    np.array([0.22228, 0.57241, 0.21058, 0.66821, 0.66821]),
    np.array([0.3, 0.5, 0.28, 0.55, 0.1]),
    np.array([0.3, 0.5, 0.25, 0.5, 0.1]),
    np.array([0.1, 0.5, 0.08, 0.45, 0.3]),
])
def test_junctions_are_continuous(q):
    """Toutes les jonctions sont continues, sauf l'entrée dans le régime établi après nogap_drain"""
    timeline = build_timeline_from_quantities(q, 0.0, 1.0)
    for (tau, jump_on, jump_off), right in zip(junction_jumps(timeline), timeline.pieces[2:]):
        if timeline.path[1] is CycleGap.NOGAP and right.label == "steady_new":
            continue
        assert abs(jump_on) < 1e-9, f"{right.label} à τ={tau}"
        assert abs(jump_off) < 1e-9, f"{right.label} à τ={tau}"


def test_nogap_end_jump_logged_at_debug(d_band, caplog):
    """RQ = 10 °C : cycle raccourci (NOGAP), saut T_off_new − T_on_new journalisé en DEBUG"""
    cluster = Cluster(DeviceParams(C=2.0, R=2.0, p=2.0), d_band, member_power_sum=2.0, member_count=1)
    #setup_logging coupe la propagation du logger du paquet
    package_logger = logging.getLogger("reservedyn")
    propagate = package_logger.propagate
    package_logger.propagate = True
    try:
        with caplog.at_level(logging.DEBUG, logger="reservedyn.models.dynamics.timeline"):
            timeline = build_timeline(cluster, 1.0, AMBIENT, 0.0)
    finally:
        package_logger.propagate = propagate

    assert timeline.path == (DelayOrder.C2, CycleGap.NOGAP)
    jumps = [record for record in caplog.records if "Discontinuité" in record.getMessage()]
    assert len(jumps) == 1
    assert jumps[0].levelno == logging.DEBUG
    assert not [record for record in caplog.records if record.levelno >= logging.WARNING]
