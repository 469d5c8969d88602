"""
Tests du modèle thermique d'une TCL : pas exact, commutation et temps de cycle
"""

import numpy as np
import pytest

from reservedyn.core.exceptions import DomainError
from reservedyn.models.thermal.device import DeviceParams, DeviceState, HysteresisBand
from reservedyn.models.thermal.thermal_converter import ThermalConverter
from reservedyn.simulation.fleet_simulator import simulated_cycle_times

from .conftest import AMBIENT


def test_exact_step_reaches_lower_bound(d_star):
    """Partant de θ₊ en marche, un pas de T_on⁰ ramène à θ₋"""
    state = ThermalConverter.temperature_step(DeviceState(25.5, 1), AMBIENT, d_star, 0.22228)
    assert state.theta == pytest.approx(24.5, abs=1e-4)
    assert state.mode == 1


@pytest.mark.parametrize("mode", [0, 1])
def test_exact_step_matches_fine_euler(d_star, mode):
    """Un pas exact de 3 min égale 10⁴ pas d'Euler à 1e-6 °C près"""
    dt = 0.05
    exact = ThermalConverter.temperature_step(DeviceState(25.0, mode), AMBIENT, d_star, dt).theta
    theta, h = 25.0, dt / 10000
    for _ in range(10000):
        theta += h * (AMBIENT - mode * d_star.rq - theta) / d_star.time_constant
    assert exact == pytest.approx(theta, abs=1e-6)


def test_exact_step_off_relaxes_to_ambient(d_star):
    """À l'arrêt, la température tend vers l'ambiance"""
    state = ThermalConverter.temperature_step(DeviceState(25.0, 0), AMBIENT, d_star, 100.0)
    assert state.theta == pytest.approx(AMBIENT, abs=1e-6)


def test_exact_step_rejects_nonpositive_dt(d_star):
    with pytest.raises(ValueError):
        ThermalConverter.temperature_step(DeviceState(25.0, 1), AMBIENT, d_star, 0.0)


def test_mode_update_hysteresis(d_band):
    """Commutation uniquement hors de la bande"""
    assert ThermalConverter.mode_update(25.6, 0, d_band) == 1
    assert ThermalConverter.mode_update(24.4, 1, d_band) == 0
    assert ThermalConverter.mode_update(25.0, 1, d_band) == 1
    assert ThermalConverter.mode_update(25.0, 0, d_band) == 0


def test_steady_cycle_times_d_star(d_star, d_band):
    t_on, t_off = ThermalConverter.steady_cycle_times(d_star, d_band, AMBIENT)
    assert t_on == pytest.approx(0.22228, abs=1e-5)
    assert t_off == pytest.approx(0.57241, abs=1e-5)


def test_shifted_cycle_times_and_delay(d_star, d_band):
    t_on, t_off = ThermalConverter.shifted_cycle_times(d_star, d_band, AMBIENT, 1.0)
    assert t_on == pytest.approx(0.21058, abs=1e-5)
    assert t_off == pytest.approx(0.66821, abs=1e-5)
    assert ThermalConverter.migration_delay(d_star, d_band, AMBIENT, 1.0) == pytest.approx(0.66821, abs=1e-5)


def test_zero_shift_has_no_delay(d_star, d_band):
    assert ThermalConverter.migration_delay(d_star, d_band, AMBIENT, 0.0) == 0.0


def test_zero_shift_is_identity(d_star, d_band):
    """beta = 0 : la bande décalée redonne les durées de cycle nominales"""
    assert ThermalConverter.shifted_cycle_times(d_star, d_band, AMBIENT, 0.0) == pytest.approx(
        ThermalConverter.steady_cycle_times(d_star, d_band, AMBIENT))


def test_negative_shift_is_rejected(d_star, d_band):
    with pytest.raises(ValueError):
        ThermalConverter.shifted_cycle_times(d_star, d_band, AMBIENT, -0.5)
    with pytest.raises(ValueError):
        ThermalConverter.migration_delay(d_star, d_band, AMBIENT, -0.5)


def test_ambient_inside_band_is_domain_error(d_star, d_band):
    with pytest.raises(DomainError):
        ThermalConverter.steady_cycle_times(d_star, d_band, 25.2)


def test_shift_beyond_ambient_is_domain_error(d_star, d_band):
    with pytest.raises(DomainError):
        ThermalConverter.migration_delay(d_star, d_band, AMBIENT, 7.0)
    with pytest.raises(DomainError):
        ThermalConverter.shifted_cycle_times(d_star, d_band, AMBIENT, 7.0)


def test_insufficient_cooling_is_domain_error(d_band):
    weak = DeviceParams(C=2.0, R=0.5, p=1.0, cop=2.5)
    with pytest.raises(DomainError):
        ThermalConverter.steady_cycle_times(weak, d_band, 40.0)


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        DeviceParams(C=-1.0, R=2.0, p=5.0)
    with pytest.raises(ValueError):
        HysteresisBand(25.0, 0.0)
    with pytest.raises(ValueError):
        DeviceState(25.0, 2)


def test_p_literal_mode_uses_r_times_p():
    params = DeviceParams(C=2.0, R=2.0, p=5.0, cop=2.5, heat_rate_mode="p_literal")
    assert params.rq == pytest.approx(10.0)
    assert DeviceParams(C=2.0, R=2.0, p=5.0, cop=2.5).rq == pytest.approx(25.0)


def test_trajectory_stays_near_band(d_star, d_band):
    """La trajectoire simulée reste dans la bande à un pas près"""
    thetas, modes = ThermalConverter.temperature_trajectory(DeviceState(25.0, 1), lambda _t: AMBIENT,
                                                           d_star, d_band, 1.0 / 3600.0, 7200)
    assert thetas.min() > d_band.lower - 0.01
    assert thetas.max() < d_band.upper + 0.01
    assert set(np.unique(modes)) == {0, 1}


def test_closed_form_matches_simulated_cycles(d_star, d_band):
    """Temps de cycle en forme fermée contre cycles mesurés au pas de 1 s"""
    t_on, t_off = simulated_cycle_times(d_star, d_band, AMBIENT, dt_s=1.0, cycles=3)
    expected_on, expected_off = ThermalConverter.steady_cycle_times(d_star, d_band, AMBIENT)
    assert t_on == pytest.approx(expected_on, abs=1e-3)
    assert t_off == pytest.approx(expected_off, abs=1e-3)


def test_vectorized_cycle_times_match_scalar(d_star, d_band):
    t_on, t_off = ThermalConverter.cycle_times(np.array([4.0, 4.0]), np.array([25.0, 25.0]),
                                               np.array([24.5, 24.5]), np.array([25.5, 25.5]), AMBIENT)
    expected = ThermalConverter.steady_cycle_times(d_star, d_band, AMBIENT)
    assert np.allclose(t_on, expected[0])
    assert np.allclose(t_off, expected[1])


def test_heat_rate_modes(d_star):
    """R·Q = R·COP·p par défaut, R·p en lecture littérale, nul à l'arrêt"""
    assert ThermalConverter.heat_rate(d_star, 1) == pytest.approx(25.0)
    assert ThermalConverter.heat_rate(d_star, 0) == 0.0
    literal = DeviceParams(C=2.0, R=2.0, p=5.0, cop=2.5, heat_rate_mode="p_literal")
    assert ThermalConverter.heat_rate(literal, 1) == pytest.approx(10.0)
