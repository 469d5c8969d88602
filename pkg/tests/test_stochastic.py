"""
Tests de la propagation des incertitudes et de la loi de Gram-Charlier de P(t)
"""

import numpy as np
import pytest
from scipy import stats

from reservedyn.models.dynamics.aggregate import aggregate_power, baseline_power
from reservedyn.models.dynamics.timeline import build_timeline
from reservedyn.models.fleet.distributions import ParamDistribution
from reservedyn.models.stochastic.gram_charlier import CumulantSet, PowerDistribution, hermite_coefficients
from reservedyn.models.stochastic.propagation import (EndpointDistribution, deviation_cumulants,
                                                      duty_sensitivities, endpoint_distributions,
                                                      interval_probabilities, mean_aggregate_power,
                                                      power_distribution)
from reservedyn.models.stochastic.uncertainty import UncertaintySpec

from .conftest import AMBIENT


@pytest.fixture
def timeline(d_cluster):
    return build_timeline(d_cluster, 1.0, AMBIENT, 0.0)


@pytest.fixture
def uncertain():
    return UncertaintySpec.constant_ambient(AMBIENT)


# === INCERTITUDES ===

def test_uncertainty_validation():
    assert UncertaintySpec().validate() == []
    assert UncertaintySpec(order=5).validate()
    assert UncertaintySpec(ambient_dev=ParamDistribution.normal(0.5, 1.0)).validate()
    assert UncertaintySpec(ambient_trace=((1.0, 30.0), (0.5, 31.0))).validate()


def test_ambient_trace_interpolation():
    spec = UncertaintySpec(ambient_trace=((0.0, 30.0), (2.0, 34.0)))
    assert spec.ambient_mean(1.0) == pytest.approx(32.0)
    assert spec.ambient_mean(5.0) == pytest.approx(34.0)


# === GRAM-CHARLIER ===

def test_hermite_coefficients_gaussian_and_skewed():
    """Loi normale : seul c_0 est non nul ; c_3 = κ_3/(6σ³)"""
    gaussian = hermite_coefficients(CumulantSet.gaussian(0.0, 3.0))
    assert gaussian[0] == pytest.approx(1.0)
    assert np.allclose(gaussian[1:], 0.0, atol=1e-12)
    skewed = hermite_coefficients(CumulantSet((0.0, 4.0, 2.0, 1.0)))
    assert skewed[3] == pytest.approx(0.25 / 6.0)
    assert skewed[4] == pytest.approx((1.0 / 16.0) / 24.0)


def test_negative_variance_rejected():
    with pytest.raises(ValueError):
        CumulantSet((0.0, -1.0))


def test_gaussian_cumulants_give_normal_cdf():
    distribution = PowerDistribution(100.0, CumulantSet.gaussian(0.0, 5.0))
    assert float(distribution.cdf(100.0)) == pytest.approx(0.5, abs=1e-4)
    assert float(distribution.cdf(110.0)) == pytest.approx(stats.norm.cdf(2.0), abs=1e-4)
    assert float(distribution.pdf(100.0)) == pytest.approx(stats.norm.pdf(0.0) / 5.0, rel=1e-9)


def test_skewed_cdf_is_monotone_and_matches_quadrature():
    """CDF tabulée croissante de 0 à 1, proche de la quadrature adaptative"""
    distribution = PowerDistribution(50.0, CumulantSet((0.0, 4.0, 2.0, 1.0)))
    lower, upper = distribution.support
    x = np.linspace(lower - 1.0, upper + 1.0, 500)
    values = distribution.cdf(x)
    assert values[0] == 0.0 and values[-1] == 1.0
    assert np.all(np.diff(values) >= -1e-12)
    assert np.all(distribution.pdf(x) >= 0.0)
    for point in (46.0, 50.0, 53.0):
        assert float(distribution.cdf(point)) == pytest.approx(distribution.exact_cdf(point), abs=1e-4)


def test_degenerate_distribution_is_a_step():
    distribution = PowerDistribution(50.0, CumulantSet((0.0, 0.0)))
    assert distribution.is_degenerate
    assert float(distribution.cdf(49.9)) == 0.0
    assert float(distribution.cdf(50.0)) == 1.0
    assert distribution.exact_cdf(50.1) == 1.0


def test_distribution_table():
    table = PowerDistribution(10.0, CumulantSet.gaussian(0.0, 1.0)).table(0.5)
    assert list(table.columns) == ["x_mw", "pdf", "cdf"]
    assert table["cdf"].is_monotonic_increasing


# === PROPAGATION ===

def test_deterministic_spec_reproduces_deterministic_power(d_cluster, timeline):
    """Incertitudes nulles : P̄(t) égale la dynamique déterministe et la loi est dégénérée"""
    spec = UncertaintySpec.deterministic(AMBIENT)
    assert spec.is_deterministic
    assert not UncertaintySpec.constant_ambient(AMBIENT).is_deterministic
    for tau_min in (5.0, 20.0, 45.0, 120.0):
        t = tau_min / 60.0
        distribution = power_distribution([d_cluster], [timeline], spec, t)
        assert distribution.mean == pytest.approx(aggregate_power([d_cluster], [timeline], t), abs=1e-9)
        assert distribution.is_degenerate
        assert distribution.cumulants.variance == 0.0


def test_endpoint_distributions_without_uncertainty_are_steps(d_cluster, timeline):
    dists = endpoint_distributions(d_cluster, timeline, UncertaintySpec.deterministic(AMBIENT), 0.1)
    assert len(dists) == len(timeline.pieces) - 1
    assert all(dist.std == 0.0 for dist in dists)
    rho = interval_probabilities(timeline, dists, 5.0 / 60.0)
    assert rho.tolist() == [0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]


@pytest.mark.parametrize("tau_min", [5.0, 14.0, 41.0, 60.0, 90.0, 150.0])
def test_interval_probabilities_sum_to_one(d_cluster, timeline, uncertain, tau_min):
    t = tau_min / 60.0
    dists = endpoint_distributions(d_cluster, timeline, uncertain, t)
    rho = interval_probabilities(timeline, dists, t)
    assert rho.sum() == pytest.approx(1.0)
    assert np.all(rho >= 0.0)


def test_interval_probabilities_size_checked(timeline):
    with pytest.raises(ValueError):
        interval_probabilities(timeline, [EndpointDistribution(0.0, 0.0)], 0.1)


def test_mean_power_before_shift(d_cluster, timeline, uncertain):
    """Avant le décalage, P̄ est la puissance du régime établi initial"""
    mean = mean_aggregate_power([d_cluster], [timeline], uncertain, -0.5)
    assert mean == pytest.approx(baseline_power([d_cluster], [timeline]), rel=1e-9)


def test_duty_sensitivity_signs(d_cluster, timeline):
    """Ambiance plus chaude : η augmente ; consigne plus haute : η diminue"""
    d_ambient, d_setpoint = duty_sensitivities(d_cluster, timeline, timeline.pieces[0], -0.5, (AMBIENT, 25.0))
    assert d_ambient > 0.0
    assert d_setpoint < 0.0


def test_gaussian_inputs_have_no_odd_cumulants(d_cluster, timeline, uncertain):
    cumulants = deviation_cumulants([d_cluster], [timeline], uncertain, -0.5)
    assert cumulants.order == 6
    assert cumulants.mean == 0.0
    assert cumulants.variance > 0.0
    assert cumulants.kappa(3) == 0.0
    assert cumulants.kappa(5) == 0.0


def test_uncertain_distribution_after_shift(d_cluster, timeline, uncertain):
    distribution = power_distribution([d_cluster], [timeline], uncertain, 1.5)
    assert not distribution.is_degenerate
    assert float(distribution.cdf(distribution.support[1])) == pytest.approx(1.0)
    assert 0.0 < distribution.mean < baseline_power([d_cluster], [timeline])


def test_all_off_piece_has_no_spread(d_cluster, timeline, uncertain):
    """τ = 20 min : flotte D* à l'arrêt, ni puissance ni variance propagée"""
    distribution = power_distribution([d_cluster], [timeline], uncertain, 20.0 / 60.0)
    assert distribution.mean == pytest.approx(0.0, abs=0.01)
    assert distribution.cumulants.std == pytest.approx(0.0, abs=0.01)


def test_piece_duties_stay_inside_their_interval(d_cluster, timeline, uncertain):
    """τ = 60 min : la rampe n'est pas prolongée au-delà de T_on_new, P̄ ≤ η_max·Σp"""
    eta_max = timeline.new_times[0] / sum(timeline.base_times)
    distribution = power_distribution([d_cluster], [timeline], uncertain, 1.0)
    assert distribution.mean <= eta_max * 500.0 + 1e-6
    assert distribution.mean > 0.9 * eta_max * 500.0


def test_cumulants_scale_with_fleet_power(d_cluster, timeline):
    """Puissance multipliée par s : κ_v multiplié par s^v"""
    spec = UncertaintySpec.constant_ambient(AMBIENT, ambient_dev=ParamDistribution.uniform(-1.0, 1.0),
                                            setpoint_dev=ParamDistribution.uniform(-0.5, 0.5))
    base = deviation_cumulants([d_cluster], [timeline], spec, 1.5)
    scaled = deviation_cumulants([d_cluster.scaled(3.0)], [timeline], spec, 1.5)
    for v in (2, 4, 6):
        assert scaled.kappa(v) == pytest.approx(3.0 ** v * base.kappa(v), rel=1e-9)


def test_cumulant_shape_follows_ambient_deviation(d_cluster, timeline):
    """ΔP = A·Δθa : κ_4/κ_2² de ΔP égale celui de U(−1, 1), soit −6/5"""
    spec = UncertaintySpec.constant_ambient(AMBIENT, ambient_dev=ParamDistribution.uniform(-1.0, 1.0),
                                            setpoint_dev=ParamDistribution.constant(0.0))
    cumulants = deviation_cumulants([d_cluster], [timeline], spec, -0.5)
    assert cumulants.kappa(4) / cumulants.variance ** 2 == pytest.approx(-1.2, rel=1e-9)
    assert cumulants.kappa(6) / cumulants.variance ** 3 == pytest.approx((16.0 / 63.0) / (1.0 / 3.0) ** 3,
                                                                         rel=1e-9)
