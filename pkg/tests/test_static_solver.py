import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from msgkit.errors import ConservationViolation, DomainError, RegimeError
from msgkit.model import FieldState, ModelParams
from msgkit.static_solver import (
    EQUILIBRIUM,
    PERIODIC,
    SEPARATRIX_KINK,
    STEP_LIKE,
    SolverConfig,
    classify_pressure,
    integrate,
    kink_energy_quadrature,
    kink_position_quadrature,
    kink_profile,
    launch_slope,
    rk4_run,
    rk4_step,
)


def test_sine_gordon_kink_energy_and_shape():
    prof = kink_profile(ModelParams(1, 0.0))
    assert prof.energy == pytest.approx(8.0, abs=1e-6)
    assert prof.charge == 1
    assert np.max(np.abs(prof.phi - 4 * np.arctan(np.exp(prof.x)))) < 1e-6


@pytest.mark.parametrize("n,eps", [(2, 1.0), (3, 10.0), (4, 0.1), (6, 10.0), (1, 10.0)])
def test_kink_energy_matches_quadrature(n, eps):
    p = ModelParams(n, eps)
    assert kink_profile(p).energy == pytest.approx(kink_energy_quadrature(p), rel=1e-6)


def test_kink_position_quadrature_matches_profile():
    p = ModelParams(3, 10.0)
    prof = kink_profile(p)
    for i in range(0, prof.x.size, max(1, prof.x.size // 25)):
        if 1e-3 < prof.phi[i] < 2 * math.pi - 1e-3:
            assert kink_position_quadrature(p, prof.phi[i]) == pytest.approx(prof.x[i], abs=1e-5)


def test_kink_position_domain():
    p = ModelParams(2, 1.0)
    assert kink_position_quadrature(p, math.pi) == 0.0
    with pytest.raises(DomainError):
        kink_position_quadrature(p, 7.0)


def test_classification_regimes():
    p = ModelParams(4, 10.0)
    assert classify_pressure(p, -1.0) == PERIODIC
    assert classify_pressure(p, 1.0) == STEP_LIKE
    assert classify_pressure(p, 0.0) == SEPARATRIX_KINK
    assert classify_pressure(p, -2.0) == EQUILIBRIUM
    with pytest.raises(RegimeError):
        classify_pressure(p, -2.5)


def test_launch_slope_examples():
    assert launch_slope(ModelParams(4, 10.0), -2.0) == 0.0
    assert launch_slope(ModelParams(3, 10.0), -17.5) == pytest.approx(3.0)


def test_integrate_reports_subkinks():
    p = ModelParams(3, 10.0)
    assert integrate(p, launch_slope(p, -17.5)).classification.subkinks == 0
    assert integrate(p, launch_slope(p, -0.875)).classification.subkinks == 3


def test_negative_slope_is_mirror_image():
    p = ModelParams(3, 1.0)
    cfg = SolverConfig(x_max=10.0)
    a = integrate(p, 1.3, cfg)
    b = integrate(p, -1.3, cfg)
    assert b.mirrored and not a.mirrored
    assert np.allclose(b.phi, 2 * math.pi - a.phi, atol=1e-12)
    assert np.allclose(b.slope, -a.slope, atol=1e-12)


def test_conservation_violation_raised():
    with pytest.raises(ConservationViolation):
        integrate(ModelParams(6, 10.0), 3.0, SolverConfig(step=0.2, x_max=20.0))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(step=0.0)
    with pytest.raises(ValueError):
        SolverConfig(x_max=-1.0)


def test_rk4_step_matches_run():
    p = ModelParams(2, 0.5)
    st_ = rk4_step(p, FieldState(0.0, math.pi, 0.7), 1e-2)
    phi, s = rk4_run(p, math.pi, 0.7, 1e-2, 1)
    assert st_.phi == phi[1] and st_.slope == s[1]


def test_one_orbit_drift_is_fourth_order():
    # bounded in-orbit error of RK4 scales as h^4
    p = ModelParams(3, 10.0)
    s0 = launch_slope(p, -1.4)
    drifts = []
    for h in (4e-3, 2e-3):
        phi, s = rk4_run(p, math.pi, s0, h, int(round(2.5 / h)))
        pr = 0.5 * s**2 - (1 + p.epsilon - np.cos(phi) - p.epsilon * np.cos(3 * phi))
        drifts.append(np.max(np.abs(pr - pr[0])))
    assert 12 <= drifts[0] / drifts[1] <= 20


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 6), st.floats(0.0, 10.0), st.floats(0.05, 0.95))
def test_conservation_in_periodic_band(n, eps, frac):
    p = ModelParams(n, eps)
    traj = integrate(p, launch_slope(p, -frac * p.v_center), SolverConfig(x_max=30.0))
    assert traj.drift <= 1e-6
    assert traj.classification.kind == PERIODIC
