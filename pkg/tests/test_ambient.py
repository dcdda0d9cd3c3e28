import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from imcf_lab.ambient import (
    AdSSProfile,
    HyperbolicProfile,
    MassAspectProfile,
    TabulatedProfile,
    curvature_sample,
    horizon_radius,
    validate_profile,
    warp_eval,
)
from imcf_lab.errors import DomainError, ProfileError

from .oracles import fd_warp_curvature


def test_hyperbolic_warp_at_unit_area_radius(hyperbolic):
    lam, dlam, d2lam = warp_eval(hyperbolic, np.arcsinh(1.0))
    assert abs(lam - 1.0) < 1e-14
    assert abs(dlam - np.sqrt(2.0)) < 1e-14
    assert abs(d2lam - 1.0) < 1e-14


def test_adss_warp_at_area_radius_two(adss1):
    # differentiate lambda'^2 = 1 + lambda^2 - 2m/lambda by hand:
    # lambda'' = lambda + m/lambda^2 -> 2.25 at lambda = 2, m = 1
    r = float(adss1.radius_from_area_radius(2.0))
    lam, dlam, d2lam = warp_eval(adss1, r)
    assert abs(lam - 2.0) < 1e-11
    assert abs(dlam - 2.0) < 1e-11
    assert abs(d2lam - 2.25) < 1e-11


def test_domain_error_below_floor(hyperbolic):
    with pytest.raises(DomainError):
        warp_eval(hyperbolic, 0.0)
    with pytest.raises(DomainError):
        warp_eval(hyperbolic, 1e3)


@settings(max_examples=40, deadline=None)
@given(r=st.floats(0.2, 10.0))
def test_hyperbolic_curvature_constants(r):
    c = curvature_sample(HyperbolicProfile(), r)
    assert abs(c.R + 6.0) < 1e-12
    assert abs(c.Rc_nn + 2.0) < 1e-12
    assert abs(c.K12 + 1.0) < 1e-12


@settings(max_examples=25, deadline=None)
@given(m=st.floats(0.05, 2.0), u=st.floats(0.1, 0.9))
def test_adss_curvature_closed_forms(m, u):
    prof = AdSSProfile(m, s_domain=(1.1 * horizon_radius(m), 20.0))
    lo, hi = prof.s_domain
    s = lo + u * (hi - lo)
    r = float(prof.radius_from_area_radius(s))
    c = curvature_sample(prof, r)
    assert abs(c.R + 6.0) < 1e-10
    assert abs((c.Rc_nn + 2.0) - (-2.0 * m / s**3)) < 1e-10
    assert abs((c.K12 + 1.0) - (2.0 * m / s**3)) < 1e-10


def test_adss_example_values(adss1):
    # frozen: Rc_nn = -2 - 2m/lam^3 = -2.25, K12 = -1 + 2m/lam^3 = -0.75 at lam = 2
    r = float(adss1.radius_from_area_radius(2.0))
    c = curvature_sample(adss1, r)
    assert abs(c.Rc_nn + 2.25) < 1e-11
    assert abs(c.K12 + 0.75) < 1e-11
    assert abs(c.R + 6.0) < 1e-11


@settings(max_examples=20, deadline=None)
@given(m=st.floats(0.05, 1.5), u=st.floats(0.05, 0.95))
def test_sectional_identity_every_profile(m, u):
    """K12 + 1 = (R + 6)/2 - (Rc_nn + 2) pointwise."""
    prof = AdSSProfile(m, s_domain=(1.1 * horizon_radius(m), 15.0))
    lo, hi = prof.r_domain
    r = lo + u * (hi - lo)
    c = curvature_sample(prof, r)
    assert abs((c.K12 + 1.0) - (0.5 * (c.R + 6.0) - (c.Rc_nn + 2.0))) < 1e-12


def test_constant_mass_aspect_matches_adss():
    m0 = 0.7
    prof = MassAspectProfile(
        lambda s: np.full_like(np.asarray(s, float), m0),
        lambda s: np.zeros_like(np.asarray(s, float)),
        (1.2, 10.0),
    )
    r = np.linspace(0.1, prof.r_domain[1] - 0.1, 64)
    c = curvature_sample(prof, r)
    assert np.max(np.abs(c.R + 6.0)) < 1e-10


def test_mass_aspect_scalar_curvature_vs_fd_oracle():
    """R = -6 + 4 m'(s)/s^2, cross-checked by a finite-difference warp oracle."""
    m_f = lambda s: 0.2 * np.tanh((s - 1.0) / 0.8)
    dm_f = lambda s: (0.2 / 0.8) / np.cosh((s - 1.0) / 0.8) ** 2
    prof = MassAspectProfile(m_f, dm_f, (1.1, 8.0))
    lo, hi = prof.r_domain
    for r in (lo + 0.2 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.8 * (hi - lo)):
        s = prof.warp(r)[0]
        expected = -6.0 + 4.0 * dm_f(s) / s**2
        c = curvature_sample(prof, r)
        assert abs(c.R - expected) < 1e-9
        # oracle step balances truncation against the warp-spline noise
        assert abs(fd_warp_curvature(prof, r, h=2e-3) - expected) < 1e-4


def test_validate_profile_hyperbolic_passes(hyperbolic):
    rep = validate_profile(hyperbolic)
    assert rep.passed
    assert abs(rep.min_R + 6.0) < 1e-11


def test_validate_profile_monotone_mass_passes():
    prof = MassAspectProfile.from_points(
        [0.8, 1.5, 2.5, 4.0, 8.0], [0.0, 0.05, 0.12, 0.2, 0.25]
    )
    rep = validate_profile(prof)
    assert rep.passed
    assert rep.min_R >= -6.0 - rep.tol


def test_validate_profile_flags_decreasing_mass():
    prof = MassAspectProfile.from_points(
        [0.8, 1.5, 2.5, 4.0, 8.0], [0.2, 0.15, 0.05, 0.1, 0.2]
    )
    rep = validate_profile(prof)
    assert not rep.r_floor_ok
    assert rep.min_R < -6.0 - rep.tol


def test_spline_derivative_fd_consistency(adss1):
    """Centered differences of lambda converge to lambda' at O(h^2)."""
    r0 = 1.0
    errs = []
    for h in (1e-2, 5e-3):
        lam_p = (adss1.warp(r0 + h)[0] - adss1.warp(r0 - h)[0]) / (2 * h)
        errs.append(abs(lam_p - adss1.warp(r0)[1]))
    order = np.log2(errs[0] / errs[1])
    assert order > 1.9


def test_tabulated_profile_reproduces_hyperbolic():
    r = np.linspace(0.3, 3.0, 1600)
    prof = TabulatedProfile(r, np.sinh(r))
    c = curvature_sample(prof, 1.5)
    assert abs(c.R + 6.0) < 1e-5
    assert abs(c.Rc_nn + 2.0) < 1e-5


def test_tabulated_profile_rejects_bad_data():
    r = np.linspace(0.3, 3.0, 10)
    lam = np.sinh(r)
    lam[5] = lam[4] - 0.1  # not increasing
    with pytest.raises(ProfileError):
        TabulatedProfile(r, lam)


def test_mass_function_recovers_adss_mass(adss1):
    s = np.array([1.5, 2.0, 4.0, 8.0])
    assert np.max(np.abs(adss1.mass_function(s) - 1.0)) < 1e-9


def test_horizon_radius_cubic():
    # s^3 + s = 2m with m = 1 has root s = 1
    assert abs(horizon_radius(1.0) - 1.0) < 1e-12


def test_adss_requires_positive_mass():
    with pytest.raises(ProfileError):
        AdSSProfile(-0.5)


def test_domain_crossing_horizon_rejected():
    with pytest.raises(ProfileError):
        AdSSProfile(1.0, s_domain=(0.5, 10.0))
