import numpy as np
import pytest

from imcf_lab.comparison import (
    LABELS,
    assemble,
    c_alpha_distance_to_round,
    default_time_indices,
    distance_chain,
    gauss_deviation,
    l2_distance,
    model_mean_curvature_sq,
)
from imcf_lab.errors import ParamError, ShapeError
from imcf_lab.imcf import run
from imcf_lab.surface import geometry, make_graph, make_round

RBAR = float(np.arcsinh(1.0))


def test_model_mean_curvature_values():
    # frozen: unit sphere in hyperbolic space has H^2 = 8
    assert abs(model_mean_curvature_sq(0.0, 1.0, 0.0) - 8.0) < 1e-14
    # horizon-free asymptotics: H^2 -> 4
    assert abs(model_mean_curvature_sq(40.0, 1.0, 0.0) - 4.0) < 1e-12
    # horizon case: r0 = 1, m = 0.5 gives H^2 = 4 at t = 0
    assert abs(model_mean_curvature_sq(0.0, 1.0, 0.5) - 4.0) < 1e-14


def test_hat_equals_model_on_hyperbolic_round(hyp_round_track):
    hat = assemble(hyp_round_track, "hat")
    model = assemble(hyp_round_track, "hyperbolic_model")
    assert np.max(np.abs(hat.lapse2 - model.lapse2)) < 1e-12
    assert np.max(np.abs(hat.g11 - model.g11)) < 1e-11
    assert np.max(np.abs(hat.g22 - model.g22)) < 1e-11


def test_hat_equals_model_on_adss_round(adss_round_track):
    hat = assemble(adss_round_track, "hat")
    model = assemble(adss_round_track, "adss_model", m=1.0)
    assert np.max(np.abs(hat.lapse2 - model.lapse2)) < 1e-11
    assert np.max(np.abs(hat.g11 - model.g11)) < 1e-10


def test_g1_equals_hat_on_round(hyp_round_track):
    hat = assemble(hyp_round_track, "hat")
    g1 = assemble(hyp_round_track, "g1")
    assert np.max(np.abs(hat.lapse2 - g1.lapse2)) < 1e-12


def test_rpi_labels_need_positive_mass(hyp_round_track):
    with pytest.raises(ParamError):
        assemble(hyp_round_track, "g3_rpi")
    with pytest.raises(ParamError):
        assemble(hyp_round_track, "adss_model", m=-1.0)


def test_unknown_label_rejected(hyp_round_track):
    with pytest.raises(ValueError):
        assemble(hyp_round_track, "g7")


def test_g2_prime_alias_and_alt_label(hyp_round_track):
    g2p = assemble(hyp_round_track, "g2'")
    assert g2p.label == "g2p"
    alt = assemble(hyp_round_track, "g3_alt")
    t = alt.times[:, None, None]
    assert np.max(np.abs(alt.lapse2 - 0.25 * np.exp(t))) < 1e-12


def test_l2_distance_zero_and_symmetry(hyp_round_track):
    hat = assemble(hyp_round_track, "hat")
    g3a = assemble(hyp_round_track, "g3_alt")
    model = assemble(hyp_round_track, "hyperbolic_model")
    assert l2_distance(hat, hat, model, hyp_round_track) == 0.0
    d_ab = l2_distance(hat, g3a, model, hyp_round_track)
    d_ba = l2_distance(g3a, hat, model, hyp_round_track)
    assert d_ab > 0.0  # distinct metrics separate
    assert d_ab == pytest.approx(d_ba, rel=1e-14)


def test_l2_distance_shape_error(hyp_round_track):
    hat = assemble(hyp_round_track, "hat")
    idx = default_time_indices(hyp_round_track)[:-10]
    short = assemble(hyp_round_track, "g1", time_indices=idx)
    with pytest.raises(ShapeError):
        l2_distance(hat, short, hat, hyp_round_track)


def test_chain_vanishes_on_exact_models(hyp_round_track, adss_round_track):
    for track, mode, m in ((hyp_round_track, "PMT", None), (adss_round_track, "RPI", 1.0)):
        chain = distance_chain(track, mode=mode, m=m)
        for key, value in chain.items():
            assert value < 1e-20, (key, value)


def test_triangle_chain_inequality(hyperbolic, grid32):
    surf = make_graph(hyperbolic, grid32, RBAR, "p2", 0.05)
    track = run(hyperbolic, surf, T=0.3, dt=1e-3)
    chain = distance_chain(track, mode="PMT")
    lhs = np.sqrt(chain["hat_model"])
    rhs = (
        np.sqrt(chain["hat_g1"])
        + np.sqrt(chain["g1_g2"])
        + np.sqrt(chain["g2_g3"])
        + np.sqrt(chain["g3_model"])
    )
    assert lhs <= 1.1 * rhs


def test_all_labels_assemble(hyp_round_track):
    for label in LABELS:
        m = 0.3 if label in ("g3_rpi", "adss_model") else None
        grid = assemble(hyp_round_track, label, m=m)
        assert np.all(np.isfinite(grid.lapse2)) and np.all(grid.lapse2 > 0)
        assert np.all(grid.g11 > 0)


def test_lapse_degenerates_at_horizon(hyp_round_track):
    # r0 = 1 with m = 1 puts the model start exactly on the horizon
    from imcf_lab.errors import LapseError

    with pytest.raises(LapseError):
        assemble(hyp_round_track, "adss_model", m=1.0)


def test_c_alpha_zero_for_round(hyp_round_track):
    geom0 = hyp_round_track.snapshot_geometry(0)
    assert c_alpha_distance_to_round(geom0, r0=1.0) < 1e-12


def test_c_alpha_constant_offset(hyperbolic, grid32):
    """Fiber (r0^2 + eta) sigma sits at distance eta (zero seminorm)."""
    eta = 0.3
    r_off = float(hyperbolic.radius_from_area_radius(np.sqrt(1.0 + eta)))
    geom = geometry(hyperbolic, make_round(hyperbolic, r_off, grid32))
    assert abs(c_alpha_distance_to_round(geom, r0=1.0) - eta) < 1e-10


def test_c_alpha_decreases_with_amplitude(hyperbolic, grid32):
    vals = []
    for amp in (0.05, 0.025, 0.0125):
        geom = geometry(hyperbolic, make_graph(hyperbolic, grid32, RBAR, "p2", amp))
        vals.append(c_alpha_distance_to_round(geom, r0=1.0))
    assert vals[0] > vals[1] > vals[2] > 0


def test_c_alpha_alpha_range(hyp_round_track):
    geom0 = hyp_round_track.snapshot_geometry(0)
    with pytest.raises(ValueError):
        c_alpha_distance_to_round(geom0, r0=1.0, alpha=1.0)


def test_gauss_deviation_round_is_floor(hyp_round_track):
    geom0 = hyp_round_track.snapshot_geometry(0)
    assert gauss_deviation(geom0, 1.0, 0.0) < 1e-20


def test_gauss_deviation_quadratic_in_amplitude(hyperbolic, grid32):
    """Quadrupole data: deviation scales ~quadratically (quarters +-30%)."""
    g_big = geometry(hyperbolic, make_graph(hyperbolic, grid32, RBAR, "p2", 0.05))
    g_small = geometry(hyperbolic, make_graph(hyperbolic, grid32, RBAR, "p2", 0.025))
    ratio = gauss_deviation(g_big, 1.0, 0.0) / gauss_deviation(g_small, 1.0, 0.0)
    assert 2.8 < ratio < 5.2
