import json

import numpy as np
import pytest

from imcf_lab.errors import WindowError
from imcf_lab.harness import (
    CSV_COLUMNS,
    DeclaredBounds,
    check_class_membership,
    check_coordinate_compatibility,
    emit,
    run_sequence,
    table_rows,
    w12_normal_ricci,
)
from imcf_lab.imcf import run
from imcf_lab.scenario import scenario_from_dict
from imcf_lab.surface import make_graph

RBAR = float(np.arcsinh(1.0))

FAST = {"T": 0.25, "dt": 2.5e-3, "grid": {"n_theta": 16, "n_phi": 32},
        "checks": {"mass_at_infinity": False, "compat": False}}


def _fast_scenario(**over):
    doc = {"id": "fast", "mode": "PMT", "family": "combined",
           "epsilons": [0.1, 0.0], **FAST}
    doc.update(over)
    return scenario_from_dict(doc)


def test_class_membership_hyperbolic_round(hyp_round_track):
    rep = check_class_membership(hyp_round_track)
    assert rep.passed
    assert abs(rep.H_max - 2 * np.sqrt(2.0)) < 1e-9
    assert abs(rep.mH0) < 1e-12
    assert rep.r0_ok and rep.h_positive and rep.mH0_nonneg
    assert rep.I0_declared is None


def test_class_membership_adss(adss_round_track):
    rep = check_class_membership(adss_round_track)
    assert rep.passed
    assert abs(rep.mH0 - 1.0) < 1e-10
    assert abs(rep.r0 - 2.0) < 1e-12


def test_class_membership_flags_negative_mass(hyperbolic, grid32):
    surf = make_graph(hyperbolic, grid32, RBAR, "p2", 0.05)
    track = run(hyperbolic, surf, T=0.05, dt=1e-3)
    rep = check_class_membership(track)
    assert rep.mH0 < 0
    assert not rep.mH0_nonneg
    assert not rep.passed


def test_class_membership_declared_bounds(hyp_round_track):
    ok = check_class_membership(
        hyp_round_track, DeclaredBounds(H0=1.0, H1=3.0, A1=3.0, I0=0.5)
    )
    assert ok.within_declared and ok.passed
    assert ok.I0_declared == 0.5
    bad = check_class_membership(hyp_round_track, DeclaredBounds(H1=2.0))
    assert bad.within_declared is False
    assert not bad.passed


def test_w12_normal_ricci_closed_form(hyp_round_track):
    """Rc(nu,nu) = -2 on hyperbolic round: norm = sqrt(16 pi (b - a))."""
    val = w12_normal_ricci(hyp_round_track, 0.0, 0.5)
    assert abs(val - np.sqrt(16 * np.pi * 0.5)) < 1e-9


def test_w12_window_too_short(hyp_round_track):
    with pytest.raises(WindowError):
        w12_normal_ricci(hyp_round_track, 0.0, 0.5e-3)


def test_compat_report_round(hyp_round_track):
    rep = check_coordinate_compatibility(hyp_round_track, 0.0, 0.5)
    assert rep.C3 < 1e-10
    assert rep.grad_ok
    assert rep.ratios_ok is None  # window never reaches t_star = 4
    assert np.isfinite(rep.w12_ricci)
    assert rep.passed
    assert rep.diam_max < 2 * np.pi
    # in exact hyperbolic space the tangent sectional curvature is exactly -1
    assert rep.k12_floor_ok
    assert abs(rep.k12_min0 + 1.0) < 1e-12


def test_compat_window_error(hyp_round_track):
    with pytest.raises(WindowError):
        check_coordinate_compatibility(hyp_round_track, 0.2, 5.0)


def test_run_sequence_rows_and_columns(tmp_path):
    scn = _fast_scenario()
    report = run_sequence(scn)
    assert [r.eps for r in report.rows] == [0.1, 0.0]
    assert all(r.ok for r in report.rows)
    recs = table_rows(report)
    assert len(recs) == 2 * len(scn.resolved_t_samples())
    assert list(recs[0]) == list(CSV_COLUMNS)


def test_run_sequence_failure_isolation():
    # amplitude 0.9 drives H <= 0 at t = 0; later rows must still run
    scn = _fast_scenario(family="ellipsoid", epsilons=[0.9, 0.01])
    report = run_sequence(scn)
    assert not report.rows[0].ok
    assert "CurvatureError" in report.rows[0].error
    assert report.rows[1].ok
    assert report.any_failed


def test_emit_csv_json_plot(tmp_path):
    scn = _fast_scenario()
    report = run_sequence(scn)
    paths = emit(report, out_dir=tmp_path)
    names = {p.name for p in paths}
    assert names == {"fast.csv", "fast.json", "fast.gp"}
    csv_text = (tmp_path / "fast.csv").read_text()
    lines = csv_text.strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert len(lines) == 1 + 2 * len(scn.resolved_t_samples())
    doc = json.loads((tmp_path / "fast.json").read_text())
    assert doc["schema"] == "imcf-lab-report/1"
    assert len(doc["rows"]) == 2
    assert "fast.csv" in (tmp_path / "fast.gp").read_text()


def test_emit_deterministic(tmp_path):
    scn = _fast_scenario()
    a = emit(run_sequence(scn), out_dir=tmp_path / "a")
    b = emit(run_sequence(scn), out_dir=tmp_path / "b")
    assert (tmp_path / "a" / "fast.csv").read_bytes() == (
        tmp_path / "b" / "fast.csv"
    ).read_bytes()
    assert (tmp_path / "a" / "fast.json").read_bytes() == (
        tmp_path / "b" / "fast.json"
    ).read_bytes()


def test_plot_script_renders(tmp_path):
    """Smoke: the emitted gnuplot script runs against its CSV when gnuplot exists."""
    import shutil
    import subprocess

    scn = _fast_scenario()
    emit(run_sequence(scn), out_dir=tmp_path)
    script = tmp_path / "fast.gp"
    assert "fast.csv" in script.read_text()
    gnuplot = shutil.which("gnuplot")
    if gnuplot is None:
        pytest.skip("gnuplot not installed")
    subprocess.run([gnuplot, script.name], cwd=tmp_path, check=True, timeout=60)
    assert (tmp_path / "fast.png").exists()


def test_run_sequence_workers_match_serial():
    scn = _fast_scenario()
    serial = run_sequence(scn, workers=1)
    parallel = run_sequence(scn, workers=2)
    for r1, r2 in zip(serial.rows, parallel.rows):
        assert r1.eps == r2.eps
        assert r1.mH_T == r2.mH_T
        assert r1.distances == r2.distances


def test_monotone_stability_columns_fast():
    scn = _fast_scenario(epsilons=[0.1, 0.05, 0.0])
    report = run_sequence(scn)
    mh = [r.mH_T for r in report.rows]
    l2 = [r.distances["hat_model"] for r in report.rows]
    ca = [r.c_alpha for r in report.rows]
    assert mh[0] > mh[1] > abs(mh[2])
    assert l2[0] > l2[1] > l2[2]
    assert ca[0] > ca[1] >= ca[2]
