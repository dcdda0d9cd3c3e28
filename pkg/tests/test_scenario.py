import json

import numpy as np
import pytest

from imcf_lab.ambient import validate_profile
from imcf_lab.errors import ParseError, ValidationError
from imcf_lab.mass import hawking_mass
from imcf_lab.scenario import load_scenario, scenario_from_dict
from imcf_lab.surface import geometry


def test_minimal_scenario_defaults():
    scn = scenario_from_dict({"id": "minimal", "profile": {"kind": "hyperbolic"}})
    assert scn.n_theta == 64 and scn.n_phi == 128
    assert scn.dt == 1e-3
    assert scn.T == 2.0
    assert scn.resolved_t_samples() == [0.0, 0.5, 1.0, 1.5, 2.0]
    rows = scn.rows()
    assert len(rows) == 1 and rows[0].eps is None


def test_unknown_top_level_key_rejected():
    with pytest.raises(ParseError, match="bogus"):
        scenario_from_dict({"id": "x", "bogus": 1})


def test_unknown_nested_keys_rejected():
    with pytest.raises(ParseError, match="extra"):
        scenario_from_dict({"id": "x", "surface": {"type": "round", "extra": 1}})
    with pytest.raises(ParseError, match="whatever"):
        scenario_from_dict({"id": "x", "checks": {"whatever": True}})


def test_unknown_profile_kind_named():
    with pytest.raises(ParseError, match="nope"):
        scenario_from_dict({"id": "x", "profile": {"kind": "nope"}}).rows()


def test_epsilons_strictly_decreasing():
    with pytest.raises(ValidationError, match="strictly decreasing"):
        scenario_from_dict({"id": "x", "epsilons": [0.1, 0.1]})


def test_rpi_needs_mass():
    with pytest.raises(ValidationError, match="target mass"):
        scenario_from_dict({"id": "x", "mode": "RPI", "epsilons": [0.1, 0.05]})


def test_grid_must_be_power_of_two():
    with pytest.raises(ValidationError, match="power of two"):
        scenario_from_dict({"id": "x", "grid": {"n_theta": 60, "n_phi": 128}})


def test_dt_must_divide_T():
    with pytest.raises(ValidationError, match="divide"):
        scenario_from_dict({"id": "x", "T": 1.0, "dt": 3e-4})


def test_profile_and_family_exclusive():
    with pytest.raises(ValidationError, match="not both"):
        scenario_from_dict(
            {"id": "x", "profile": {"kind": "hyperbolic"}, "epsilons": [0.1, 0.05]}
        )


def test_load_scenario_bad_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(ParseError):
        load_scenario(p)


def test_load_scenario_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "absent.json")


def test_shipped_scenarios_parse_and_validate():
    for name in ("pmt_sweep", "rpi_sweep", "hyperbolic_round", "adss_round",
                 "ellipsoid_hyperbolic"):
        scn = load_scenario(f"scenarios/{name}.json")
        scn.validate()


def test_pmt_family_rows_monotone_floor():
    scn = scenario_from_dict(
        {"id": "pmt", "mode": "PMT", "family": "combined",
         "epsilons": [0.1, 0.05, 0.0], "T": 1.0, "dt": 1e-3,
         "grid": {"n_theta": 16, "n_phi": 32}}
    )
    rows = scn.rows()
    assert [r.eps for r in rows] == [0.1, 0.05, 0.0]
    masses = []
    for row in rows:
        assert validate_profile(row.profile).passed
        masses.append(hawking_mass(geometry(row.profile, row.surface0)))
    # initial Hawking mass positive and decreasing with eps; zero at eps = 0
    assert masses[0] > masses[1] > abs(masses[2])
    assert rows[2].profile.kind == "hyperbolic"


def test_rpi_family_rows():
    scn = scenario_from_dict(
        {"id": "rpi", "mode": "RPI", "m": 0.5, "epsilons": [0.1, 0.0],
         "T": 1.0, "dt": 1e-3, "grid": {"n_theta": 16, "n_phi": 32}}
    )
    rows = scn.rows()
    assert rows[1].profile.kind == "adss"
    for row in rows:
        assert validate_profile(row.profile).passed
    m0 = hawking_mass(geometry(rows[0].profile, rows[0].surface0))
    assert 0.35 < m0 < 0.5  # m - eps * rho(s0) with rho(s0) ~ 1


def test_explicit_mass_aspect_points_profile():
    scn = scenario_from_dict(
        {"id": "pts", "profile": {"kind": "mass_aspect",
         "points": {"s": [0.8, 1.5, 3.0, 6.0], "m": [0.0, 0.1, 0.2, 0.22]}},
         "T": 1.0, "dt": 1e-3, "grid": {"n_theta": 16, "n_phi": 32}}
    )
    row = scn.rows()[0]
    assert row.profile.kind == "mass_aspect"
    assert validate_profile(row.profile).passed


def test_scenario_json_roundtrip(tmp_path):
    doc = {"id": "rt", "mode": "PMT", "epsilons": [0.2, 0.1],
           "T": 0.5, "dt": 1e-3, "grid": {"n_theta": 16, "n_phi": 32}}
    p = tmp_path / "rt.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    scn = load_scenario(p)
    assert scn.id == "rt"
    assert len(scn.rows()) == 2
