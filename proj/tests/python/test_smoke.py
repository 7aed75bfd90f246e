import json
import math

import pytest

import thinfilm


def test_regime_classification():
    assert thinfilm.classify_regime(thinfilm.Problem("1", "3")) == "Critical"
    assert thinfilm.classify_regime(thinfilm.Problem("0.1", "2.1")) == "Critical"
    assert thinfilm.classify_regime(thinfilm.Problem("1", "1")) == "Subcritical"
    flags = thinfilm.theorem_flags(thinfilm.Problem("1", "3"))
    assert flags == {"existence_ok": True, "fsp_ok": True, "blowup_ok": True}


def test_growth_rate_and_critical_mass():
    p = thinfilm.Problem("1", "1")
    assert thinfilm.growth_rate(math.sqrt(0.5), 1.0, p) == pytest.approx(0.25, rel=1e-14)
    assert thinfilm.band_edge(1.0, p) == pytest.approx(1.0)
    assert thinfilm.critical_mass(thinfilm.Problem("1", "3"), 0.1) == pytest.approx(math.sqrt(0.6), rel=1e-12)


def test_energy_of_constant():
    p = thinfilm.Problem("1", "3", a=0.5, nx=16)
    # D0(z) = z^4 / 12 for m - n = 2
    assert thinfilm.energy([2.0] * 16, p) == pytest.approx(-16.0 / 12.0, rel=1e-14)


def test_errors_surface_as_exceptions():
    with pytest.raises(thinfilm.ThinfilmError):
        thinfilm.critical_mass(thinfilm.Problem("1", "2"))
    with pytest.raises(thinfilm.ThinfilmError, match="problem.n"):
        thinfilm.parse_config("problem.m = 1\n")


def test_bihari_example():
    value, blow = thinfilm.bihari_bound(2.0, 1.0, 3.0, 0.1)
    assert value == pytest.approx(0.05 ** -0.5, rel=1e-12)
    assert blow == pytest.approx(0.125)


def test_regime_command(tmp_path):
    cfg = tmp_path / "cell.cfg"
    cfg.write_text(
        "problem.n = 1\nproblem.m = 3\n"
        "regime.n_min = 1\nregime.n_max = 1\nregime.n_step = 1\n"
        "regime.m_min = 3\nregime.m_max = 3\nregime.m_step = 1\n"
    )
    status, _ = thinfilm.run_command("regime", cfg, out=tmp_path / "out")
    assert status == 0
    rows = (tmp_path / "out" / "regime_map.csv").read_text().splitlines()
    assert rows == ["n,m,regime,existence_ok,fsp_ok,blowup_ok", "1,3,Critical,true,true,true"]


def test_simulate_constancy(tmp_path):
    cfg = tmp_path / "const.cfg"
    cfg.write_text(
        "problem.n = 1\nproblem.m = 1\nproblem.a0 = 1\nproblem.a1 = 0.5\nproblem.a = 0.5\nproblem.nx = 32\n"
        "solver.t_end = 0.01\nsolver.dt_init = 1e-3\ninitial.kind = constant\ninitial.C = 1\n"
    )
    status, log = thinfilm.run_command("simulate", cfg, out=tmp_path / "sim")
    assert status == 0, log
    report = json.loads((tmp_path / "sim" / "report.json").read_text())
    assert report["constancy"]["verdict"] == "PASS"
