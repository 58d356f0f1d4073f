import csv
import io
import json
import math

import numpy as np
import pytest

from gravdephase import cli
from gravdephase.dephasing import compose_independent, gaussian_visibility, visibility
from gravdephase.scenario import load_scenario, parse_scenario
from gravdephase.units import CODATA, ELECTRON_VOLT

from test_scenario import MINIMAL, doc


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, obj, name="s.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj, indent=2))
    return str(p)


def read_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


class TestTrace:
    def test_format(self, tmp_path, capsys):
        code, out, _ = run(capsys, "trace", write(tmp_path, MINIMAL))
        assert code == 0
        header, data = read_csv(out)
        assert header == ["t_s", "visibility", "small_time_approx"]
        assert data.shape == (11, 3)
        first = out.splitlines()[1].split(",")
        # 17 significant digits, scientific
        assert all(len(f.split("e")[0].replace(".", "").lstrip("-")) == 17 for f in first)
        s = parse_scenario(MINIMAL)
        np.testing.assert_array_equal(data[:, 1], visibility(s.grouped(), s.geometry, s.grid.times()))

    def test_single_level(self, tmp_path, capsys):
        d = doc(spectrum={"levels": [{"energy_ev": 2.0, "weight": 1.0}]})
        code, out, _ = run(capsys, "trace", write(tmp_path, d))
        assert code == 0
        _, data = read_csv(out)
        np.testing.assert_array_equal(data[:, 1], 1.0)

    def test_two_level_zero(self, tmp_path, capsys):
        t0 = math.pi * CODATA.hbar * CODATA.c**2 / (ELECTRON_VOLT * 9.81 * 1e-6)
        d = doc(grid={"start_s": 0.0, "stop_s": 2 * t0, "count": 201})
        _, out, _ = run(capsys, "trace", write(tmp_path, d))
        _, data = read_csv(out)
        assert data[100, 0] == pytest.approx(t0, rel=1e-14)
        assert data[100, 1] < 1e-12
        assert np.all(data[:100, 1] > 0)

    def test_thermal_cube_gaussian(self, capsys):
        code, out, _ = run(capsys, "trace", "thermal-cube")
        assert code == 0
        header, data = read_csv(out)
        assert header[-1] == "visibility_N"
        s = load_scenario("thermal-cube")
        t_nd = cli._n_dephasing_time(s)
        assert data[0, 0] == pytest.approx(t_nd / 100) and data[-1, 0] == pytest.approx(100 * t_nd)
        early = data[:, 0] <= 0.3 * t_nd
        assert early.sum() > 10
        gauss = gaussian_visibility(data[early, 0], t_nd)
        np.testing.assert_allclose(data[early, 3], gauss, rtol=0.01)
        # oracle: explicit N-th power of the single-mode visibility
        V = lambda t: visibility(s.grouped(), s.geometry, t)
        np.testing.assert_allclose(data[:, 3], compose_independent(V, 1000)(data[:, 0]), rtol=1e-12, atol=1e-300)

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run(capsys, "trace", "thermal-cube", "-o", str(a))[0] == 0
        assert run(capsys, "trace", "thermal-cube", "-o", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(a.read_text().splitlines()) == 201

    def test_lossless_floats(self, tmp_path, capsys):
        _, out, _ = run(capsys, "trace", "two-level")
        _, data = read_csv(out)
        s = load_scenario("two-level")
        np.testing.assert_array_equal(data[:, 0], s.grid.times())


class TestReport:
    def test_single_level(self, tmp_path, capsys):
        d = doc(spectrum={"levels": [{"energy_ev": 2.0, "weight": 1.0}]})
        code, out, _ = run(capsys, "report", write(tmp_path, d))
        rep = json.loads(out)
        assert code == 0
        assert rep["purity_sum"] == 1.0 and rep["lower_bound_log"] == 0.0
        assert rep["t_d_s"] is None

    def test_uniform_three(self, tmp_path, capsys):
        d = doc(spectrum={"uniform": {"count": 3, "spacing_ev": 0.1}}, subsystems=1000)
        _, out, _ = run(capsys, "report", write(tmp_path, d))
        rep = json.loads(out)
        assert rep["lower_bound_log"] == pytest.approx(-1000 * math.log(3), rel=1e-12)
        assert rep["n_subsystem_model"] == "independent-subsystem assumption"
        assert set(rep) >= {"t_d_s", "t_nd_s", "purity_sum", "lower_bound_log"}

    def test_cube_with_bath(self, capsys):
        _, out, _ = run(capsys, "report", "thermal-cube")
        rep = json.loads(out)
        assert rep["n_crossover_rendered"] == "1.2e-5 cm^-3"
        assert rep["gravitational_dominates"] is False
        assert rep["n_crossover_per_cm3"] == pytest.approx(rep["n_crossover_per_m3"] * 1e-6)
        assert rep["t_coll_s"] < rep["t_nd_s"]

    def test_non_equilibrium_bath(self, tmp_path, capsys):
        d = doc(bath={"density_per_cm3": 1e-9, "sigma_cm2": 1e-14, "mass_ev_c2": 14e9, "temperature_k": 300.0})
        _, out, _ = run(capsys, "report", write(tmp_path, d))
        rep = json.loads(out)
        assert rep["gravitational_dominates"] == (rep["t_nd_s"] < rep["t_coll_s"])
        assert "t_nd_equilibrium_s" not in rep

    def test_output_file(self, tmp_path, capsys):
        out = tmp_path / "r.json"
        assert run(capsys, "report", "two-level", "-o", str(out))[0] == 0
        assert json.loads(out.read_text())["purity_sum"] == 0.5


class TestPaperRepro:
    def test_values(self, capsys):
        code, out, _ = run(capsys, "paper-repro")
        rep = json.loads(out)
        assert code == 0
        assert rep["pass"] and rep["codata_check"]["pass"] and rep["atmospheric_ratio_pass"]
        assert rep["n_crossover_per_cm3"] == pytest.approx(1.2e-5, rel=0.01)
        assert rep["n_crossover_rendered"] == "1.2e-5 cm^-3"
        assert rep["lower_bound_log"] == pytest.approx(-1000 * math.log(3), rel=1e-12)
        assert rep["t_nd_s"] == pytest.approx(1.06e10, rel=0.01)
        assert rep["constants"] == "paper"

    def test_deterministic(self, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        run(capsys, "paper-repro", "-o", str(a))
        run(capsys, "paper-repro", "-o", str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_atmospheric_density(self):
        # ideal gas, 101325 Pa / (k_B * 293 K), in cm^-3
        assert cli.atmospheric_density_per_cm3() == pytest.approx(2.5047576366475936181e19, rel=1e-14)


class TestAverage:
    def test_two_level(self, capsys):
        code, out, _ = run(capsys, "average", "two-level", "--window-periods", "50")
        rep = json.loads(out)
        assert code == 0
        assert rep["analytic"] == 0.5
        assert rep["numeric"] == pytest.approx(0.5, abs=1e-6)

    def test_too_short_window(self, capsys):
        code, _, err = run(capsys, "average", "two-level", "--window-periods", "3")
        assert code == cli.EXIT_NUMERIC
        assert "slowest" in err

    def test_explicit_samples(self, capsys):
        code, out, _ = run(capsys, "average", "two-level", "--window-periods", "10", "--samples", "5001")
        assert code == 0 and json.loads(out)["samples"] == 5001


class TestExitCodes:
    def test_parse_error(self, tmp_path, capsys):
        code, _, err = run(capsys, "report", write(tmp_path, "{not json"))
        assert code == cli.EXIT_PARSE
        assert "line 1" in err

    def test_validation_error(self, tmp_path, capsys):
        code, _, err = run(capsys, "report", write(tmp_path, doc(extra=1)))
        assert code == cli.EXIT_VALIDATION
        assert "extra" in err

    def test_numeric_error(self, tmp_path, capsys):
        d = doc(spectrum={"levels": [{"energy_ev": 2.0, "weight": 1.0}]})
        del d["grid"]
        code, _, err = run(capsys, "trace", write(tmp_path, d))
        assert code == cli.EXIT_NUMERIC
        assert "grid" in err

    def test_codes_distinct(self):
        assert len({cli.EXIT_OK, cli.EXIT_PARSE, cli.EXIT_VALIDATION, cli.EXIT_NUMERIC, 2}) == 5

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            cli.main(["bogus"])
        assert info.value.code == 2


class TestConstantsResolution:
    def test_precedence(self):
        assert cli.resolve_constants_mode("codata", {"GRAVDEPHASE_CONSTANTS": "paper"}) == "codata"
        assert cli.resolve_constants_mode(None, {"GRAVDEPHASE_CONSTANTS": "paper"}) == "paper"
        assert cli.resolve_constants_mode(None, {}) is None

    def test_env_var_applies(self, monkeypatch, capsys):
        monkeypatch.setenv("GRAVDEPHASE_CONSTANTS", "paper")
        assert json.loads(run(capsys, "report", "two-level")[1])["constants"] == "paper"
        assert json.loads(run(capsys, "report", "two-level", "--constants", "codata")[1])["constants"] == "codata"

    def test_env_var_invalid(self, monkeypatch, capsys):
        monkeypatch.setenv("GRAVDEPHASE_CONSTANTS", "cgs")
        assert run(capsys, "report", "two-level")[0] == cli.EXIT_VALIDATION


def test_render_density():
    assert cli.render_density(1.1971e-5) == "1.2e-5 cm^-3"
    assert cli.render_density(2.5e19) == "2.5e19 cm^-3"
