import json
import math
import os

import numpy as np
import pytest

from bosonic_ness import BathSpec, ChainParams
from bosonic_ness.experiments import cli
from bosonic_ness.experiments.config import ConfigError, parse_config, parse_values
from bosonic_ness.experiments.export import ExportError, export, read, to_csv
from bosonic_ness.experiments.fit import fit_cmi_decay, fit_cmi_scaling, loglog_slope
from bosonic_ness.experiments.kato import kato_bound
from bosonic_ness.experiments.presets import PRESETS, geometric_L, get_preset, run_preset
from bosonic_ness.experiments.sweep import SweepSpec, resolve_workers, run_sweep, spec_from_config
from bosonic_ness.ness import SolverError

from conftest import thermal


class TestConfig:
    def test_lists_and_ranges(self):
        cfg = parse_config("# comment\nL = 8,16,32\nGamma = 0:0.05:0.2  # trailing\nN1 = 2\n")
        assert cfg["L"] == [8, 16, 32]
        assert cfg["Gamma"] == [0.0, 0.05, 0.1, 0.15, 0.2]
        assert cfg["N1"] == 2.0
        assert list(cfg) == ["L", "Gamma", "N1"]

    def test_single_element_list_stays_a_list(self):
        assert parse_config("b = 1,")["b"] == [1]

    def test_range_endpoint(self):
        assert parse_values("4:4:14", "L") == [4, 8, 12]

    @pytest.mark.parametrize("text", ["L 8", "foo = 1", "L = 8\nL = 9", "L = 2.5",
                                      "Gamma = a", "L = 1:0:4", "L = 1:2", "L = ,"])
    def test_rejects(self, text):
        with pytest.raises(ConfigError):
            parse_config(text)

    def test_spec_from_config(self):
        spec = spec_from_config(parse_config(
            "L = 8,16\nN1 = 3\nNL = 0.5\nlambda = 0.7\nr1 = 0.2\ntheta1 = 1\nmeasures = mi, current\n"))
        assert spec.axis_names == ("L",)
        assert spec.base.lam == 0.7 and spec.base.N1 == pytest.approx(BathSpec(3, 0.2, 1).N)
        assert spec.measures == ("mi", "current")
        assert spec.columns == ("L", "mi", "current", "error")

    def test_explicit_blocks(self):
        spec = spec_from_config(parse_config("L = 8\nblocks = 1-3 | 4 | 5-8\nmeasures = cmi\n"))
        assert spec.partition == "explicit"
        assert spec.blocks == ((1, 2, 3), (4,), (5, 6, 7, 8))


class TestSweep:
    def test_ballistic_mi_flat(self):
        rows = run_sweep(SweepSpec(thermal(8), (("L", (8, 16, 32)),), ("mi",)))
        assert [r["L"] for r in rows] == [8, 16, 32]
        mis = [r["mi"] for r in rows]
        assert (max(mis) - min(mis)) / max(mis) < 0.01

    def test_empty_axes(self):
        rows = run_sweep(SweepSpec(thermal(6), (), ("current",)))
        assert len(rows) == 1 and rows[0]["current"] == pytest.approx(-0.4)

    def test_parity_errors_recorded(self):
        spec = SweepSpec(thermal(20), (("L", (20, 40)), ("b", (1, 2))), ("cmi",))
        rows = run_sweep(spec)
        assert [(r["L"], r["b"]) for r in rows] == [(20, 1), (20, 2), (40, 1), (40, 2)]
        for r in rows:
            if r["b"] == 1:
                assert "L - b even" in r["error"] and r["cmi"] is None
            else:
                assert r["error"] == "" and r["cmi"] > 0

    def test_invalid_point_recorded(self):
        rows = run_sweep(SweepSpec(thermal(6), (("gamma", (1.0, -1.0)),), ("current",)))
        assert rows[0]["error"] == "" and "gamma" in rows[1]["error"]

    def test_workers_do_not_change_result(self):
        spec = SweepSpec(thermal(10), (("Gamma", (0.0, 0.1, 0.5)), ("L", (10, 12, 14))),
                         ("mi", "tc", "current", "profile"))
        assert to_csv(run_sweep(spec, 1), spec.columns) == to_csv(run_sweep(spec, 3), spec.columns)

    def test_squeezed_uses_dense_path(self):
        base = ChainParams(8, Gamma=0.1, bath_left=BathSpec(2, 0.3, 0.2), bath_right=BathSpec(1))
        row = run_sweep(SweepSpec(base, (), ("cmi", "chain_rule", "tc", "mi"), b=2))[0]
        assert row["error"] == ""
        assert row["cmi"] >= 0 and abs(row["chain_rule"]) < 1e-10

    def test_tripartition_rule(self):
        spec = SweepSpec(thermal(12, Gamma=0.2), (("k", (2, 4)),), ("cmi", "mi"),
                         partition="tripartition", b=3)
        rows = run_sweep(spec)
        assert all(r["error"] == "" for r in rows)
        assert rows[0]["mi"] != rows[1]["mi"]

    def test_precise_and_dense_agree(self):
        spec = SweepSpec(thermal(10, Gamma=0.3), (), ("cmi",), partition="explicit",
                         blocks=((1, 2), (3, 4, 5), (6, 7, 8, 9, 10)))
        from bosonic_ness import tridiagonal
        from bosonic_ness.tridiagonal import TridiagonalState
        ref = tridiagonal.cmi(TridiagonalState.from_params(thermal(10, Gamma=0.3)), 2, 3)
        assert run_sweep(spec)[0]["cmi"] == pytest.approx(ref, abs=1e-12)

    def test_kato_columns(self):
        spec = SweepSpec(thermal(6, Gamma=0.1), (("L", (6, 8)),), ("kato",))
        assert spec.columns == ("L", "kato_epsilon", "kato_bound", "error")
        rows = run_sweep(spec)
        assert rows[1]["kato_bound"] == pytest.approx(8 * rows[1]["kato_epsilon"])

    @pytest.mark.parametrize("kw", [dict(measures=("entropy",)), dict(axes=(("omega", (1,)),)),
                                    dict(partition="random"), dict(axes=(("L", ()),)),
                                    dict(partition="explicit"), dict(measures=())])
    def test_invalid_spec(self, kw):
        with pytest.raises(ValueError):
            SweepSpec(thermal(6), **kw)

    def test_workers_env(self, monkeypatch):
        monkeypatch.setenv("BOSONIC_NESS_WORKERS", "3")
        assert resolve_workers(None) == 3
        assert resolve_workers(2) == 2
        with pytest.raises(ValueError):
            resolve_workers(0)


class TestFit:
    def synthetic(self, u, v, b):
        return [dict(Gamma=G, L=L, b=b, cmi=u / (v + G * L) ** (2 * b + 2))
                for G in (0.05, 0.1, 0.2) for L in range(20, 101, 10)]

    @pytest.mark.parametrize("u,v,b", [(1.0, 2.0, 1), (7.3, 4.5, 2), (0.02, 0.3, 3), (3.0, 1.0, 0)])
    def test_exact_inverse(self, u, v, b):
        f = fit_cmi_scaling(self.synthetic(u, v, b), b)
        assert f.u == pytest.approx(u, rel=1e-8)
        assert f.v == pytest.approx(v, rel=1e-8)
        assert f.r_squared == pytest.approx(1.0, abs=1e-12)
        assert f.exponent_used == 2 * b + 2
        assert len(f.residuals) == 27

    def test_skips_errors_and_other_b(self):
        rows = self.synthetic(1.0, 2.0, 1) + [dict(Gamma=0.1, L=21, b=1, cmi=None, error="x"),
                                              dict(Gamma=0.1, L=22, b=2, cmi=5.0, error="")]
        assert fit_cmi_scaling(rows, 1).u == pytest.approx(1.0, rel=1e-8)

    def test_rejects_few_points(self):
        with pytest.raises(ValueError):
            fit_cmi_scaling(self.synthetic(1, 2, 1)[:2], 1)

    def test_rejects_non_positive(self):
        rows = self.synthetic(1, 2, 1)
        rows[3]["cmi"] = 0.0
        with pytest.raises(ValueError):
            fit_cmi_scaling(rows, 1)

    def test_decay_exact_inverse(self):
        b = np.arange(1, 9)
        f = fit_cmi_decay(b, 0.3 / 4.2 ** b)
        assert f.R == pytest.approx(4.2, rel=1e-10)
        assert f.amplitude == pytest.approx(0.3, rel=1e-10)
        assert f.r == pytest.approx(-1.0, abs=1e-12)

    def test_decay_rejects(self):
        with pytest.raises(ValueError):
            fit_cmi_decay([1, 2], [0.1, 0.01])
        with pytest.raises(ValueError):
            fit_cmi_decay([1, 2, 3], [0.1, 0.0, 0.01])

    def test_loglog_slope_uses_largest_decade(self):
        L = np.array([1, 2, 5, 10, 20, 50, 100])
        y = np.where(L >= 10, L ** -2.0, 1.0)
        assert loglog_slope(L, y) == pytest.approx(-2.0, abs=1e-12)
        assert loglog_slope(L, y, decade=False) != pytest.approx(-2.0, abs=0.1)

    def test_loglog_slope_rejects(self):
        with pytest.raises(ValueError):
            loglog_slope([10], [1.0])
        with pytest.raises(ValueError):
            loglog_slope([10, 20], [1.0, 0.0])


class TestKato:
    def test_equilibrium(self):
        assert kato_bound(thermal(10, 2.0, 2.0, Gamma=0.1)) == (0.0, 0.0)

    def test_rejects_short_chain(self):
        with pytest.raises(ValueError):
            kato_bound(thermal(3))

    def test_ballistic_epsilon_constant(self):
        eps = [kato_bound(thermal(L))[0] for L in (20, 40, 80)]
        np.testing.assert_allclose(eps, eps[0], rtol=1e-8)

    def test_squeezed_matches_definition(self):
        from bosonic_ness.gaussian import Partition, assemble_cm, conditional_mutual_information
        from bosonic_ness.ness import analytic_ness
        p = ChainParams(6, Gamma=0.2, bath_left=BathSpec(2, 0.3, 0.0), bath_right=BathSpec(0.5))
        cm = assemble_cm(analytic_ness(p))
        eps = max(conditional_mutual_information(cm, Partition(((*range(1, k),), (k,), (*range(k + 1, 7),))))
                  for k in range(2, 6))
        assert kato_bound(p) == pytest.approx((eps, 6 * eps), rel=1e-12)


class TestExport:
    def rows(self):
        return run_sweep(SweepSpec(thermal(8), (("L", (8, 16, 32)),), ("mi",)))

    def test_csv_shape(self, tmp_path):
        path = tmp_path / "mi.csv"
        export(self.rows(), "csv", path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        lines = raw.decode("utf-8").splitlines()
        assert lines[0] == "L,mi,error" and len(lines) == 4

    def test_json_shape(self, tmp_path):
        path = tmp_path / "mi.json"
        export(self.rows(), "json", path)
        data = json.loads(path.read_text("utf-8"))
        assert len(data) == 3 and all(list(d) == ["L", "mi", "error"] for d in data)

    @pytest.mark.parametrize("fmt", ["csv", "json"])
    def test_round_trip_bit_identical(self, tmp_path, fmt):
        rows = run_sweep(SweepSpec(thermal(6), (("Gamma", (0.0, 0.1, 1 / 3)), ("L", (6, 9))),
                                   ("mi", "current", "profile")))
        path = tmp_path / f"out.{fmt}"
        export(rows, fmt, path)
        back = read(path)
        assert len(back) == len(rows)
        for a, b in zip(rows, back):
            for key in ("Gamma", "mi", "current"):
                assert float(b[key]).hex() == float(a[key]).hex()
            assert [x.hex() for x in b["profile"]] == [x.hex() for x in a["profile"]]
            assert b["L"] == a["L"]

    def test_determinism(self, tmp_path):
        spec = SweepSpec(thermal(6), (("L", (6, 7)), ("Gamma", (0.0, 0.2))), ("tc", "profile"))
        export(run_sweep(spec), "csv", tmp_path / "a.csv", spec.columns)
        export(run_sweep(spec, 2), "csv", tmp_path / "b.csv", spec.columns)
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(ExportError) as info:
            export(self.rows(), "csv", tmp_path / "missing" / "x.csv")
        assert "No such file" in str(info.value)

    def test_no_partial_file(self, tmp_path):
        target = tmp_path / "dir_not_file"
        target.mkdir()
        with pytest.raises(ExportError):
            export(self.rows(), "csv", target)
        assert os.listdir(tmp_path) == ["dir_not_file"]
        assert os.listdir(target) == []

    def test_rejects_empty(self, tmp_path):
        with pytest.raises(ValueError):
            export([], "csv", tmp_path / "x.csv")

    def test_non_finite_floats(self):
        assert "nan" in to_csv([dict(x=math.nan)])


class TestPresets:
    def test_names(self):
        assert set(PRESETS) == {"fig3a", "fig3b", "fig5a", "fig5b", "fig6a", "fig6b", "fig6c",
                                "fig6d", "kato"}

    def test_symmetric_presets_respect_parity(self):
        for name in ("fig6b", "fig6c", "fig6d"):
            for part in get_preset(name).parts:
                axes = dict(part.axes)
                assert all((L - b) % 2 == 0 for L in axes["L"] for b in axes["b"])

    def test_fig3a(self):
        rows, cols = run_preset("fig3a")
        assert cols == ("lambda", "profile", "current", "error")
        np.testing.assert_allclose(rows[1]["profile"], [1.6] + [1.5] * 8 + [1.4], atol=1e-12)

    def test_unknown(self):
        with pytest.raises(ValueError):
            get_preset("fig7")

    def test_geometric_parity(self):
        Ls = geometric_L(20, 1000, 10, parity=1)
        assert all(L % 2 == 1 for L in Ls) and list(Ls) == sorted(set(Ls))


class TestCLI:
    def write(self, tmp_path, text):
        path = tmp_path / "run.cfg"
        path.write_text(text)
        return str(path)

    def test_sweep_to_file(self, tmp_path):
        cfg = self.write(tmp_path, "L = 8,16,32\nN1 = 2\nNL = 1\nmeasures = mi\n")
        out = tmp_path / "mi.csv"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        assert out.read_text().splitlines()[0] == "L,mi,error"

    def test_sweep_stdout_json(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "L = 6\nN1 = 2\nNL = 1\nGamma = 0,0.1\n")
        assert cli.main(["sweep", "--config", cfg, "--format", "json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert [d["Gamma"] for d in data] == [0, 0.1]

    def test_solve(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "L = 10\nN1 = 2\nNL = 1\n")
        for method in ("closed_form", "vectorized", "fixed_point"):
            assert cli.main(["solve", "--config", cfg, "--method", method, "--format", "json"]) == 0
            row = json.loads(capsys.readouterr().out)[0]
            assert row["current"] == pytest.approx(-0.4) and row["regime"] == "ballistic"

    def test_solve_rejects_lists(self, tmp_path):
        assert cli.main(["solve", "--config", self.write(tmp_path, "L = 4,5\n")]) == 1

    def test_validation_errors(self, tmp_path, capsys):
        assert cli.main(["sweep", "--config", str(tmp_path / "none.cfg")]) == 1
        assert cli.main(["sweep", "--config", self.write(tmp_path, "L = 1\n")]) == 1
        assert cli.main(["sweep", "--config", self.write(tmp_path, "bogus = 1\n")]) == 1
        assert cli.main(["sweep", "--preset", "nope"]) == 1
        assert cli.main(["sweep"]) == 1
        cfg = self.write(tmp_path, "L = 4\nN1 = 1\n")
        assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "no" / "x.csv")]) == 1
        assert "error:" in capsys.readouterr().err

    def test_solver_failure_exit_code(self, tmp_path, monkeypatch):
        def boom(params):
            raise SolverError("not converged")
        monkeypatch.setattr(cli, "analytic_ness", boom)
        assert cli.main(["solve", "--config", self.write(tmp_path, "L = 4\n")]) == 2

    def test_fit_scaling_from_file(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "N1 = 15\nNL = 1\nGamma = 0.05,0.1,0.2\nb = 2\nL = 20:10:100\n"
                                   "measures = cmi\n")
        out = tmp_path / "rows.csv"
        assert cli.main(["sweep", "--config", cfg, "--out", str(out)]) == 0
        assert cli.main(["fit", "--input", str(out), "--b", "2", "--format", "json"]) == 0
        fit = json.loads(capsys.readouterr().out)[0]
        assert fit["r_squared"] > 0.999 and fit["exponent_used"] == 6

    def test_fit_slope(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "N1 = 2\nNL = 1\nGamma = 0,1\nL = 16:8:128\nmeasures = tc\n")
        assert cli.main(["fit", "--config", cfg, "--kind", "slope", "--measure", "tc",
                         "--format", "json"]) == 0
        slopes = {d["Gamma"]: d["slope"] for d in json.loads(capsys.readouterr().out)}
        assert slopes[0] == pytest.approx(1.0, abs=0.1)

    def test_fit_decay(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "L = 40\nN1 = 2,5\nNL = 1\nGamma = 0.1\nb = 2:2:10\n"
                                   "measures = cmi\n")
        assert cli.main(["fit", "--config", cfg, "--kind", "decay", "--format", "json"]) == 0
        fits = json.loads(capsys.readouterr().out)
        assert [d["N1"] for d in fits] == [2, 5]
        for d in fits:
            assert d["R"] > 1 and d["r"] < -0.999

    def test_fit_needs_b(self, tmp_path):
        assert cli.main(["fit", "--config", self.write(tmp_path, "L = 4\n")]) == 1

    def test_kato(self, tmp_path, capsys):
        cfg = self.write(tmp_path, "L = 8,12\nN1 = 2\nNL = 1\nGamma = 0.1\nmeasures = mi\n")
        assert cli.main(["kato", "--config", cfg]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "L,kato_epsilon,kato_bound,error" and len(lines) == 3

    def test_presets_listing(self, capsys):
        assert cli.main(["presets"]) == 0
        out = capsys.readouterr().out
        assert all(name in out for name in PRESETS)

    def test_workers_flag(self, tmp_path, monkeypatch):
        monkeypatch.setenv("BOSONIC_NESS_WORKERS", "not-a-number")
        cfg = self.write(tmp_path, "L = 6,8\nN1 = 2\n")
        assert cli.main(["sweep", "--config", cfg, "--workers", "2", "--out",
                         str(tmp_path / "o.csv")]) == 0
        assert cli.main(["sweep", "--config", cfg, "--out", str(tmp_path / "o.csv")]) == 1
