import math

import numpy as np
import pytest

from logrelax.cli import OutputFormat, OutputSpec, entrypoint
from logrelax.errors import ValidationError

from _reference import TWO_OVER_SQRT_PI


def run(capsys, *args):
    code = entrypoint(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_kv(text):
    pairs = {}
    for line in text.strip().splitlines():
        key, _, value = line.partition("=")
        pairs[key] = value
    return pairs


def parse_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestOutputSpec:
    def test_precision_range(self):
        OutputSpec(precision=6)
        OutputSpec(precision=17)
        with pytest.raises(ValidationError):
            OutputSpec(precision=5)
        with pytest.raises(ValidationError):
            OutputSpec(precision=18)

    def test_defaults(self):
        spec = OutputSpec()
        assert spec.format is OutputFormat.STRUCTURED_TEXT
        assert spec.destination == "-"
        assert spec.precision == 12


class TestMlCommand:
    def test_exponential_point(self, capsys):
        code, out, _ = run(capsys, "ml", "--alpha", "1", "--x", "-0.6931471805599453")
        assert code == 0
        kv = parse_kv(out)
        assert float(kv["value"]) == pytest.approx(0.5, abs=1e-12)
        assert kv["regime"] == "series"

    def test_zero_argument(self, capsys):
        code, out, _ = run(capsys, "ml", "--alpha", "0.5", "--x", "0")
        assert code == 0
        assert float(parse_kv(out)["value"]) == 1.0

    def test_csv_format(self, capsys):
        code, out, _ = run(capsys, "ml", "--alpha", "0.5", "--x", "-1",
                           "--format", "csv")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["value", "regime", "est_error"]
        assert float(rows[0][0]) == pytest.approx(0.4275835761558070, abs=1e-10)

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run(capsys, "ml", "--alpha", "2", "--x", "-1")
        assert code == 3
        assert "alpha" in err

    def test_precision_flag_is_usage_checked(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entrypoint(["ml", "--alpha", "0.5", "--x", "-1", "--precision", "20"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestRelaxCommand:
    def test_order_one_column(self, capsys):
        code, out, _ = run(capsys, "relax", "--nu", "1", "--linear", "0:10:11")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["t", "nu=1"]
        for row in rows:
            t, v = float(row[0]), float(row[1])
            assert v == pytest.approx(1.0 / (1.0 + t), rel=1e-11)

    def test_multi_order_csv(self, capsys):
        code, out, _ = run(capsys, "relax", "--nu", "0.25,0.5,0.75,0.9,1",
                           "--linear", "0:10:21")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["t", "nu=0.25", "nu=0.5", "nu=0.75", "nu=0.9", "nu=1"]
        assert len(rows) == 21
        cols = np.array([[float(v) for v in row] for row in rows])
        for j in range(1, 6):
            assert cols[0, j] == 1.0
            assert np.all(np.diff(cols[:, j]) < 0.0)
            assert np.all(cols[:, j] > 0.0)

    def test_log_grid(self, capsys):
        code, out, _ = run(capsys, "relax", "--nu", "0.5", "--log", "0.1:100:61")
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 61
        assert float(rows[0][0]) == pytest.approx(0.1)
        assert float(rows[-1][0]) == pytest.approx(100.0)

    def test_round_trip_is_byte_identical(self, capsys, tmp_path):
        out_path = tmp_path / "curve.csv"
        code, _, _ = run(capsys, "relax", "--nu", "0.3,0.8",
                         "--linear", "0:10:41", "--out", str(out_path))
        assert code == 0
        original = out_path.read_text()
        lines = original.splitlines()
        re_emitted = [lines[0]]
        for line in lines[1:]:
            re_emitted.append(
                ",".join(format(float(v), ".12g") for v in line.split(","))
            )
        assert "\n".join(re_emitted) + "\n" == original

    def test_bad_grid_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entrypoint(["relax", "--nu", "0.5", "--linear", "0:10"])
        assert exc.value.code == 2
        capsys.readouterr()

    def test_invalid_log_grid_is_domain_error(self, capsys):
        code, _, err = run(capsys, "relax", "--nu", "0.5", "--log", "0:10:5")
        assert code == 3
        assert "t_min" in err

    def test_plot_file_written(self, capsys, tmp_path):
        png = tmp_path / "curves.png"
        code, _, _ = run(capsys, "relax", "--nu", "0.5", "--linear", "0:5:11",
                         "--out", str(tmp_path / "c.csv"), "--plot", str(png))
        assert code == 0
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


class TestOpCommand:
    def test_constant_annihilated(self, capsys):
        code, out, _ = run(capsys, "op", "--f", "const:5", "--nu", "0.3", "--t", "2")
        assert code == 0
        assert abs(float(parse_kv(out)["value"])) < 1e-12

    def test_log_power_value(self, capsys):
        code, out, _ = run(capsys, "op", "--f", "logpow:1", "--nu", "0.5",
                           "--t", "1.718281828459045", "--nodes", "4096",
                           "--levels", "1")
        assert code == 0
        assert float(parse_kv(out)["value"]) == pytest.approx(
            TWO_OVER_SQRT_PI, rel=1e-4
        )

    def test_eigenfunction_sign_flip(self, capsys):
        code, out, _ = run(capsys, "op", "--f", "eigen", "--nu", "0.5", "--t", "3",
                           "--nodes", "4096", "--levels", "1")
        assert code == 0
        from logrelax.hadamard import OperatorParams
        from logrelax.models import RelaxationScenario, stress_relaxation

        sigma = stress_relaxation(3.0, 0.5, RelaxationScenario(p=OperatorParams(nu=0.5)))
        assert float(parse_kv(out)["value"]) == pytest.approx(-sigma, rel=1e-3)

    def test_numerical_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "op", "--f", "logpow:1.5", "--nu", "0.5",
                           "--t", "5", "--nodes", "8", "--levels", "2",
                           "--qtol", "1e-14")
        assert code == 4
        assert "stabilize" in err

    def test_bad_selector_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entrypoint(["op", "--f", "wiggle:3", "--nu", "0.5", "--t", "1"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestAsymCommand:
    def test_table_shape_and_monotone_error(self, capsys):
        code, out, _ = run(capsys, "asym", "--nu", "0.5",
                           "--t", "100,10000,1000000,100000000")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["t", "exact", "asymptotic", "rel_error"]
        errs = [float(r[3]) for r in rows]
        assert all(b < a for a, b in zip(errs, errs[1:]))

    def test_grid_flag(self, capsys):
        code, out, _ = run(capsys, "asym", "--nu", "0.25", "--log", "100:1e8:7")
        assert code == 0
        _, rows = parse_csv(out)
        assert len(rows) == 7

    def test_requires_some_grid(self, capsys):
        with pytest.raises(SystemExit) as exc:
            entrypoint(["asym", "--nu", "0.5"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestCmcheckCommand:
    def test_relaxation_passes(self, capsys):
        code, out, _ = run(capsys, "cmcheck", "--nu", "0.5", "--linear", "0:10:200")
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["order", "passed", "worst_violation"]
        assert len(rows) == 4
        assert all(row[1] == "true" for row in rows)


class TestFitCommand:
    @pytest.fixture()
    def data_file(self, tmp_path):
        from logrelax.hadamard import OperatorParams
        from logrelax.models import RelaxationScenario, stress_relaxation

        sc = RelaxationScenario(p=OperatorParams(nu=0.5))
        t = np.linspace(0.0, 10.0, 50)
        s = stress_relaxation(t, 0.5, sc)
        path = tmp_path / "data.csv"
        path.write_text(
            "t,sigma\n" + "\n".join(f"{ti:.17g},{si:.17g}" for ti, si in zip(t, s)) + "\n"
        )
        return path

    def test_fit_recovers_order(self, capsys, data_file):
        code, out, _ = run(capsys, "fit", "--input", str(data_file),
                           "--free", "nu", "--init", "nu=0.3")
        assert code == 0
        kv = parse_kv(out)
        assert abs(float(kv["nu"]) - 0.5) < 1e-3
        assert kv["converged"] == "true"

    def test_unconverged_fit_exits_4(self, capsys, data_file):
        code, out, _ = run(capsys, "fit", "--input", str(data_file),
                           "--free", "nu", "--init", "nu=0.05",
                           "--max-iters", "3")
        assert code == 4
        assert parse_kv(out)["converged"] == "false"

    def test_missing_file_exits_3(self, capsys):
        code, _, err = run(capsys, "fit", "--input", "/no/such/file.csv")
        assert code == 3
        assert "No such file" in err

    def test_invalid_data_exits_3(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("0,1.0\n1,-0.5\n")
        code, _, err = run(capsys, "fit", "--input", str(bad))
        assert code == 3
        assert "line 2" in err

    def test_unknown_free_param_is_usage_error(self, capsys, data_file):
        with pytest.raises(SystemExit) as exc:
            entrypoint(["fit", "--input", str(data_file), "--free", "zeta"])
        assert exc.value.code == 2
        capsys.readouterr()


class TestFiguresCommand:
    def test_writes_csv_and_png(self, capsys, tmp_path):
        outdir = tmp_path / "figs"
        code, out, _ = run(capsys, "figures", "--outdir", str(outdir))
        assert code == 0
        for stem in ("relaxation_linear", "relaxation_log", "asymptotic_matching"):
            csv_path = outdir / f"{stem}.csv"
            png_path = outdir / f"{stem}.png"
            assert csv_path.exists() and csv_path.stat().st_size > 0
            assert png_path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
        header, rows = parse_csv((outdir / "relaxation_linear.csv").read_text())
        assert header[0] == "t"
        assert len(header) == 6
        assert len(rows) == 201
        values = np.array([[float(v) for v in row[1:]] for row in rows])
        assert np.all(values[0] == 1.0)
        assert np.all(np.diff(values, axis=0) < 0.0)
