import json
import subprocess
import sys

import pytest

from flsuite.cli import COMMANDS, dispatch
from flsuite.io import ConfigError, parse_config_text, read_convergence_csv


def run(argv, capsys):
    code = dispatch([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


class TestExamples:
    def test_converge_constant(self, tmp_path, capsys):
        out = tmp_path / "t.csv"
        code, _, _ = run(["converge", "--fn", "constant", "--sizes", "2", "--eps", "0.25", "--grid", "11", "--out", out], capsys)
        assert code == 0
        text = out.read_text()
        assert text.splitlines()[0] == "N,M,eps,grid_points,sup_error,wall_ms"
        rows = read_convergence_csv(out)
        assert len(rows) == 1 and rows[0].sup_error <= 1e-12
        assert rows[0].wall_ms is None

    def test_variation_abs_sum(self, tmp_path, capsys):
        out = tmp_path / "v.json"
        argv = ["variation", "--fn", "abs_sum", "--grid", "9", "--lambda", "harmonic", "--method", "exhaustive", "--out", out]
        assert run(argv, capsys)[0] == 0
        d = json.loads(out.read_text())
        assert d["lambda_v12"]["value"] == 0.0
        for key in ("lambda_v1", "lambda_v2", "lambda_v12"):
            assert d[key]["method"] == "exact"

    def test_sizes_negative(self, capsys):
        code, _, err = run(["converge", "--sizes", "-4", "--eps", "0.25"], capsys)
        assert code == 1
        assert "--sizes" in err


class TestSubcommands:
    def test_coeffs(self, capsys):
        code, out, _ = run(["coeffs", "--fn", "xy", "--N", "2", "--M", "2"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["values"][1][1] == pytest.approx(2 / 3)

    def test_partial_sum(self, capsys):
        code, out, _ = run(["partial-sum", "--fn", "xy", "--N", "2", "--M", "2", "--x", "0.3", "--y", "-0.4"], capsys)
        assert code == 0
        d = json.loads(out)
        assert d["value"] == pytest.approx(-0.12)
        assert d["value_kernel"] == pytest.approx(-0.12)

    def test_verify_kernels(self, tmp_path, capsys):
        out = tmp_path / "k.json"
        code, _, _ = run(["verify-kernels", "--n-list", "4,8", "--samples", "20", "--estimates", "Kn,p1", "--out", out], capsys)
        assert code == 0
        d = json.loads(out.read_text())
        assert [r["estimate"] for r in d] == ["Kn", "p1"]

    def test_run(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# batch\nexperiments = converge, variation\nfn = abs_sum\nsizes = 2,4\ngrid_points = 7\n"
            f"out = {tmp_path / 'o'}\n"
        )
        code, out, _ = run(["run", cfg], capsys)
        assert code == 0
        names = sorted(p.name for p in (tmp_path / "o").iterdir())
        assert names == ["converge_abs_sum.csv", "manifest.json", "variation_abs_sum.json"]

    def test_timing_fills_column(self, capsys):
        code, out, _ = run(["converge", "--sizes", "2", "--grid", "5", "--timing"], capsys)
        assert code == 0
        assert out.splitlines()[1].split(",")[-1] != ""

    @pytest.mark.parametrize("cmd", [None, *COMMANDS])
    def test_help(self, cmd, capsys):
        argv = ([cmd] if cmd else []) + ["--help"]
        code, out, _ = run(argv, capsys)
        assert code == 0
        assert "usage" in out

    def test_module_entry_point(self):
        p = subprocess.run([sys.executable, "-m", "flsuite", "converge", "--sizes", "x"], capture_output=True, text=True)
        assert p.returncode == 1
        assert "--sizes" in p.stderr


ERROR_MATRIX = [
    (["converge", "--sizes", "4,2"], 1, "--sizes"),
    (["converge", "--sizes", "2", "--eps", "1.5"], 1, "--eps"),
    (["converge", "--sizes", "2", "--grid", "1"], 1, "--grid"),
    (["converge", "--sizes", "2", "--eps", "abc"], 1, "--eps"),
    (["converge", "--sizes", "8", "--quad-order", "4"], 1, "--quad-order"),
    (["converge", "--sizes", "8", "--quad-order", "many"], 1, "--quad-order"),
    (["converge", "--fn", "nope", "--sizes", "2"], 1, "--fn"),
    (["converge", "--fn", "smooth_osc", "--params", "a=-1", "--sizes", "2"], 1, "--params"),
    (["converge", "--params", "junk", "--sizes", "2"], 1, "--params"),
    (["coeffs", "--N", "0", "--M", "2"], 1, "--N"),
    (["coeffs", "--N", "2"], 1, "--M"),
    (["partial-sum", "--N", "2", "--M", "2", "--x", "2", "--y", "0"], 1, "--x"),
    (["variation", "--method", "magic"], 1, "--method"),
    (["variation", "--lambda", "cubic"], 1, "--lambda"),
    (["variation", "--lambda-delta", "0"], 1, "--lambda-delta"),
    (["variation", "--n-max", "0"], 1, "--n-max"),
    (["variation", "--delta1", "-1"], 1, "--delta1"),
    (["verify-kernels", "--samples", "3"], 1, "--samples"),
    (["verify-kernels", "--estimates", "Kn,bogus"], 1, "--estimates"),
    (["verify-kernels", "--n-list", ""], 1, "--n-list"),
    (["verify-kernels", "--seed", "-1"], 1, "--seed"),
    (["bogus"], 1, "invalid choice"),
    ([], 1, "required"),
    # too many points for the exact search: a runtime refusal
    (["variation", "--grid", "20", "--method", "exhaustive"], 2, "exhaustive"),
]


@pytest.mark.parametrize("argv, code, needle", ERROR_MATRIX)
def test_error_matrix(argv, code, needle, capsys):
    got, _, err = run(argv, capsys)
    assert got == code
    assert needle in err


class TestRunErrors:
    def test_missing_config(self, tmp_path, capsys):
        code, _, err = run(["run", tmp_path / "absent.cfg"], capsys)
        assert code == 2
        assert "absent.cfg" in err

    def test_unknown_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("experiments = converge\ncolour = blue\n")
        code, _, err = run(["run", cfg], capsys)
        assert code == 1
        assert "colour" in err

    def test_bad_value_names_key(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text("grid_points = 1\n")
        code, _, err = run(["run", cfg], capsys)
        assert code == 1
        assert "grid_points" in err

    def test_unwritable_output(self, tmp_path, capsys):
        blocker = tmp_path / "f"
        blocker.write_text("")
        code, _, err = run(["converge", "--sizes", "2", "--out", blocker / "x.csv"], capsys)
        assert code == 2
        assert "x.csv" in err


class TestConfigParsing:
    def test_roundtrip(self):
        cfg = parse_config_text(
            "experiments = converge\nfn = pbv_p\nparams = p=2, levels=4\nsizes = 4, 8\n"
            "quad_order = 40\ntiming = yes\nn_max = none\n"
        )
        assert cfg.params == {"p": 2, "levels": 4}
        assert cfg.sizes == [4, 8] and cfg.quad_order == 40 and cfg.timing and cfg.n_max is None

    def test_sections_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("[extra]\nfn = xy\n")

    def test_error_names_key(self):
        with pytest.raises(ConfigError) as exc:
            parse_config_text("samples = ten\n")
        assert exc.value.key == "samples"


class TestDeterminism:
    @pytest.mark.parametrize(
        "argv, name",
        [
            (["converge", "--fn", "abs_sum", "--sizes", "4,8", "--grid", "11"], "c.csv"),
            (["variation", "--fn", "smooth_osc", "--grid", "7"], "v.json"),
            (["variation", "--fn", "smooth_osc", "--grid", "15", "--method", "greedy_peel"], "g.json"),
            (["verify-kernels", "--n-list", "4,8", "--samples", "30", "--seed", "5"], "k.json"),
            (["coeffs", "--fn", "abs_power", "--N", "4", "--M", "3"], "co.json"),
        ],
    )
    def test_byte_identical(self, argv, name, tmp_path, capsys):
        a, b = tmp_path / ("a_" + name), tmp_path / ("b_" + name)
        assert run(argv + ["--out", a], capsys)[0] == 0
        assert run(argv + ["--out", b], capsys)[0] == 0
        assert a.read_bytes() == b.read_bytes()
        assert b"\r\n" not in a.read_bytes()

    def test_run_directory_identical(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(f"experiments = converge, verify-kernels\nsizes = 2\nn_list = 4\nsamples = 20\nout = {tmp_path / 'r'}\n")
        assert run(["run", cfg], capsys)[0] == 0
        first = {p.name: p.read_bytes() for p in (tmp_path / "r").iterdir()}
        assert run(["run", cfg], capsys)[0] == 0
        second = {p.name: p.read_bytes() for p in (tmp_path / "r").iterdir()}
        assert first == second

    def test_json_roundtrip(self, tmp_path, capsys):
        out = tmp_path / "k.json"
        run(["verify-kernels", "--n-list", "4", "--samples", "20", "--estimates", "Kn", "--out", out], capsys)
        d = json.loads(out.read_text())
        assert out.read_text() == json.dumps(d, indent=2, sort_keys=True) + "\n"
