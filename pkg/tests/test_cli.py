import csv
import io

import numpy as np
import pytest

from pdmsplit import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def header(text):
    return text.split("\n", 1)[0]


class TestSpectrum:
    def test_three_dimensional_ground(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--N", "3", "--L", "0", "--n", "0")
        assert code == 0
        assert header(out) == ",".join(cli.SPECTRUM_COLUMNS)
        (row,) = rows(out)
        assert float(row["epsilon"]) == 1 and float(row["delta_e_mean"]) == pytest.approx(2)
        assert float(row["E_analytic"]) == pytest.approx(3) and float(row["abs_err"]) <= 5e-5
        assert row["membership"] == "true" and row["solvable_flag"] == "true"

    def test_one_dimension(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--N", "1", "--n", "0", "--refine", "1", "--nodes", "800")
        (row,) = rows(out)
        assert code == 0
        assert float(row["delta_e_mean"]) == 0 and float(row["E_analytic"]) == 1

    def test_unsolvable_row_emitted_and_strict(self, capsys, tmp_path):
        args = ["spectrum", "--profile", "inverse-quadratic", "--N", "3", "--nodes", "1000"]
        code, out, _ = run(capsys, *args)
        (row,) = rows(out)
        assert code == 0 and row["solvable_flag"] == "false"
        assert float(row["delta_e_dev"]) > 1e-3
        code, _, _ = run(capsys, *args, "--strict")
        assert code == 2

    def test_rows_sorted_and_consistent(self, capsys):
        code, out, _ = run(capsys, "spectrum", "--N", "3,2", "--L", "1,0", "--n", "1,0", "--preset", "all", "--nodes", "600")
        table = rows(out)
        assert code == 0 and len(table) == 16
        for preset in ("", "-0.5"):
            keys = [(int(r["N"]), int(r["L"]), int(r["n"])) for r in table if (r["alpha"] == "-0.5") == bool(preset)]
            assert keys == sorted(keys)
        for r in table:
            assert float(r["E_analytic"]) == pytest.approx(float(r["epsilon"]) + float(r["delta_e_mean"]), abs=1e-10)

    def test_deterministic_bytes(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for p in paths:
            assert cli.main(["spectrum", "--profile", "rational", "--N", "1,3", "--nodes", "500", "--out", str(p)]) == 0
        data = paths[0].read_bytes()
        assert data == paths[1].read_bytes()
        assert b"\r" not in data and data.endswith(b"\n")


class TestWavefunction:
    def test_header_and_norm(self, capsys):
        code, out, _ = run(capsys, "wavefunction", "--N", "3")
        assert code == 0
        assert header(out) == "r,F,G,psi,psi_normalized"
        table = np.array([[float(v) for v in r.values()] for r in rows(out)])
        r, psi = table[:, 0], table[:, 4]
        assert np.trapezoid(psi**2, r) == pytest.approx(1.0, abs=1e-8)
        shape = r * np.exp(-r * r / 2)
        np.testing.assert_allclose(psi, shape / np.sqrt(np.trapezoid(shape**2, r)), atol=1e-10)

    @pytest.mark.parametrize("N, L", [(2, 0), (3, 1), (5, 2)])
    def test_g_column(self, capsys, N, L):
        code, out, _ = run(capsys, "wavefunction", "--profile", "rational", "--N", str(N), "--L", str(L))
        table = rows(out)
        r = np.array([float(t["r"]) for t in table])
        g = np.array([float(t["G"]) for t in table])
        np.testing.assert_allclose(g, r ** ((N + 2 * L - 1) / 2), rtol=1e-11)

    def test_needs_single_case(self, capsys):
        code, _, err = run(capsys, "wavefunction", "--N", "2,3")
        assert code == 1 and "exactly one" in err

    def test_underflow_is_numeric_failure(self, capsys):
        code, _, err = run(capsys, "wavefunction", "--rmax", "40")
        assert code == 3 and "numerical failure" in err


class TestChecks:
    def test_identity_sweep(self, capsys):
        code, out, _ = run(capsys, "check-identity", "--profile", "all", "--preset", "all", "--N", "1,2,3", "--L", "0,1")
        table = rows(out)
        assert code == 0 and len(table) == 3 * 2 * 5
        assert max(float(r["identity_residual"]) for r in table) <= 1e-6

    def test_solvability_constant(self, capsys):
        code, out, _ = run(capsys, "check-solvability", "--preset", "all", "--N", "1,2,3,5", "--L", "0,1,2")
        assert code == 0
        assert max(float(r["delta_e_dev"]) for r in rows(out)) <= 1e-10

    def test_solvability_fails_for_general_mass(self, capsys):
        code, out, _ = run(capsys, "check-solvability", "--profile", "inverse-quadratic", "--N", "3")
        assert code == 2 and rows(out)[0]["solvable_flag"] == "false"

    def test_transform(self, capsys):
        code, out, _ = run(capsys, "transform-check", "--n", "0,1,2")
        table = rows(out)
        assert code == 0 and len(table) == 3
        for r in table:
            assert float(r["phi_residual"]) <= 1e-5 <= 1e-2 <= float(r["control_residual"])
            assert float(r["prescription_residual"]) <= 1e-10

    def test_transform_all_profiles(self, capsys):
        code, _, _ = run(capsys, "transform-check", "--profile", "all", "--n", "0,1,2")
        assert code == 0


class TestVerify:
    def test_strict_membership(self, capsys):
        code, out, _ = run(capsys, "verify", "--N", "3", "--n", "0,1", "--strict")
        assert code == 2
        assert [r["membership"] for r in rows(out)] == ["true", "false"]

    def test_list_profiles(self, capsys):
        code, out, _ = run(capsys, "list-profiles")
        assert code == 0
        assert [r["name"] for r in rows(out)] == ["constant", "inverse-quadratic", "rational"]


class TestConfig:
    def test_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# sample\nprofile = rational\nparam.a = 3\nN = 1, 3\nL = 0\nomega = 1.5   # trailing\nnodes = 500\n")
        code, out, _ = run(capsys, "check-solvability", "--config", str(cfg), "--N", "3")
        (row,) = rows(out)
        assert row["profile"] == "rational(a=3)" and row["N"] == "3" and row["omega"] == "1.5"

    def test_param_overrides_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("profile = rational\nparam.a = 3\n")
        args = cli.build_parser().parse_args(["spectrum", "--config", str(cfg), "--param", "a=4"])
        assert cli.make_config(args).params == {"a": 4.0}

    @pytest.mark.parametrize(
        "text",
        ["bogus = 1\n", "N = one\n", "nodes\n", "omega = x\n", "param.a = b\n"],
    )
    def test_bad_config_is_usage_error(self, tmp_path, capsys, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        code, _, err = run(capsys, "spectrum", "--config", str(cfg))
        assert code == 1 and err

    @pytest.mark.parametrize(
        "argv",
        [
            ["spectrum", "--omega", "0"],
            ["spectrum", "--N", ""],
            ["spectrum", "--preset", "bastard"],
            ["spectrum", "--preset", "li-kuhn"],
            ["spectrum", "--profile", "nonexistent"],
            ["spectrum", "--profile", "all", "--param", "a=2"],
            ["spectrum", "--N", "0"],
            ["spectrum", "--N", "1", "--L", "1"],
            ["spectrum", "--refine", "4"],
            ["spectrum", "--config", "/no/such/file"],
            ["nonsense"],
        ],
    )
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, *argv)
        assert code == 1


def test_golden_excited_states(capsys):
    from pathlib import Path

    golden = rows((Path(__file__).parent / "golden" / "excited_states_constant_n3.csv").read_text())
    code, out, _ = run(capsys, "verify", "--N", "3", "--L", "0", "--n", "0,1,2")
    fresh = rows(out)
    assert code == 0 and len(fresh) == len(golden)
    for old, new in zip(golden, fresh):
        assert new["membership"] == old["membership"]
        for key in ("E_analytic", "E_oracle"):
            assert float(new[key]) == pytest.approx(float(old[key]), abs=1e-8)
