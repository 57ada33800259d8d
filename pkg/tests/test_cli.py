import json

import numpy as np
import pytest

from lattice_sampling import cli

from conftest import TEST_SEED


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_list_shows_all_lattices(capsys):
    code, out, _ = run_cli(["list"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 1 + 16
    z1 = next(l for l in lines if l.startswith("Z1 "))
    assert "0.500000" in z1  # packing = covering = 1/2
    assert z1.split()[2] == z1.split()[3]
    a8 = next(l for l in lines if l.startswith("A8 "))
    assert a8.split()[1] == "8"


def test_thresholds_default_is_table_order(capsys):
    code, out, _ = run_cli(["thresholds"], capsys)
    assert code == 0
    lines = out.strip().splitlines()[1:]
    names = [l.split()[0] for l in lines]
    assert names == list(cli.catalog.TABLE1_NAMES)
    z4 = next(l for l in lines if l.startswith("Z4"))
    assert z4.split()[2] == "1.000000" and z4.split()[3] == "2.000000"
    a4 = next(l for l in lines if l.startswith("A4"))
    assert a4.split()[2] == "1.293001" and a4.split()[3] == "1.828579"
    z8 = next(l for l in lines if l.startswith("Z8"))
    assert z8.split()[2] == "0.707107" and z8.split()[3] == "2.000000"


def test_thresholds_unknown_name_is_usage_error(capsys):
    code, _, err = run_cli(["thresholds", "--lattices", "Z2,Nope"], capsys)
    assert code == 1
    assert "unknown lattice" in err


def test_curve_csv_schema_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    base = [
        "curve",
        "--lattices",
        "Z1,Z2",
        "--n",
        "4000",
        "--seed",
        str(TEST_SEED),
        "--rate-min",
        "1.0",
        "--rate-max",
        "2.0",
        "--steps",
        "11",
    ]
    code, _, _ = run_cli(base + ["--out", str(out1), "--threads", "1"], capsys)
    assert code == 0
    code, _, _ = run_cli(base + ["--out", str(out2), "--threads", "4"], capsys)
    assert code == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2  # deterministic, independent of worker count
    lines = b1.decode().splitlines()
    assert lines[0] == "lattice,dim,rate,sigma_e2,sigma_lb2,gap,stderr"
    assert len(lines) == 1 + 2 * 11
    # lattice-major, rate-ascending row order
    names = [l.split(",")[0] for l in lines[1:]]
    assert names == ["Z1"] * 11 + ["Z2"] * 11
    rates = [float(l.split(",")[2]) for l in lines[1:12]]
    assert rates == sorted(rates)
    # Z1 rows follow the one-dimensional closed form exactly
    for l in lines[1:12]:
        f = l.split(",")
        assert float(f[3]) == 1.0 - min(1.0, float(f[2]) / 2.0)


def test_curve_json_format(tmp_path, capsys):
    out = tmp_path / "c.json"
    code, _, _ = run_cli(
        [
            "curve",
            "--lattices",
            "Z1",
            "--n",
            "50",
            "--steps",
            "5",
            "--rate-min",
            "1.5",
            "--rate-max",
            "2.5",
            "--format",
            "json",
            "--out",
            str(out),
        ],
        capsys,
    )
    assert code == 0
    rows = json.loads(out.read_text())
    assert len(rows) == 5
    assert set(rows[0]) == {"lattice", "dim", "rate", "sigma_e2", "sigma_lb2", "gap", "stderr"}


def test_curve_requires_valid_grid(capsys):
    code, _, err = run_cli(
        ["curve", "--lattices", "Z1", "--rate-min", "2.0", "--rate-max", "1.0"], capsys
    )
    assert code == 1
    assert "usage error" in err


def test_curve_io_error(tmp_path, capsys):
    code, _, err = run_cli(
        [
            "curve",
            "--lattices",
            "Z1",
            "--n",
            "10",
            "--steps",
            "2",
            "--out",
            str(tmp_path / "missing" / "x.csv"),
        ],
        capsys,
    )
    assert code == 3
    assert "i/o error" in err


def test_curve_cache_roundtrip(tmp_path, capsys):
    cache = tmp_path / "cache"
    args = [
        "curve",
        "--lattices",
        "A2",
        "--n",
        "3000",
        "--steps",
        "7",
        "--cache-dir",
        str(cache),
        "--out",
    ]
    code, _, _ = run_cli(args + [str(tmp_path / "r1.csv")], capsys)
    assert code == 0
    cached = list(cache.glob("A2_*.profile"))
    assert len(cached) == 1
    code, _, _ = run_cli(args + [str(tmp_path / "r2.csv")], capsys)
    assert code == 0
    assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()


def test_cache_dir_env_default(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("LATTICE_SAMPLER_CACHE", str(tmp_path / "envcache"))
    code, _, _ = run_cli(
        ["curve", "--lattices", "Z1", "--n", "20", "--steps", "2", "--out", str(tmp_path / "o.csv")],
        capsys,
    )
    assert code == 0
    assert list((tmp_path / "envcache").glob("Z1_*.profile"))


def test_crossover_bcc_fcc_quick(tmp_path, capsys):
    out = tmp_path / "x.json"
    code, _, _ = run_cli(
        [
            "crossover",
            "A3",
            "A3_dual",
            "--n",
            "20000",
            "--seed",
            str(TEST_SEED),
            "--out",
            str(out),
        ],
        capsys,
    )
    assert code == 0
    result = json.loads(out.read_text())
    assert abs(result["crossover_rate"] - 1.59) < 0.05
    assert "bracket" in result and len(result["bracket"]["rates"]) == 2


def test_crossover_identical_lattices_is_structured_no_crossover(capsys):
    code, out, _ = run_cli(["crossover", "Z2", "Z2", "--n", "500"], capsys)
    assert code == 0
    result = json.loads(out)
    assert result["crossover_rate"] is None
    assert "reason" in result


def test_crossover_unknown_lattice(capsys):
    code, _, err = run_cli(["crossover", "Z2", "Nope", "--n", "10"], capsys)
    assert code == 1


def test_usage_error_without_command(capsys):
    assert cli.main([]) == 1


def test_verify_passes_on_fresh_build(capsys):
    code, out, _ = run_cli(["verify", "--n", "2000", "--seed", str(TEST_SEED)], capsys)
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("[")]
    assert len(lines) == 4
    assert all(l.startswith("[PASS]") for l in lines)
    assert any("threshold-table" in l for l in lines)
    assert any("decoder-oracle" in l for l in lines)


def test_verify_fails_with_corrupted_table(capsys, monkeypatch):
    monkeypatch.setitem(cli.THRESHOLD_TABLE, "Z1", (2.1, 2.0))
    monkeypatch.setattr(cli, "_check_decoder_oracle", lambda q, s: (True, "skipped"))
    monkeypatch.setattr(cli, "_check_cell_volume", lambda p: (True, "skipped"))
    monkeypatch.setattr(cli, "_check_bound_dominance", lambda p: (True, "skipped"))
    monkeypatch.setattr(
        cli, "profile_for", lambda *a, **k: None
    )
    code, out, _ = run_cli(["verify", "--n", "10"], capsys)
    assert code == 2
    assert "[FAIL] threshold-table" in out
