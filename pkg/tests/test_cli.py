import json

import pytest

from wstar import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gen_writes_deterministic_file(tmp_path, capsys):
    p1 = tmp_path / "a.json"
    p2 = tmp_path / "b.json"
    assert cli.main(["gen", "--seed", "5", "-o", str(p1)]) == 0
    assert cli.main(["gen", "--seed", "5", "-o", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_check_seed_passes(capsys):
    code, out, err = run_cli(capsys, "check", "--seed", "0", "--no-timestamp")
    assert code == 0
    assert "checks passed" in out
    assert "FAIL" not in out


def test_check_reports_are_byte_identical(capsys):
    code1, out1, _ = run_cli(capsys, "check", "--seed", "3", "--no-timestamp")
    code2, out2, _ = run_cli(capsys, "check", "--seed", "3", "--no-timestamp")
    assert code1 == code2 == 0
    assert out1 == out2


def test_timestamp_header_present_by_default(capsys):
    code, out, _ = run_cli(capsys, "demo", "example1")
    assert code == 0
    assert out.startswith("# generated ")
    code, out, _ = run_cli(capsys, "demo", "example1", "--no-timestamp")
    assert code == 0
    assert not out.startswith("# generated")


def test_check_file_round_trip(tmp_path, capsys):
    path = tmp_path / "inst.json"
    assert cli.main(["gen", "--seed", "1", "-o", str(path)]) == 0
    capsys.readouterr()
    code, out, err = run_cli(capsys, "check", str(path), "--no-timestamp")
    assert code == 0


def test_json_out_schema(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, _, _ = run_cli(
        capsys, "check", "--seed", "2", "--no-timestamp", "--json-out", str(report)
    )
    assert code == 0
    data = json.loads(report.read_text())
    assert data["verb"] == "check"
    assert data["summary"]["failed"] == 0
    assert {"name", "passed", "residual", "tolerance", "detail"} <= set(
        data["results"][0]
    )


def test_parallel_matches_serial(capsys):
    code1, out1, _ = run_cli(capsys, "check", "--seed", "4", "--no-timestamp")
    code2, out2, _ = run_cli(
        capsys, "check", "--seed", "4", "--no-timestamp", "--parallel", "2"
    )
    assert code1 == code2 == 0
    assert out1 == out2


def test_spectrum_verb(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--seed", "0", "--no-timestamp")
    assert code == 0
    assert "total class" in out


def test_hodge_and_index_verbs(capsys):
    code, out, _ = run_cli(capsys, "hodge", "--seed", "0", "--no-timestamp")
    assert code == 0
    assert "harmonic" in out
    code, out, _ = run_cli(capsys, "index", "--seed", "0", "--no-timestamp")
    assert code == 0
    assert "three-way agreement: PASS" in out


def test_lefschetz_verb(capsys):
    code, out, _ = run_cli(capsys, "lefschetz", "--seed", "1", "--no-timestamp")
    assert code == 0
    assert "chern consistency: PASS" in out
    assert "flat-trace bridge: PASS" in out


def test_demo_exact_kernel(capsys):
    code, out, _ = run_cli(capsys, "demo", "example1", "--no-timestamp")
    assert code == 0
    assert "kernel rank 5 of 9" in out


def test_unknown_verb_exits_3(capsys):
    assert cli.main(["frobnicate"]) == 3


def test_missing_file_exits_3(capsys):
    assert cli.main(["check", "/nonexistent/path.json"]) == 3


def test_bad_instance_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json", encoding="utf-8")
    assert cli.main(["check", str(bad)]) == 3


def test_missing_map_exits_3(capsys):
    assert cli.main(["spectrum", "--seed", "0", "--unitary", "nope"]) == 3


def test_wstar_tol_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("WSTAR_TOL", "1e-6")
    code, out, _ = run_cli(capsys, "check", "--seed", "0", "--no-timestamp")
    assert code == 0
    assert "tol=1.0e-05" in out or "tol=1.0e-03" in out  # rescaled thresholds visible
    monkeypatch.delenv("WSTAR_TOL")
    from wstar import config

    config.refresh_from_env()
