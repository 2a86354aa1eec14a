import subprocess
import sys

import pytest

CLI = [sys.executable, "-m", "blregion.cli"]


def run_cli(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True,
                          timeout=300, **kw)


@pytest.fixture(scope="module")
def div_run():
    return run_cli("--report", "divisibility", "--max-stem", "12")


def test_divisibility_report(div_run):
    assert div_run.returncode == 0, div_run.stderr
    lines = div_run.stdout.splitlines()
    assert any(line.startswith("4") and "rho^3" in line for line in lines)
    # tab-separated block repeats every row
    assert "4\trho^3\t3" in div_run.stdout


def test_fixed_points_report():
    r = run_cli("--report", "fixed-points", "--max-stem", "12")
    assert r.returncode == 0
    assert "5\t2^4\t4" in r.stdout  # image 16 Z on the fifth stem
    assert "8\t2^5\t5" in r.stdout


def test_two_divisibility_report():
    r = run_cli("--report", "two-divisibility", "--max-stem", "12")
    assert r.returncode == 0
    assert "8\t2^3\t3" in r.stdout
    assert "9\t2^4\t4" in r.stdout
    tsv = r.stdout.split("\n\n")[-1]
    assert not any(line.startswith("4\t") for line in tsv.splitlines())  # k >= 5


def test_mahowald_report():
    r = run_cli("--report", "mahowald", "--max-stem", "12")
    assert r.returncode == 0
    assert "2^6\tP h_1^2\tnot computed" in r.stdout
    assert "2^4\th_0^3 h_3\tnot computed" in r.stdout


def test_census_report_lists_h0_tower():
    r = run_cli("--report", "census", "--max-stem", "8")
    assert r.returncode == 0
    rows = [l.split("\t") for l in r.stdout.splitlines() if "\t" in l]
    stem0 = [row for row in rows if row[0] == "0"]
    names = {row[3] for row in stem0}
    assert {"1", "h_0", "h_0^2", "h_0^3"} <= names


def test_chart_written_and_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.svg", tmp_path / "b.svg"
    r1 = run_cli("--chart", "einf", "--format", "svg", "--out", str(out1),
                 "--max-stem", "12")
    r2 = run_cli("--chart", "einf", "--format", "svg", "--out", str(out2),
                 "--max-stem", "12")
    assert r1.returncode == 0 and r2.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_bytes().startswith(b"<?xml")


def test_ko_chart_tikz(tmp_path):
    out = tmp_path / "ko.tex"
    r = run_cli("--chart", "ko", "--format", "tikz", "--out", str(out),
                "--max-stem", "12")
    assert r.returncode == 0
    assert b"tikzpicture" in out.read_bytes()


def test_usage_error_exit_code():
    assert run_cli("--report", "nonsense").returncode == 2
    assert run_cli("--coweights", "azz").returncode == 2


def test_small_window_rejected_for_reports():
    # torsion-witness differentials need the eighth stem
    r = run_cli("--report", "divisibility", "--max-stem", "6")
    assert r.returncode == 2
    assert "max-stem" in r.stderr


def test_missing_catalog_is_io_error(tmp_path):
    r = run_cli("--catalog", str(tmp_path / "nope.txt"), "--report", "census")
    assert r.returncode == 4


def test_broken_catalog_is_constraint_error(tmp_path):
    bad = tmp_path / "cat.txt"
    from importlib import resources

    text = resources.files("blregion").joinpath("data/catalog.txt").read_text("utf-8")
    bad.write_text(text.replace("h_3  |  7 1  4", "h_3  |  7 1  5"))
    r = run_cli("--catalog", str(bad), "--report", "census")
    assert r.returncode == 3
    assert "h_0 h_3" in r.stderr  # names the violated row


def test_rules_override_flag(tmp_path):
    rules = tmp_path / "rules.txt"
    rules.write_text("# extra declared-zero differential, harmless\n"
                     "3 | tau^{4k+4} | 0 | 0..1\n")
    r = run_cli("--report", "divisibility", "--max-stem", "12",
                "--rules-override", str(rules))
    assert r.returncode == 0


def test_coweights_flag():
    r = run_cli("--report", "census", "--max-stem", "10", "--coweights=-1..1")
    assert r.returncode == 0
    assert "Q h_1^4" in r.stdout


def test_reports_deterministic():
    a = run_cli("--report", "census", "--max-stem", "10")
    b = run_cli("--report", "census", "--max-stem", "10")
    assert a.stdout == b.stdout
