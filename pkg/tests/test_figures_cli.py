import csv
import subprocess
import sys

import pytest

from swor_bounds.cli import main
from swor_bounds.core_types import DomainError
from swor_bounds.figures import COLUMNS, GridSpec, crossover, figure_rows


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_eval_prints_value(capsys):
    code, out = _run(capsys, "eval", "serfling_hg", "--n", "100", "--D", "200", "--N", "2001",
                     "--lambda", "1")
    assert code == 0
    bid, raw, clamped, ok = out.out.split()
    assert bid == "serfling_hg" and ok == "true"
    assert float(raw) == pytest.approx(0.1219552693230921986, rel=1e-14)


def test_exit_codes(capsys, tmp_path):
    assert _run(capsys, "eval", "lp_hyper", "--n", "16", "--D", "40", "--N", "100",
                "--lambda", "3")[0] == 2
    assert _run(capsys, "eval", "nope", "--lambda", "1")[0] == 3
    assert _run(capsys, "major", "run", "--input", str(tmp_path / "missing.txt"))[0] == 4
    assert _run(capsys, "eval")[0] == 3


def test_sweep_csv_is_deterministic(capsys, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        path = tmp_path / name
        code, _ = _run(capsys, "sweep", "serfling_hg", "bennett_hyper", "--n", "10", "--D", "20",
                       "--N", "50", "--lambda-min", "0.1", "--lambda-max", "2", "--steps", "7",
                       "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = list(csv.reader(outs[0].decode().splitlines()))
    assert rows[0] == ["bound_id", "input", "lambda", "raw", "clamped", "domain_ok"]
    assert len(rows) == 1 + 2 * 7


def test_oracle_and_major_commands(capsys, tmp_path):
    code, out = _run(capsys, "oracle", "tail", "--n", "4", "--D", "2", "--N", "8", "--k", "1")
    assert code == 0 and out.out.split()[0] == "11/14"
    pop = tmp_path / "pop.txt"
    pop.write_text("\n".join(f"{i}/14" for i in range(15)) + "\n")
    code, out = _run(capsys, "major", "verify-order", "--input", str(pop), "--n", "3",
                     "--family", "convex")
    assert code == 0


def test_figure_command_writes_table(capsys, tmp_path):
    path = tmp_path / "fig2.csv"
    code, _ = _run(capsys, "figure", "fig2", "--out", str(path), "--steps", "5",
                   "--lambda-min", "0.1", "--lambda-max", "2")
    assert code == 0
    rows = list(csv.DictReader(path.open()))
    assert tuple(rows[0]) == COLUMNS
    assert len(rows) == 2 * 7 * 5


def test_crossover_command(capsys):
    code, out = _run(capsys, "crossover", "chatterjee_general", "serfling_hg",
                     "--n", "100", "--D", "200", "--N", "2001")
    assert code == 0
    assert float(out.out.split()[0]) == pytest.approx(755 / 2001, abs=1e-8)


def test_crossover_edge_cases():
    assert crossover("serfling_hg", "serfling_hg", 100, 200, 2001) == []
    with pytest.raises(DomainError):
        crossover("kemperman_major", "serfling_hg", 100, 50, 2001)


def test_fig3_marks_conjecture_invalid():
    rows = figure_rows("fig3", GridSpec(0.1, 1.0, 4))
    conj = [r for r in rows if r.curve.startswith("conjectured_serfling")]
    assert conj and not any(r.domain_ok for r in conj)


def test_fig1b_difference_nonnegative():
    rows = figure_rows("fig1b")
    assert len(rows) == 400
    assert all(r.raw >= -1e-15 for r in rows if r.domain_ok)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "swor_bounds", "oracle", "pmf", "--n", "2",
                          "--D", "3", "--N", "8", "--k", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.split()[0] == "15/28"
