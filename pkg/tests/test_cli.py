import csv
import subprocess
import sys

import pytest

from adaptive_ldpc.cli import main
from adaptive_ldpc.formats import read_alist, read_shift_table, write_alist


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_min_nodes_prints_28(capsys):
    assert run(capsys, "min-nodes", "--ebn0", "-3", "--target-ber", "1e-5")[:2] == (0, "28\n")
    assert run(capsys, "min-nodes", "--ebn0", "-3", "--target-ber", "1e-5", "--strict")[1] == "29\n"


def test_girth_on_hamming_alist(capsys, tmp_path, hamming_H):
    path = tmp_path / "h.alist"
    write_alist(path, hamming_H)
    code, out, _ = run(capsys, "girth", "--alist", str(path))
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "girth,multiplicity,elapsed"
    assert lines[1].split(",")[:2] == ["4", "2"]


def test_unknown_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["min-nodes", "--ebn0", "0", "--target-ber", "1e-3", "--bogus"])
    assert exc.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_missing_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_runtime_failure_exits_1(capsys, tmp_path):
    code, _, err = run(capsys, "girth", "--alist", str(tmp_path / "missing.alist"))
    assert code == 1 and err.startswith("error:")
    assert run(capsys, "min-nodes", "--ebn0", "0", "--target-ber", "0.7")[0] == 1


def test_analytic_table(capsys):
    code, out, _ = run(capsys, "analytic", "--m-list", "10,28", "--ebn0-list", "-3", "0")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and len(rows) == 4
    assert rows[0].keys() == {"M", "ebn0_db", "ber"}
    r28 = next(r for r in rows if r["M"] == "28" and float(r["ebn0_db"]) == -3)
    assert 0.8e-5 <= float(r28["ber"]) <= 1.2e-5


def test_siso_table(capsys):
    code, out, _ = run(capsys, "siso", "--ebn0-list", "0,10")
    rows = list(csv.DictReader(out.splitlines()))
    assert code == 0 and float(rows[0]["ber"]) == pytest.approx(0.1464, abs=1e-4)


def _construct(capsys, prefix, seed=7):
    return run(
        capsys, "construct", "--n", "96", "--rate", "1/2", "--seed", str(seed),
        "--out-prefix", str(prefix), "--max-evaluations", "300", "--population", "20",
    )


def test_construct_outputs_and_determinism(capsys, tmp_path):
    code, out, _ = _construct(capsys, tmp_path / "a" / "c")
    assert code == 0
    assert out.startswith("v=24 N_tx=96 K=48 rate=1/2 girth=")
    _construct(capsys, tmp_path / "b" / "c")
    for ext in (".shifts", ".alist", "_log.csv"):
        a = (tmp_path / "a" / f"c{ext}").read_bytes()
        b = (tmp_path / "b" / f"c{ext}").read_bytes()
        assert a == b
    shifts = read_shift_table(tmp_path / "a" / "c.shifts")
    assert (read_alist(tmp_path / "a" / "c.alist") == shifts.H).all()
    log = list(csv.DictReader((tmp_path / "a" / "c_log.csv").open()))
    assert list(log[0]) == ["eval_index", "girth", "multiplicity", "best_so_far"]
    assert 2 <= len(log) <= 300


def test_girth_on_shift_table(capsys, tmp_path):
    _construct(capsys, tmp_path / "c")
    code, out, _ = run(capsys, "girth", "--shifts", str(tmp_path / "c.shifts"))
    fast = out.splitlines()[1].split(",")[:2]
    _, out, _ = run(capsys, "girth", "--alist", str(tmp_path / "c.alist"))
    assert code == 0 and out.splitlines()[1].split(",")[:2] == fast


def test_construct_girth_target_failure(capsys, tmp_path):
    code, _, err = run(
        capsys, "construct", "--n", "48", "--rate", "1/2", "--girth-target", "14",
        "--out-prefix", str(tmp_path / "x"), "--max-evaluations", "50",
    )
    assert code == 1 and "girth" in err


def test_simulate(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "code = uncoded\nn = 500\nm_list = 1,4\nebn0_list = 0\n"
        "max_frames = 20\nseed = 3\nout = out/res.csv\n"
    )
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0
    rows = list(csv.DictReader((tmp_path / "out" / "res.csv").open()))
    assert [r["M"] for r in rows] == ["1", "4"]
    assert "BER" in out


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "adaptive_ldpc", "min-nodes", "--ebn0", "3.6", "--target-ber", "1e-5"],
        capture_output=True, text=True, check=True,
    )
    assert res.stdout.strip() == "10"
