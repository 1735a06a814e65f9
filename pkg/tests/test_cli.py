import json
import os
import re

import numpy as np
import pytest

from arakelov import cli
from arakelov import invariants as inv
from arakelov.numerics import AllCensored

FAST = ["--samples", "4096", "--mc-samples", "2000"]


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_periods_json(capsys):
    code, out, _ = run(capsys, "periods", "xn+1:5")
    assert code == 0
    data = json.loads(out)
    assert data["genus"] == 2
    assert data["validation"]["riemann_constant"] == "[10;11]/2"
    assert data["omega_im"][0][0] == pytest.approx(0.85065080835204, abs=1e-12)


def test_seventeen_digits(capsys):
    _, out, _ = run(capsys, "periods", "xn+1:5")
    nums = re.findall(r"-?\d+\.\d+(?:e[-+]\d+)?", out)
    assert any(len(re.sub(r"[-.]|e.*", "", n).lstrip("0")) == 17 for n in nums)


def test_deterministic_output(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for f in (a, b):
        assert cli.main(["invariants", "xn+1:5", *FAST, "--out", str(f)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_duplicate_branch_points_exit_2(capsys, tmp_path):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"branch_points": [[0, 0], [1, 0], [1, 0], [2, 0], [3, 0]]}))
    code, out, err = run(capsys, "periods", str(f))
    assert code == 2 and out == ""
    assert json.loads(err)["error"] == "DuplicateBranchPoint"


def test_bad_config_exit_2(capsys):
    assert run(capsys, "periods", "xn+1:5", "--eps", "-1")[0] == 2


def test_all_censored_exit_3(capsys, monkeypatch):
    def boom(*a, **k):
        raise AllCensored("every sample censored")
    monkeypatch.setattr(inv, "full_report", boom)
    code, _, err = run(capsys, "invariants", "xn+1:5", *FAST)
    assert code == 3 and "AllCensored" in err


def test_negative_margin_exit_4(capsys, monkeypatch):
    real = inv.full_report

    def fake(*a, **k):
        rep = real(*a, **k)
        rep.bounds.append(inv.Bound("forced", -1.0))
        return rep
    monkeypatch.setattr(inv, "full_report", fake)
    code, out, _ = run(capsys, "invariants", "xn+1:5", *FAST)
    assert code == 4
    assert json.loads(out)


def test_period_only_input(capsys, tmp_path):
    from arakelov.hyperelliptic import period_matrix, xn_plus_one
    om = period_matrix(xn_plus_one(5)).omega
    f = tmp_path / "p.json"
    f.write_text(json.dumps({"genus": 2, "omega_re": om.real.tolist(), "omega_im": om.imag.tolist()}))
    code, out, _ = run(capsys, "invariants", str(f), *FAST, "--format", "csv")
    assert code == 0
    rows = {r.split(",")[0]: r.split(",") for r in out.splitlines()[1:]}
    assert rows["Lambda"][3] == "unavailable"
    assert "delta" not in rows


def test_atomic_write_leaves_no_temp(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old")
    cli.write_atomic(str(target), "new")
    assert target.read_text() == "new"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_atomic_write_keeps_old_file_on_failure(tmp_path, monkeypatch):
    target = tmp_path / "out.txt"
    target.write_text("old")

    def fail(*a):
        raise OSError("disk full")
    monkeypatch.setattr(os, "replace", fail)
    with pytest.raises(OSError):
        cli.write_atomic(str(target), "new")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["out.txt"]


def test_verify_combinatorics(capsys):
    code, out, _ = run(capsys, "verify", "combinatorics")
    assert code == 0 and json.loads(out)["pass"] is True


def test_table1_csv_default(capsys):
    code, out, _ = run(capsys, "table1", "--rows", "5", "--samples", "65536")
    assert code == 0
    head, row = out.splitlines()
    assert head.startswith("n,genus,log_delta")
    assert row.endswith("pass")


def test_dumps_nonfinite():
    assert cli.dumps({"a": float("nan"), "b": np.float64(0.1)}) == '{\n  "a": null,\n  "b": 0.10000000000000001\n}'
