import io
import json
import re
import subprocess
import sys
from contextlib import redirect_stdout

import pytest

from dioph.cli import build_parser, main

KEYS = ["command", "params", "rows", "provenance", "runtime_ms"]


def run(*argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def run_json(*argv):
    code, out = run(*argv)
    return code, json.loads(out)


def normalized(out: str) -> str:
    return re.sub(r'"runtime_ms": \d+', '"runtime_ms": 0', out)


def test_verify_examples():
    assert run_json("verify", "--x", "545", "--q", "3", "--m", "3", "--y", "53", "--p", "3")[0] == 0
    assert run_json("verify", "--x", "1", "--q", "3", "--m", "0", "--y", "1", "--p", "5")[0] == 0
    code, rep = run_json("verify", "--x", "2", "--q", "3", "--m", "1", "--y", "2", "--p", "3")
    assert code == 1 and rep["rows"][0]["valid"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--x", "1"],
        ["verify", "--x", "a", "--q", "3", "--m", "0", "--y", "1", "--p", "5"],
        ["verify", "-x", "1"],
        ["sieve", "--p", "7"],
        ["sieve", "--p", "7", "--sets", "5", "--moduli", "11"],
        ["sieve", "--p", "7", "--sets", "9"],
        ["sieve", "--p", "7", "--q", "5", "--sets", "5"],
        ["search", "--workers", "0"],
        ["baker", "--dps", "30"],
        ["baker", "--lam", "1.5"],
        ["reproduce", "table4", "--p", "7"],
        ["reproduce", "nonsense"],
        ["search", "--qm", "5"],  # no abbreviations
        [],
    ],
)
def test_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_no_short_flags():
    def walk(p):
        for a in p._actions:
            assert all(s.startswith("--") for s in a.option_strings), a.option_strings
            if hasattr(a, "choices") and isinstance(a.choices, dict):
                for sub in a.choices.values():
                    walk(sub)

    walk(build_parser())


def test_schema_and_provenance():
    for argv in (
        ["search", "--qm-max", "60", "--p-max", "7", "--y-max", "200"],
        ["decompose", "--x", "79", "--q", "3", "--m", "1", "--y", "5", "--p", "5"],
        ["baker", "--case", "pq"],
        ["sieve", "--p", "2381", "--moduli", "242,866"],
        ["recurrence", "--t-max", "5", "--modulus", "27,17"],
        ["reproduce", "q3-p3"],
    ):
        code, rep = run_json(*argv)
        assert list(rep) == KEYS and rep["command"] == argv[0]
        assert len(rep["rows"]) == len(rep["provenance"]) > 0
        assert all(isinstance(p, str) and p for p in rep["provenance"])
        assert isinstance(rep["runtime_ms"], int)


def test_sieve_examples():
    code, rep = run_json("sieve", "--p", "7", "--sets", "5")
    assert code == 3 and rep["rows"][0]["eliminated"] is False
    code, rep = run_json("sieve", "--p", "2381", "--sets", "5,27,34")
    row = rep["rows"][0]
    assert row["sets"] == {"A5": [0, 1, 2, 3, 4], "A27": [0, 1, 4, 12], "A34": list(range(34))}
    assert row["r_m"] == 1 and code == 3


def test_recurrence_classes():
    code, rep = run_json("recurrence", "--t-max", "5", "--modulus", "27,17")
    assert code == 0
    assert [r["r"] for r in rep["rows"][:6]] == [3, 3, 9, 33, 123, 459]
    assert [(r["period"], r["zero_classes"]) for r in rep["rows"][6:]] == [(18, [5, 14]), (18, [5, 14])]


def test_recurrence_period_bound_inconclusive():
    assert run("recurrence", "--modulus", "10007", "--period-bound", "5")[0] == 3


def test_reproduce_targets():
    assert run_json("reproduce", "lemma-small")[0] == 0
    assert run_json("reproduce", "q3-p3")[0] == 0
    assert run_json("reproduce", "fixed-y")[0] == 0
    assert run_json("reproduce", "baker-bounds", "--case", "pq")[0] == 0
    code, rep = run_json("reproduce", "remark-table")
    assert code == 0 and len(rep["rows"]) == 11
    # the literal sieve disagrees with the recorded row: exit 1 with a diff
    code, rep = run_json("reproduce", "table4", "--p", "2381")
    assert code == 1 and rep["rows"][0]["match"] is False and rep["rows"][0]["expected"]["r_m"] == 44


def test_big_integers_stay_exact():
    code, rep = run_json("reproduce", "remark-table")
    qs = {q for r in rep["rows"] for q in r["q"]}
    assert "224803637342655330236336909331037067112119583602184017999" in qs


def test_formats():
    code, out = run("verify", "--x", "13", "--q", "3", "--m", "2", "--y", "5", "--p", "3", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "x,q,m,y,p,valid,provenance" and lines[1] == "13,3,2,5,3,True,equation"
    code, out = run("verify", "--x", "13", "--q", "3", "--m", "2", "--y", "5", "--p", "3", "--format", "text")
    assert "valid=True" in out


def test_byte_identical_across_runs_and_workers():
    argv = ["search", "--qm-max", "101", "--p-max", "13", "--y-max", "300"]
    a = normalized(run(*argv)[1])
    b = normalized(run(*argv)[1])
    c = normalized(run(*argv, "--workers", "3")[1])
    assert a == b == c


def test_table_deterministic_and_cached(tmp_path, monkeypatch):
    cache = tmp_path / "c.jsonl"
    monkeypatch.setenv("DIOPH_CACHE", str(cache))
    argv = ["table", "--p-min", "1000", "--p-max", "1200"]
    code, out1 = run(*argv, "--workers", "2")
    assert cache.exists() and cache.read_text()
    code2, out2 = run(*argv)  # warm cache, one worker
    assert normalized(out1) == normalized(out2) and code == code2 == 0
    rep = json.loads(out1)
    assert rep["provenance"] == [f"sweep:{r['p']}" for r in rep["rows"]]
    assert all(r["eliminated"] for r in rep["rows"])


def test_cache_flag_overrides_env(tmp_path, monkeypatch):
    monkeypatch.setenv("DIOPH_CACHE", str(tmp_path / "env.jsonl"))
    run("sieve", "--p", "1013", "--sets", "16", "--cache", str(tmp_path / "flag.jsonl"))
    assert (tmp_path / "flag.jsonl").exists() and not (tmp_path / "env.jsonl").exists()


def test_module_entry_point():
    r = subprocess.run(
        [sys.executable, "-m", "dioph", "verify", "--x", "99", "--q", "5", "--m", "1", "--y", "17", "--p", "3"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0 and json.loads(r.stdout)["rows"][0]["valid"] is True
