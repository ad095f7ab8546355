"""Command-line interface.

    dioph verify --x 545 --q 3 --m 3 --y 53 --p 3
    dioph search --qm-max 501 --p-max 50 --y-max 5000
    dioph decompose --x 79 --q 3 --m 1 --y 5 --p 5
    dioph baker --case qm503
    dioph sieve --p 2381 --sets 5,27,34
    dioph reproduce lemma-small
    dioph table --workers 8
    dioph recurrence --t-max 20 --modulus 27

Every command prints one report {command, params, rows, provenance,
runtime_ms}. Exit codes: 0 ok, 1 mismatch or false, 2 usage error,
3 inconclusive.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from typing import Any, Callable, Optional

import mpmath

from . import baker, descent, expected, hpoly, sieve
from .errors import ConfigurationError, InconclusiveError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3

REPRODUCE_TARGETS = ("lemma-small", "remark-table", "baker-bounds", "table3", "table4", "q3-p3", "fixed-y")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # long flags only, so --help replaces the default -h/--help pair
    def __init__(self, *a, **kw):
        kw["add_help"] = False
        super().__init__(*a, **kw)
        self.add_argument("--help", action="help", help="show this help message and exit")

    def error(self, message):  # argparse exits with 2 already; keep the message on stderr
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------------------
# output


def _jsonable(x: Any) -> Any:
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    if isinstance(x, tuple):
        return [_jsonable(i) for i in x]
    if isinstance(x, list):
        return [_jsonable(i) for i in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, mpmath.mpf):
        return mpmath.nstr(x, 20)
    if isinstance(x, int) and not isinstance(x, bool) and abs(x) >= 2**53:
        return str(x)  # keep big integers exact in JSON consumers
    return x


def _emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(_jsonable(report), indent=2, sort_keys=False) + "\n")
        return
    rows = report["rows"]
    if fmt == "csv":
        keys: list[str] = []
        for r in rows:
            for k in r:
                if k not in keys:
                    keys.append(k)
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=keys + ["provenance"], lineterminator="\n")
        w.writeheader()
        for r, prov in zip(rows, report["provenance"]):
            w.writerow({**{k: json.dumps(_jsonable(v)) if isinstance(v, (list, dict, tuple)) else _jsonable(v)
                           for k, v in r.items()}, "provenance": prov})
        out.write(buf.getvalue())
        return
    out.write(f"# {report['command']} {json.dumps(_jsonable(report['params']))}\n")
    for r, prov in zip(rows, report["provenance"]):
        body = "  ".join(f"{k}={_jsonable(v)}" for k, v in r.items())
        out.write(f"{body}  [{prov}]\n")
    out.write(f"# {len(rows)} rows, {report['runtime_ms']} ms\n")


def _report(command: str, params: dict, rows: list[dict], provenance: list[str], t0: float) -> dict:
    if len(rows) != len(provenance):
        raise AssertionError("one provenance entry per row")
    return {
        "command": command,
        "params": params,
        "rows": rows,
        "provenance": provenance,
        "runtime_ms": int(round((time.perf_counter() - t0) * 1000)),
    }


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _cache(args) -> Optional[sieve.SieveCache]:
    path = args.cache if args.cache is not None else os.environ.get("DIOPH_CACHE")
    return sieve.SieveCache(path) if path else None


def _tuple_row(t: descent.SolutionTuple) -> dict:
    return {"x": t.x, "q": t.q, "m": t.m, "y": t.y, "p": t.p}


# ---------------------------------------------------------------------------
# commands


def cmd_verify(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    t = descent.SolutionTuple(x=args.x, q=args.q, m=args.m, y=args.y, p=args.p)
    ok = descent.verify_solution(t)
    row = {**_tuple_row(t), "valid": ok}
    return _report("verify", vars_of(args), [row], ["equation"], t0), EXIT_OK if ok else EXIT_MISMATCH


def cmd_search(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    sols = descent.search_small(args.qm_max, args.p_max, args.y_max, workers=args.workers)
    rows = [_tuple_row(t) for t in sols]
    return _report("search", vars_of(args), rows, ["search-small"] * len(rows), t0), EXIT_OK


def cmd_decompose(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    t = descent.SolutionTuple(x=args.x, q=args.q, m=args.m, y=args.y, p=args.p)
    if not descent.verify_solution(t):
        return _report("decompose", vars_of(args), [], [], t0), EXIT_MISMATCH
    rows = []
    for w in descent.decompose(t):
        f, g = hpoly.eval_FG(w.u, w.v, t.p)
        rows.append({
            "u": w.u, "v": w.v, "k": w.k, "sign": w.sign,
            "class": descent.classify_k(w, t.m, t.p, t.q).value, "F": f, "G": g,
        })
    return _report("decompose", vars_of(args), rows, ["descent-witness"] * len(rows), t0), EXIT_OK


def cmd_baker(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    if args.dps < 60:
        raise UsageError("--dps must be at least 60")
    baker.DPS = args.dps
    ref = expected.load()["baker_bounds"]
    names = list(baker.CASES) if args.case == "all" else [args.case]
    rows, prov = [], []
    status = EXIT_OK
    for name in names:
        b, cert = baker.p_bound_for_case(name, ceiling=args.ceiling, lam=args.lam)
        ok = baker.check_certificate(cert)
        within = b <= ref[name]
        rows.append({
            "case": name,
            "description": baker.CASES[name].description,
            "p_bound": b,
            "reference_bound": ref[name],
            "within_reference": within,
            "certificate_ok": ok,
            "blocks": len(cert.blocks),
            "failing": cert.failing,
        })
        prov.append(f"baker-bounds:{name}")
        if not (ok and within):
            status = EXIT_MISMATCH
    if args.liouville_y_min:
        rows.append({"case": "liouville", "y_min": args.liouville_y_min,
                     "p_bound": baker.liouville_p_max(args.liouville_y_min)})
        prov.append("baker-bounds:liouville")
    return _report("baker", vars_of(args), rows, prov, t0), status


def _sieve_rows(p: int, labels: list[str], cache) -> tuple[list[dict], list[str], int]:
    rep = sieve.eliminate_prime(p, labels, cache)
    asets = [sieve.a_set(p, l, cache) for l in rep.strategy]
    crt = sieve.crt_min_nonzero(asets)
    row = {
        **rep.as_dict(),
        "crt_modulus": crt.modulus,
        "crt_values": list(crt.values),
        "verdict": "eliminated" if rep.eliminated else "not-eliminated",
    }
    return [row], ["sieve"], EXIT_OK if rep.eliminated else EXIT_INCONCLUSIVE


def cmd_sieve(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    cache = _cache(args)
    try:
        if args.moduli:
            rows, prov = [], []
            for w in args.moduli:
                s = sieve.l_set(args.p, args.q, w, cache)
                rows.append({"p": s.p, "q": s.q, "w": s.w, "order": s.order, "classes": sorted(s.classes)})
                prov.append("sieve:l-set")
            status = EXIT_OK
        else:
            if args.q != 3:
                raise UsageError("named A-sets are defined for q = 3 only; use --moduli")
            rows, prov, status = _sieve_rows(args.p, [f"A{n}" for n in args.sets], cache)
    finally:
        if cache is not None:
            cache.flush()
    return _report("sieve", vars_of(args), rows, prov, t0), status


def cmd_recurrence(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    seq = descent.q3_recurrence(args.t_max)
    rows = [{"t": t, "r": r, "closed_form_ok": descent.recurrence_closed_form(t) == r} for t, r in enumerate(seq.r)]
    prov = ["recurrence"] * len(rows)
    for n in args.modulus or []:
        period, classes = descent.recurrence_divisibility_classes(n, args.period_bound)
        rows.append({"modulus": n, "period": period, "zero_classes": sorted(classes)})
        prov.append("recurrence:classes")
    return _report("recurrence", vars_of(args), rows, prov, t0), EXIT_OK


def cmd_table(args) -> tuple[dict, int]:
    """Full elimination sweep, one row per prime."""
    t0 = time.perf_counter()
    cache = _cache(args)
    primes = sieve.sweep_primes(args.p_min, args.p_max)
    reps = sieve.sweep(primes, expected.recorded_strategies(), workers=args.workers, cache=cache)
    rows = []
    for r in reps:
        d = r.as_dict()
        d["kind"] = "zero-sets" if r.r_m is None else "crt"
        rows.append(d)
    status = EXIT_OK if all(r.eliminated for r in reps) else EXIT_INCONCLUSIVE
    return _report("table", vars_of(args), rows, [f"sweep:{r.p}" for r in reps], t0), status


# ---------------------------------------------------------------------------
# reproduce


def _diff_row(row: dict, match: bool, **expected_vals) -> dict:
    row["match"] = match
    if not match:
        row["expected"] = expected_vals
    return row


def _rep_lemma_small(args):
    exp = [tuple(r) for r in expected.load()["lemma_small"]]
    got = [t.as_xyqmp() for t in descent.search_small(501, 50, 5000, workers=args.workers)]
    rows, prov = [], []
    for i, e in enumerate(exp):
        x, y, q, m, p = e
        rows.append(_diff_row({"x": x, "y": y, "q": q, "m": m, "p": p}, e in got))
        prov.append(f"lemma-small:{i + 1}")
    for g in got:
        if g not in exp:
            x, y, q, m, p = g
            rows.append(_diff_row({"x": x, "y": y, "q": q, "m": m, "p": p}, False, row="absent from reference"))
            prov.append("lemma-small:extra")
    return rows, prov


def _rep_remark(args):
    rows, prov = [], []
    for i, (y, p, q_ref) in enumerate(expected.load()["remark_table"]):
        cands = descent.generate_large_solution(y, p)
        qs = [str(q) for _, q, _ in cands]
        hit = [c for c in cands if str(c[1]) == q_ref]
        ok = bool(hit) and hit[0][2]
        rows.append(_diff_row({"y": y, "p": p, "q": qs, "q_is_prime": [c[2] for c in cands]}, ok, q=q_ref))
        prov.append(f"remark-table:{i + 1}")
    return rows, prov


def _rep_baker(args):
    ref = expected.load()["baker_bounds"]
    names = [args.case] if args.case else list(baker.CASES)
    rows, prov = [], []
    for name in names:
        b, cert = baker.p_bound_for_case(name)
        ok = b <= ref[name] and baker.check_certificate(cert)
        rows.append(_diff_row({"case": name, "p_bound": b, "reference_bound": ref[name]}, ok,
                              p_bound=f"<= {ref[name]}"))
        prov.append(f"baker-bounds:{name}")
    if not args.case:
        lp = baker.liouville_p_max(126505)
        ref = expected.load()["liouville_p_max"]
        rows.append(_diff_row({"case": "liouville", "p_bound": lp}, lp == ref, p_bound=ref))
        prov.append("baker-bounds:liouville")
    return rows, prov


def _rep_table3(args):
    rows, prov = [], []
    cache = _cache(args)
    for p, labels in expected.load()["table3"]:
        if args.p and p != args.p:
            continue
        rep = sieve.eliminate_prime(p, labels, cache)
        ok = rep.r_m is None and all(c == frozenset({0}) for c in rep.sets.values()) and rep.eliminated
        row = rep.as_dict()
        rows.append(_diff_row(row, ok, sets={f"A{n}": [0] for n in labels}, eliminated=True))
        prov.append(f"table3:{p}")
    if cache is not None:
        cache.flush()
    return rows, prov


def _rep_table4(args):
    rows, prov = [], []
    cache = _cache(args)
    for p, r_m, labels in expected.load()["table4"]:
        if args.p and p != args.p:
            continue
        rep = sieve.eliminate_prime(p, labels, cache)
        row = rep.as_dict()
        rows.append(_diff_row(row, rep.r_m == r_m and rep.eliminated, r_m=r_m, eliminated=True))
        prov.append(f"table4:{p}")
    if cache is not None:
        cache.flush()
    return rows, prov


def _rep_q3p3(args):
    exp = sorted(tuple(r) for r in expected.load()["q3_p3"])
    got = sorted(descent.solve_q3_p3())
    rows = [_diff_row({"x": x, "y": y, "m": m}, (x, y, m) in exp) for x, y, m in got]
    rows += [_diff_row({"x": x, "y": y, "m": m}, False, row="missing") for x, y, m in exp if (x, y, m) not in got]
    return rows, ["q3-p3"] * len(rows)


def _rep_fixed_y(args):
    y = args.y or 17
    exp = sorted(tuple(r) for r in expected.load()["fixed_y_17"]) if y == 17 else None
    got = sorted((t.x, t.q, t.m, t.p) for t in descent.solve_fixed_y(y))
    rows = []
    for x, q, m, p in got:
        ok = True if exp is None else (x, q, m, p) in exp
        rows.append(_diff_row({"x": x, "q": q, "m": m, "y": y, "p": p}, ok))
    if exp is not None:
        for x, q, m, p in exp:
            if (x, q, m, p) not in got:
                rows.append(_diff_row({"x": x, "q": q, "m": m, "y": y, "p": p}, False, row="missing"))
    return rows, [f"fixed-y:{y}"] * len(rows)


_REPRODUCERS: dict[str, Callable] = {
    "lemma-small": _rep_lemma_small,
    "remark-table": _rep_remark,
    "baker-bounds": _rep_baker,
    "table3": _rep_table3,
    "table4": _rep_table4,
    "q3-p3": _rep_q3p3,
    "fixed-y": _rep_fixed_y,
}


def cmd_reproduce(args) -> tuple[dict, int]:
    t0 = time.perf_counter()
    rows, prov = _REPRODUCERS[args.target](args)
    if args.p and args.target in ("table3", "table4") and not rows:
        raise UsageError(f"p = {args.p} is not a row of {args.target}")
    status = EXIT_OK if rows and all(r.get("match") for r in rows) else EXIT_MISMATCH
    return _report("reproduce", vars_of(args), rows, prov, t0), status


# ---------------------------------------------------------------------------
# parser


def vars_of(args) -> dict:
    # output must not depend on where or how parallel it ran
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "format", "cache", "command", "workers")}


def _add_common(sp) -> None:
    sp.add_argument("--format", choices=("json", "csv", "text"), default="json")
    sp.add_argument("--cache", default=None, help="sieve cache file (default: $DIOPH_CACHE)")
    sp.add_argument("--workers", type=int, default=1, help="worker processes")


def _add_tuple(sp) -> None:
    for name in ("x", "q", "m", "y", "p"):
        sp.add_argument(f"--{name}", type=int, required=True)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="dioph", description="Tools for x^2 + q^(2m) = 2 y^p.", allow_abbrev=False)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("verify", help="check a tuple (x, q, m, y, p)", allow_abbrev=False)
    _add_tuple(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("search", help="bounded search for solutions", allow_abbrev=False)
    sp.add_argument("--qm-max", type=int, default=501)
    sp.add_argument("--p-max", type=int, default=50)
    sp.add_argument("--y-max", type=int, default=5000)
    _add_common(sp)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("decompose", help="descent witnesses of a solution", allow_abbrev=False)
    _add_tuple(sp)
    _add_common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("baker", help="exponent bounds per case", allow_abbrev=False)
    sp.add_argument("--case", choices=("all",) + tuple(baker.CASES), default="all")
    sp.add_argument("--ceiling", type=int, default=baker.P_CEILING)
    sp.add_argument("--lam", default="1.8", help="lambda in [1.8, 4)")
    sp.add_argument("--dps", type=int, default=60, help="decimal digits (>= 60)")
    sp.add_argument("--liouville-y-min", type=int, default=None)
    _add_common(sp)
    sp.set_defaults(func=cmd_baker)

    sp = sub.add_parser("sieve", help="A-sets, CRT and elimination for one prime", allow_abbrev=False)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--q", type=int, default=3)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--sets", type=_int_list, help="A-set orders, e.g. 5,27,34")
    g.add_argument("--moduli", type=_int_list, help="raw moduli w for L(p, q, w)")
    _add_common(sp)
    sp.set_defaults(func=cmd_sieve)

    sp = sub.add_parser("reproduce", help="recompute a reference table and diff it", allow_abbrev=False)
    sp.add_argument("target", choices=REPRODUCE_TARGETS)
    sp.add_argument("--p", type=int, default=None, help="restrict table3/table4 to one prime")
    sp.add_argument("--case", choices=tuple(baker.CASES), default=None)
    sp.add_argument("--y", type=int, default=None, help="y for fixed-y (default 17)")
    _add_common(sp)
    sp.set_defaults(func=cmd_reproduce)

    sp = sub.add_parser("table", help="elimination sweep over 1000 < p <= 3803", allow_abbrev=False)
    sp.add_argument("--p-min", type=int, default=1000)
    sp.add_argument("--p-max", type=int, default=3803)
    _add_common(sp)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("recurrence", help="r_0 = r_1 = 3, r_t = 4 r_(t-1) - r_(t-2)", allow_abbrev=False)
    sp.add_argument("--t-max", type=int, default=20)
    sp.add_argument("--modulus", type=_int_list, default=None, help="moduli for zero classes")
    sp.add_argument("--period-bound", type=int, default=10**6)
    _add_common(sp)
    sp.set_defaults(func=cmd_recurrence)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_USAGE
    if getattr(args, "workers", 1) < 1:
        print("dioph: error: --workers must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        report, status = args.func(args)
    except UsageError as e:
        print(f"dioph: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ConfigurationError) as e:
        print(f"dioph: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InconclusiveError as e:
        print(f"dioph: inconclusive: {e}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    _emit(report, args.format)
    return status


if __name__ == "__main__":
    sys.exit(main())
