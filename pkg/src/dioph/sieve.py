"""Congruence sieve on m for q = 3 and the CRT elimination of primes p.

For a solution with u + d4*v = 3**m and H_p(u, v) = 1, reducing modulo w
gives H_p(3**s - d4*v, v) = 1 (mod w) with s = m mod ord_w(3). Collecting
the admissible s for several moduli of the same order, and then combining
orders through the CRT, forces m to be large, which clashes with the
exponent bounds of :mod:`dioph.baker`.
"""

from __future__ import annotations

import itertools
import json
import math
import os
import tempfile
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError
from .hpoly import delta4, delta8, hp_shifted
from .numth import crt_solve, lcm, multiplicative_order, primes_up_to

__all__ = [
    "A_SET_MODULI",
    "A_SET_ORDERS",
    "BAKER_THRESHOLDS",
    "SieveSet",
    "NamedASet",
    "CRTResult",
    "EliminationReport",
    "SieveCache",
    "l_set",
    "a_set",
    "crt_min_nonzero",
    "cong_class_filter",
    "mod3power_filter",
    "k0_mod3_check",
    "negative_branch_check",
    "implied_p_bound",
    "eliminate_prime",
    "sweep_primes",
    "sweep",
    "find_moduli",
]

A_SET_MODULI: dict[str, tuple[int, ...]] = {
    "A5": (242,),
    "A16": (136, 193, 320, 697),
    "A22": (92, 134, 661),
    "A27": (866, 1417),
    "A34": (103, 307, 1021),
    "A39": (169, 313),
    "A69": (554, 611),
}
A_SET_ORDERS: dict[str, int] = {k: int(k[1:]) for k in A_SET_MODULI}

# (minimum m, resulting bound on p), strongest first
BAKER_THRESHOLDS: tuple[tuple[int, int], ...] = ((250, 1009), (100, 1093), (40, 1309))
BAKER_DEFAULT = 3803

# int64 products stay exact while 2*w**2 < 2**63
_NUMPY_W_LIMIT = 2**31 - 1


@dataclass(frozen=True)
class SieveSet:
    p: int
    q: int
    w: int
    order: int
    classes: frozenset[int]


@dataclass(frozen=True)
class NamedASet:
    label: str
    moduli: tuple[int, ...]
    order: int
    classes: frozenset[int]


# ---------------------------------------------------------------------------
# cache


class SieveCache:
    """Line-delimited JSON store of computed L(p, q, w).

    One record per line with sorted keys {classes, order, p, q, w}. Writes go
    to a temporary file which then replaces the cache in one step, so readers
    never see a half-written file.
    """

    def __init__(self, path: Optional[str] = None):
        self.path = path if path is not None else os.environ.get("DIOPH_CACHE")
        self._data: dict[tuple[int, int, int], SieveSet] = {}
        self._dirty = False
        self._lock = threading.Lock()
        if self.path and os.path.exists(self.path):
            with open(self.path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    s = SieveSet(rec["p"], rec["q"], rec["w"], rec["order"], frozenset(rec["classes"]))
                    self._data[(s.p, s.q, s.w)] = s

    def get(self, p: int, q: int, w: int) -> Optional[SieveSet]:
        return self._data.get((p, q, w))

    def put(self, s: SieveSet) -> None:
        with self._lock:
            if self._data.get((s.p, s.q, s.w)) != s:
                self._data[(s.p, s.q, s.w)] = s
                self._dirty = True

    def __len__(self) -> int:
        return len(self._data)

    def flush(self) -> None:
        if not self.path or not self._dirty:
            return
        with self._lock:
            d = os.path.dirname(os.path.abspath(self.path))
            os.makedirs(d, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=d, prefix=".sieve-", suffix=".jsonl")
            with os.fdopen(fd, "w") as fh:
                for key in sorted(self._data):
                    s = self._data[key]
                    rec = {"classes": sorted(s.classes), "order": s.order, "p": s.p, "q": s.q, "w": s.w}
                    fh.write(json.dumps(rec, sort_keys=True) + "\n")
            os.replace(tmp, self.path)
            self._dirty = False


# ---------------------------------------------------------------------------
# L(p, q, w)


def _gauss_pow_mod(re: np.ndarray, im: np.ndarray, n: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    rr = np.ones_like(re)
    ri = np.zeros_like(im)
    br, bi = re % w, im % w
    while n:
        if n & 1:
            rr, ri = (rr * br - ri * bi) % w, (rr * bi + ri * br) % w
        n >>= 1
        if n:
            br, bi = (br * br - bi * bi) % w, (2 * br * bi) % w
    return rr, ri


def _classes_numpy(p: int, q: int, w: int, order: int) -> set[int]:
    d4 = delta4(p)
    s = np.arange(order, dtype=np.int64)
    qs = np.array([pow(q, int(k), w) for k in s], dtype=np.int64)
    qs_inv = np.array([pow(int(x), -1, w) for x in qs], dtype=np.int64)
    v = np.arange(w, dtype=np.int64)
    u = (qs[:, None] - d4 * v[None, :]) % w
    vv = np.broadcast_to(v, u.shape)
    re, im = _gauss_pow_mod(u, vv, p, w)
    g = (re + im) % w  # Im((1+i)(re + i*im))
    h = g * qs_inv[:, None] % w  # G / (u + d4*v) with u + d4*v = q**s
    hit = (h == 1 % w).any(axis=1)
    return set(np.flatnonzero(hit).tolist())


def _classes_python(p: int, q: int, w: int, order: int) -> set[int]:
    d4 = delta4(p)
    out = set()
    for s in range(order):
        qs = pow(q, s, w)
        inv = pow(qs, -1, w)
        for v in range(w):
            u = (qs - d4 * v) % w
            a, b = 1, 0
            br, bi, n = u, v, p
            while n:
                if n & 1:
                    a, b = (a * br - b * bi) % w, (a * bi + b * br) % w
                n >>= 1
                br, bi = (br * br - bi * bi) % w, (2 * br * bi) % w
            if (a + b) * inv % w == 1 % w:
                out.add(s)
                break
    return out


def l_set(p: int, q: int, w: int, cache: Optional[SieveCache] = None) -> SieveSet:
    """L(p, q, w): the s in [0, ord_w(q)) with H_p(q**s - d4*v, v) = 1 (mod w) solvable.

    Every v mod w is tried. Since u + d4*v = q**s is a unit mod w, H_p is
    reduced as G_p(u, v) * q**(-s), which equals the exact quotient mod w.
    """
    if math.gcd(q, w) != 1:
        raise ValueError(f"q = {q} and w = {w} are not coprime")
    if w < 2:
        raise ValueError("w must be >= 2")
    if cache is not None:
        hit = cache.get(p, q, w)
        if hit is not None:
            return hit
    order = multiplicative_order(q, w)
    if w <= _NUMPY_W_LIMIT:
        classes = _classes_numpy(p, q, w, order)
    else:
        classes = _classes_python(p, q, w, order)
    out = SieveSet(p=p, q=q, w=w, order=order, classes=frozenset(classes))
    if cache is not None:
        cache.put(out)
    return out


def a_set(p: int, label: str | int, cache: Optional[SieveCache] = None) -> NamedASet:
    """Intersection of L(p, 3, w) over the moduli configured for the label."""
    label = _label(label)
    order = A_SET_ORDERS[label]
    moduli = A_SET_MODULI[label]
    for w in moduli:
        o = multiplicative_order(3, w)
        if o != order:
            raise ConfigurationError(f"ord_{w}(3) = {o}, expected {order} for {label}")
    classes = frozenset(range(order))
    for w in moduli:
        classes &= l_set(p, 3, w, cache).classes
    return NamedASet(label=label, moduli=moduli, order=order, classes=classes)


def _label(label: str | int) -> str:
    name = label if isinstance(label, str) and label.startswith("A") else f"A{int(label)}"
    if name not in A_SET_MODULI:
        raise ConfigurationError(f"unknown A-set {label!r}")
    return name


# ---------------------------------------------------------------------------
# CRT


@dataclass(frozen=True)
class CRTResult:
    r_m: Optional[int]
    modulus: int
    values: tuple[int, ...]
    witnesses: dict = field(default_factory=dict, compare=False)  # value -> residue tuple


def crt_min_nonzero(sets: Sequence[NamedASet]) -> CRTResult:
    """Combine the sets through the CRT and return the smallest non-zero value.

    Inconsistent residue combinations are dropped. ``r_m`` is None when no
    non-zero value remains.
    """
    if not sets:
        raise ValueError("need at least one set")
    L = lcm(*(s.order for s in sets))
    values: dict[int, tuple[int, ...]] = {}
    for combo in itertools.product(*(sorted(s.classes) for s in sets)):
        sol = crt_solve(zip(combo, (s.order for s in sets)))
        if sol is None:
            continue
        values.setdefault(sol[0], combo)
    vals = tuple(sorted(values))
    nonzero = [x for x in vals if x]
    return CRTResult(r_m=min(nonzero) if nonzero else None, modulus=L, values=vals, witnesses=values)


# ---------------------------------------------------------------------------
# filters on p


def cong_class_filter(p: int) -> bool:
    """delta8 * 2**((p-1)/2) * p = 1 (mod 3)."""
    if p <= 3:
        raise ValueError("p must be > 3")
    return (delta8(p) * pow(2, (p - 1) // 2, 3) * p) % 3 == 1


def mod3power_filter(p: int, j: int) -> bool:
    """Whether delta8 * 2**((p-1)/2) * p * v**(p-1) = 1 (mod 3**j) has a solution v.

    This is the k = m equation reduced modulo 3**j, valid when m >= j (the
    q-power terms then vanish).
    """
    if p <= 3:
        raise ValueError("p must be > 3")
    if j < 1:
        raise ValueError("j must be >= 1")
    n = 3**j
    c = delta8(p) * pow(2, (p - 1) // 2, n) * p % n
    powers = {pow(v, p - 1, n) for v in range(1, n) if v % 3}
    return any(c * x % n == 1 for x in powers)


def k0_mod3_check(p: int) -> bool:
    """True iff H_p(+-1 - d4*v, v) is never 0 mod 3.

    A False return would mean the k = 0 case is not excluded by congruences.
    """
    if p <= 3:
        raise ValueError("p must be > 3")
    for sign in (1, -1):
        sp = hp_shifted(p, 1, sign)
        if any(sp(v) % 3 == 0 for v in range(3)):
            return False
    return True


def negative_branch_check(p: int, q: int = 3, k: int = 1) -> bool:
    """H_p(-q**k - d4*v, v) = 1 (mod p) identically, so it never equals -1.

    This excludes u + d4*v = -q**m in the k = m case (p not dividing q).
    """
    if q % p == 0:
        raise ValueError("p must not divide q")
    coeffs = hp_shifted(p, q**k, -1).reduced(p)
    return coeffs[0] == 1 and all(c == 0 for c in coeffs[1:])


def implied_p_bound(m_lower: Optional[int], thresholds=BAKER_THRESHOLDS, default: int = BAKER_DEFAULT) -> int:
    """Exponent bound on p once m >= m_lower is known."""
    if m_lower is not None:
        for m_min, bound in thresholds:
            if m_lower >= m_min:
                return bound
    return default


# ---------------------------------------------------------------------------
# elimination


@dataclass(frozen=True)
class EliminationReport:
    p: int
    strategy: tuple[str, ...]
    sets: dict
    r_m: Optional[int]
    m_lower: Optional[int]
    implied_bound: int
    eliminated: bool
    inconclusive: bool = False
    assumptions: tuple[str, ...] = ()
    recorded: bool = True

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "strategy": list(self.strategy),
            "sets": {k: sorted(v) for k, v in sorted(self.sets.items(), key=lambda kv: A_SET_ORDERS[kv[0]])},
            "r_m": self.r_m,
            "m_lower": self.m_lower,
            "implied_bound": self.implied_bound,
            "eliminated": self.eliminated,
            "inconclusive": self.inconclusive,
            "assumptions": list(self.assumptions),
            "recorded": self.recorded,
        }


ASSUMPTIONS = (
    "m <= 5 excluded by the bounded search",
    "m = 6 resolved externally",
)


def _report(p: int, labels: tuple[str, ...], asets: dict[str, NamedASet], recorded: bool,
            thresholds=BAKER_THRESHOLDS) -> EliminationReport:
    chosen = [asets[l] for l in labels]
    crt = crt_min_nonzero(chosen)
    if crt.r_m is not None:
        m_lower = crt.r_m
    elif crt.values == (0,):
        m_lower = crt.modulus  # only m = 0 mod lcm survives and m > 0
    else:
        m_lower = None  # no admissible class at all: no solution with k = m
    if m_lower is None:
        bound, elim = 0, True
    else:
        bound = implied_p_bound(m_lower, thresholds)
        elim = p > bound
    return EliminationReport(
        p=p,
        strategy=labels,
        sets={l: asets[l].classes for l in labels},
        r_m=crt.r_m,
        m_lower=m_lower,
        implied_bound=bound,
        eliminated=elim,
        assumptions=ASSUMPTIONS,
        recorded=recorded,
    )


def eliminate_prime(
    p: int,
    strategy: Iterable[str | int],
    cache: Optional[SieveCache] = None,
    thresholds=BAKER_THRESHOLDS,
) -> EliminationReport:
    """Compute the strategy's A-sets for p and decide whether p is excluded."""
    labels = tuple(_label(l) for l in strategy)
    if not labels:
        return EliminationReport(p, (), {}, None, None, BAKER_DEFAULT, False, inconclusive=True)
    asets = {l: a_set(p, l, cache) for l in labels}
    return _report(p, labels, asets, recorded=True, thresholds=thresholds)


def _search_strategy(p: int, asets: dict[str, NamedASet], max_size: int = 3) -> EliminationReport:
    """Best combination of up to max_size labels (largest m_lower)."""
    labels = sorted(asets, key=lambda l: A_SET_ORDERS[l])
    best = None
    for r in range(1, max_size + 1):
        for combo in itertools.combinations(labels, r):
            rep = _report(p, combo, asets, recorded=False)
            key = (rep.eliminated, rep.m_lower if rep.m_lower is not None else math.inf, -len(combo))
            if best is None or key > best[0]:
                best = (key, rep)
    return best[1]


def _sweep_one(args) -> tuple[EliminationReport, list[SieveSet]]:
    p, recorded = args
    local = SieveCache(path="")  # in-memory; the parent owns the file
    asets = {l: a_set(p, l, local) for l in A_SET_MODULI}
    sets = list(local._data.values())
    if recorded:
        rep = _report(p, tuple(_label(l) for l in recorded), asets, recorded=True)
        if rep.eliminated:
            return rep, sets
    return _search_strategy(p, asets), sets


def sweep_primes(lo: int = 1000, hi: int = 3803) -> list[int]:
    """Primes lo < p <= hi with p = 5 or 11 (mod 24)."""
    return [p for p in primes_up_to(hi) if p > lo and p % 24 in (5, 11)]


def sweep(
    primes: Optional[Sequence[int]] = None,
    recorded: Optional[dict[int, Sequence[str | int]]] = None,
    workers: int = 1,
    cache: Optional[SieveCache] = None,
) -> list[EliminationReport]:
    """Try to eliminate every prime.

    For each p the recorded strategy (if any) is tried first; otherwise, or if
    it fails, all combinations of up to three A-sets are searched. Results are
    returned in the order of ``primes`` regardless of ``workers``.
    """
    primes = list(sweep_primes() if primes is None else primes)
    recorded = recorded or {}
    jobs = []
    done: dict[int, EliminationReport] = {}
    for p in primes:
        if cache is not None and all(cache.get(p, 3, w) for ws in A_SET_MODULI.values() for w in ws):
            asets = {l: a_set(p, l, cache) for l in A_SET_MODULI}
            rec = recorded.get(p)
            rep = None
            if rec:
                rep = _report(p, tuple(_label(l) for l in rec), asets, recorded=True)
            if rep is None or not rep.eliminated:
                rep = _search_strategy(p, asets)
            done[p] = rep
        else:
            jobs.append((p, tuple(recorded.get(p, ()))))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            results = list(ex.map(_sweep_one, jobs, chunksize=1))
    else:
        results = [_sweep_one(j) for j in jobs]
    for rep, sets in results:
        done[rep.p] = rep
        if cache is not None:
            for s in sets:
                cache.put(s)
    if cache is not None:
        cache.flush()
    return [done[p] for p in primes]


def find_moduli(q: int, order: int, w_max: int) -> list[int]:
    """All w <= w_max coprime to q with ord_w(q) == order."""
    return [w for w in range(2, w_max + 1) if math.gcd(q, w) == 1 and multiplicative_order(q, w) == order]
