"""Solutions of x**2 + q**(2m) = 2*y**p and their Gaussian descent.

A coprime solution factors in Z[i] as

    x + i*q**m = (1 + i)(u + i*v)**p,   y = u**2 + v**2,

so that x = F_p(u, v) and q**m = G_p(u, v) = (u + d4*v) * H_p(u, v).
This module verifies solutions, recovers the pairs (u, v), runs the bounded
searches, and resolves the case p = q = 3 through a linear recurrence.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from .errors import InconclusiveError, InvariantViolation, KClassContradiction
from .hpoly import (
    delta4,
    eval_FG,
    excluded_root_index,
    hp_form,
    hp_shifted,
    hp_univariate,
)
from .numth import factorize, is_perfect_square, is_prime, prime_power, primes_up_to

__all__ = [
    "SolutionTuple",
    "DescentWitness",
    "KClass",
    "FixedYCandidate",
    "ThueSolution",
    "RecurrenceSeq",
    "verify_solution",
    "two_squares",
    "decompose",
    "classify_k",
    "search_small",
    "fixed_y_candidates",
    "solve_fixed_y",
    "generate_large_solution",
    "thue_bounded_search",
    "q3_recurrence",
    "recurrence_closed_form",
    "recurrence_divisibility_classes",
    "solve_q3_p3",
]


@dataclass(frozen=True, order=True)
class SolutionTuple:
    """A candidate (x, q, m, y, p) for x**2 + q**(2m) = 2*y**p."""

    x: int
    q: int
    m: int
    y: int
    p: int

    @classmethod
    def from_xyqmp(cls, x: int, y: int, q: int, m: int, p: int) -> SolutionTuple:
        return cls(x=x, q=q, m=m, y=y, p=p)

    def as_xyqmp(self) -> tuple[int, int, int, int, int]:
        return (self.x, self.y, self.q, self.m, self.p)


@dataclass(frozen=True)
class DescentWitness:
    u: int
    v: int
    k: int
    sign: int


class KClass(enum.Enum):
    K0 = "k=0"
    KM = "k=m"
    KM1 = "k=m-1"


def verify_solution(t: SolutionTuple) -> bool:
    """True iff x**2 + q**(2m) == 2*y**p and gcd(x, y) == 1."""
    x, q, m, y, p = t.x, t.q, t.m, t.y, t.p
    if x < 1 or y < 1 or m < 0 or q < 3 or p < 3:
        return False
    if not (is_prime(q) and is_prime(p)):
        return False
    if math.gcd(x, y) != 1:
        return False
    return x * x + q ** (2 * m) == 2 * y**p


def two_squares(n: int) -> list[tuple[int, int]]:
    """All (u, v) in Z**2 with u**2 + v**2 == n and gcd(u, v) == 1, sorted."""
    if n < 1:
        return []
    out = []
    for u in range(0, math.isqrt(n) + 1):
        v = is_perfect_square(n - u * u)
        if v is None or math.gcd(u, v) != 1:
            continue
        for su in {u, -u}:
            for sv in {v, -v}:
                out.append((su, sv))
    return sorted(set(out))


def _q_exponent(n: int, q: int) -> Optional[int]:
    """k with n == q**k (n >= 1), else None."""
    k = 0
    while n % q == 0:
        n //= q
        k += 1
    return k if n == 1 else None


def decompose(t: SolutionTuple) -> list[DescentWitness]:
    """All descent witnesses of a verified solution, one per symmetry class.

    The pairs with G_p(u, v) = +q**m and |F_p(u, v)| = x come in pairs
    swapped by (u, v) -> (d4*v, d4*u), which flips the sign of F_p. The
    lexicographically larger member of each pair is reported.
    """
    if not verify_solution(t):
        raise ValueError(f"{t} is not a solution")
    d4 = delta4(t.p)
    qm = t.q**t.m
    found = set()
    for u, v in two_squares(t.y):
        f, g = eval_FG(u, v, t.p)
        if g == qm and abs(f) == t.x:
            found.add(max((u, v), (d4 * v, d4 * u)))
    out = []
    for u, v in sorted(found, reverse=True):
        lin = u + d4 * v
        k = _q_exponent(abs(lin), t.q)
        if k is None or k > t.m:
            raise InvariantViolation(f"u + d4*v = {lin} is not a power of {t.q} dividing q^m")
        sign = 1 if lin > 0 else -1
        if hp_form(u, v, t.p) != sign * t.q ** (t.m - k):
            raise InvariantViolation("H_p value does not match the witness")
        out.append(DescentWitness(u=u, v=v, k=k, sign=sign))
    if not out:
        raise InvariantViolation(f"no descent witness for verified solution {t}")
    return out


def classify_k(w: DescentWitness, m: int, p: int, q: int) -> KClass:
    """Which admissible exponent class the witness falls in.

    Anything outside {0, m} (or m-1 when p == q) would contradict the
    divisibility argument and is raised as KClassContradiction.
    """
    if w.k == 0:
        return KClass.K0
    if w.k == m:
        return KClass.KM
    if w.k == m - 1 and p == q:
        return KClass.KM1
    raise KClassContradiction(f"k = {w.k} with m = {m}, p = {p}, q = {q}")


# ---------------------------------------------------------------------------
# bounded search


def _admissible_y(y_max: int) -> list[int]:
    # y is odd and every prime factor is 1 mod 4: for a coprime solution
    # gcd(x, q) = 1, so -1 is a square modulo each prime dividing y.
    return [
        y
        for y in range(1, y_max + 1, 2)
        if all(r % 4 == 1 for r in factorize(y))
    ]


def _odd_prime_powers(qm_max: int) -> list[tuple[int, int, int]]:
    out = []
    for q in primes_up_to(qm_max):
        if q == 2:
            continue
        qm, m = q, 1
        while qm <= qm_max:
            out.append((qm, q, m))
            qm *= q
            m += 1
    return sorted(out)


def _search_one_p(args) -> list[SolutionTuple]:
    p, ys, powers = args
    hits = []
    for y in ys:
        two_yp = 2 * y**p
        for qm, q, m in powers:
            rest = two_yp - qm * qm
            if rest <= 0:
                break
            x = is_perfect_square(rest)
            if x and math.gcd(x, y) == 1:
                hits.append(SolutionTuple(x=x, q=q, m=m, y=y, p=p))
    return hits


def search_small(
    qm_max: int = 501, p_max: int = 50, y_max: int = 5000, workers: int = 1
) -> list[SolutionTuple]:
    """Every coprime solution with 3 <= q**m <= qm_max, p <= p_max, y <= y_max.

    Each (y, p, q**m) in the box is tested by checking whether
    2*y**p - q**(2m) is a perfect square. Result sorted by x.
    """
    if qm_max < 1 or p_max < 1 or y_max < 1:
        raise ValueError("bounds must be positive")
    ys = _admissible_y(y_max)
    powers = _odd_prime_powers(qm_max)
    jobs = [(p, ys, powers) for p in primes_up_to(p_max) if p > 2]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_search_one_p, jobs))
    else:
        parts = [_search_one_p(j) for j in jobs]
    return sorted((t for part in parts for t in part), key=lambda t: (t.x, t.y, t.q, t.m, t.p))


# ---------------------------------------------------------------------------
# fixed y


@dataclass(frozen=True)
class FixedYCandidate:
    """A pair (u, v) over y with |u + delta*v| = q**m0, m0 >= 1."""

    y: int
    q: int
    m0: int
    u: int
    v: int
    sign: int
    delta4: int


def fixed_y_candidates(y: int) -> list[FixedYCandidate]:
    """Pairs u**2 + v**2 = y with u + delta*v = sign*q**m0, for both delta = +1, -1.

    Only representatives with u + delta*v > 0 are kept, since (-u, -v) gives
    the negated value. The k = 0 pairs (|u + delta*v| = 1) are not candidates.
    """
    if y < 2:
        raise ValueError("y must be >= 2")
    out = []
    for u, v in two_squares(y):
        for d in (1, -1):
            lin = u + d * v
            if lin <= 0:
                continue
            pp = prime_power(lin)
            if pp is None or pp[0] == 2:
                continue
            out.append(FixedYCandidate(y=y, q=pp[0], m0=pp[1], u=u, v=v, sign=1, delta4=d))
    return out


def solve_fixed_y(y: int, p_max: int = 101) -> list[SolutionTuple]:
    """All solutions with this y and odd prime p <= p_max.

    Each coprime pair (u, v) over y and each p gives a unique candidate
    (|F_p|, |G_p|); it is a solution when |G_p| is an odd prime power.
    With k > 0 the prime is fixed by u + d4*v, which keeps the test cheap.
    """
    found = set()
    for u, v in two_squares(y):
        for p in primes_up_to(p_max):
            if p == 2:
                continue
            lin = abs(u + delta4(p) * v)
            if lin == 0:
                continue
            f, g = eval_FG(u, v, p)
            g = abs(g)
            if lin == 1:
                pp = prime_power(g)
            else:
                base = prime_power(lin)
                if base is None:
                    continue
                e = _q_exponent(g, base[0])
                pp = (base[0], e) if e is not None else None
            if pp is None or pp[0] == 2:
                continue
            t = SolutionTuple(x=abs(f), q=pp[0], m=pp[1], y=y, p=p)
            if verify_solution(t):
                found.add(t)
    return sorted(found, key=lambda t: (t.p, t.x))


def generate_large_solution(y: int, p: int) -> list[tuple[int, int, bool]]:
    """Candidates (x, q, q is prime) for x**2 + q**2 = 2*y**p from k = 0 pairs.

    Every coprime (u, v) with u**2 + v**2 = y and u + d4*v = +-1 gives
    x = |F_p(u, v)| and q = |G_p(u, v)|. Distinct values are all returned;
    an empty list means no k = 0 pair exists.
    """
    d4 = delta4(p)
    seen = {}
    for u, v in two_squares(y):
        if abs(u + d4 * v) != 1:
            continue
        f, g = eval_FG(u, v, p)
        x, q = abs(f), abs(g)
        if x * x + q * q != 2 * y**p:
            raise InvariantViolation("k = 0 pair does not satisfy the equation")
        seen[(x, q)] = None
    return [(x, q, is_prime(q)) for x, q in sorted(seen)]


# ---------------------------------------------------------------------------
# bounded Thue search


@dataclass(frozen=True)
class ThueSolution:
    u: int
    v: int
    three_power: bool  # u + d4*v = +-3**m with m > 0


_THUE_MODULI = (2147483647, 2147483629)


def _residue_hits(coeffs: tuple[int, ...], u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Mask of (u, v) with H(u, v) = +-1 modulo both filter primes."""
    mask = np.ones(u.shape, dtype=bool)
    d = len(coeffs) - 1
    for n in _THUE_MODULI:
        uu = u % n
        vv = v % n
        acc = np.full(u.shape, coeffs[d] % n, dtype=np.int64)
        vpow = np.ones(u.shape, dtype=np.int64)
        for i in range(d - 1, -1, -1):
            vpow = vpow * vv % n
            acc = (acc * uu + (coeffs[i] % n) * vpow) % n
        mask &= (acc == 1) | (acc == n - 1)
    return mask


def _thue_small_v_limit(p: int) -> int:
    """Beyond this |v|, every solution of |H_p(u, v)| = 1 has |u - alpha*v| < 1
    for some real root alpha of H_p(X, 1).

    If alpha_j is the root nearest u/v then |u/v - alpha_k| >= |alpha_j - alpha_k|/2
    for k != j, which gives |u - alpha_j*v| <= 2**(d-1) / (|v|**(d-1) * P_j)
    with P_j the product of root gaps.
    """
    roots = _thue_roots(p)
    d = len(roots)
    worst = 0.0
    for j, a in enumerate(roots):
        gaps = mpmath.fprod(abs(a - b) for k, b in enumerate(roots) if k != j)
        c = mpmath.mpf(2) ** (d - 1) / gaps
        # need c / v**(d-1) < 1
        worst = max(worst, float(c ** (mpmath.mpf(1) / (d - 1))))
    return int(math.ceil(worst * 1.01)) + 1


def _thue_roots(p: int) -> list:
    k0 = excluded_root_index(p)
    with mpmath.workdps(40):
        return [
            mpmath.tan(mpmath.mpf(4 * k + 3) * mpmath.pi / (4 * p))
            for k in range(p)
            if k != k0
        ]


def _is_pm_power_of_3(n: int) -> bool:
    n = abs(n)
    if n < 3:
        return False
    return _q_exponent(n, 3) is not None


def thue_bounded_search(p: int, bound: int) -> list[ThueSolution]:
    """All coprime (u, v), max(|u|, |v|) <= bound, with |H_p(u, v)| = 1.

    Solutions are reported up to (u, v) ~ (-u, -v), normalized to v > 0 or
    (v = 0, u > 0). Small |v| is scanned densely; larger |v| only near
    u = alpha*v for the real roots alpha. Residue filters run in numpy and
    every hit is confirmed with exact integers.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    d4 = delta4(p)
    coeffs = hp_univariate(p)
    v_dense = min(bound, _thue_small_v_limit(p))

    cand_u = []
    cand_v = []
    us = np.arange(-bound, bound + 1, dtype=np.int64)
    for v in range(0, v_dense + 1):
        cand_u.append(us)
        cand_v.append(np.full(us.shape, v, dtype=np.int64))
    if bound > v_dense:
        vs = np.arange(v_dense + 1, bound + 1, dtype=np.int64)
        with mpmath.workdps(30):
            alphas = [float(a) for a in _thue_roots(p)]
        for a in alphas:
            base = np.floor(a * vs).astype(np.int64)
            for off in range(-2, 4):
                u = base + off
                keep = np.abs(u) <= bound
                cand_u.append(u[keep])
                cand_v.append(vs[keep])
    u_all = np.concatenate(cand_u)
    v_all = np.concatenate(cand_v)
    mask = _residue_hits(coeffs, u_all, v_all)

    found = set()
    for u, v in zip(u_all[mask].tolist(), v_all[mask].tolist()):
        if v == 0 and u <= 0:
            continue
        if math.gcd(u, v) != 1:
            continue
        if abs(hp_form(u, v, p)) == 1:
            found.add((u, v))
    return [
        ThueSolution(u=u, v=v, three_power=_is_pm_power_of_3(u + d4 * v))
        for u, v in sorted(found, key=lambda uv: (uv[1], uv[0]))
    ]


# ---------------------------------------------------------------------------
# p = q = 3


@dataclass(frozen=True)
class _QuadSqrt3:
    """a + b*sqrt(3) with integer a, b."""

    a: int
    b: int

    def __mul__(self, o: _QuadSqrt3) -> _QuadSqrt3:
        return _QuadSqrt3(self.a * o.a + 3 * self.b * o.b, self.a * o.b + self.b * o.a)

    def __add__(self, o: _QuadSqrt3) -> _QuadSqrt3:
        return _QuadSqrt3(self.a + o.a, self.b + o.b)

    def conj(self) -> _QuadSqrt3:
        return _QuadSqrt3(self.a, -self.b)

    def __pow__(self, n: int) -> _QuadSqrt3:
        if n < 0:
            # only used for units of norm 1, whose inverse is the conjugate
            if self.a * self.a - 3 * self.b * self.b != 1:
                raise ValueError("negative powers need a norm-1 unit")
            return self.conj() ** (-n)
        out, base = _QuadSqrt3(1, 0), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out


_ALPHA = _QuadSqrt3(2, 1)


@dataclass(frozen=True)
class RecurrenceSeq:
    """r_0 = r_1 = 3, r_t = 4*r_(t-1) - r_(t-2)."""

    r: tuple[int, ...]

    def __getitem__(self, t: int) -> int:
        return self.r[t]

    def __len__(self) -> int:
        return len(self.r)


def q3_recurrence(t_max: int) -> RecurrenceSeq:
    if t_max < 0:
        raise ValueError("t_max must be >= 0")
    r = [3, 3]
    while len(r) <= t_max:
        r.append(4 * r[-1] - r[-2])
    return RecurrenceSeq(tuple(r[: t_max + 1]))


def recurrence_closed_form(t: int) -> int:
    """((3+sqrt3)(2+sqrt3)**(t-1) + (3-sqrt3)(2-sqrt3)**(t-1)) / 2, exactly."""
    z = _QuadSqrt3(3, 1) * _ALPHA ** (t - 1)
    s = z + z.conj()
    if s.b != 0 or s.a % 2:
        raise InvariantViolation("closed form is not an integer")
    return s.a // 2


def recurrence_divisibility_classes(modulus: int, period_bound: int = 10**6) -> tuple[int, frozenset[int]]:
    """Period of r_t mod n and the residues t (mod period) with n | r_t."""
    if modulus < 2:
        raise ValueError("modulus must be >= 2")
    n = modulus
    start = (3 % n, 3 % n)
    a, b = start
    zeros = []
    for t in range(period_bound):
        if a == 0:
            zeros.append(t)
        a, b = b, (4 * b - a) % n
        if (a, b) == start:
            return t + 1, frozenset(zeros)
    raise InconclusiveError(f"no period found for modulus {n} within {period_bound} steps")


def _halftrace(n: int) -> int:
    return (_ALPHA**n).a


def solve_q3_p3() -> list[tuple[int, int, int]]:
    """All (x, y, m) with x > 0 and x**2 + 3**(2m) = 2*y**3.

    Here d4 = -1, so u - v = sign*3**k and H_3(u, v) = u**2 + 4uv + v**2.

    k = m >= 1: every coefficient of H_3(+-3**k + v, v) is divisible by 3,
        so H_3 = +-1 is impossible; only m = 0 remains.
    k = 0, m >= 1: H_3(+-1 + v, v) = 1 (mod 3), so 3 cannot divide it.
    k = m - 1 >= 1: H_3 = -3 (H_3 = 3 fails mod 9). The solutions of
        u**2 + 4uv + v**2 = -3 are u = -e*a_(t-1), v = e*a_t with
        a_n = ((2+sqrt3)**n + (2-sqrt3)**n)/2, and then u - v = -e*r_t.
        r_t = +-3**(m-1) forces 27 not to divide r_t, since 27 | r_t implies
        17 | r_t (same residue classes). Hence 3**(m-1) <= 9.
    """
    def shifted_mod(qk: int, sign: int, n: int) -> set[int]:
        sp = hp_shifted(3, qk, sign)
        return {sp(v) % n for v in range(n)}

    # k = m >= 1: values of H_3(+-3**k + v, v) mod 3 never hit +-1
    for sign in (1, -1):
        if shifted_mod(3, sign, 3) & {1, 2}:
            raise InvariantViolation("k = m branch is not excluded mod 3")
    # k = 0, m >= 1: H_3 is never 0 mod 3
    for sign in (1, -1):
        if 0 in shifted_mod(1, sign, 3):
            raise InvariantViolation("k = 0 branch is not excluded mod 3")
    # k = m - 1 >= 1: H_3 = +3 never holds mod 9, -3 may
    for sign in (1, -1):
        vals = shifted_mod(3, sign, 9)
        if 3 in vals or 6 not in vals:
            raise InvariantViolation("k = m - 1 sign split failed mod 9")

    p27, c27 = recurrence_divisibility_classes(27)
    p17, c17 = recurrence_divisibility_classes(17)
    if (p27, c27) != (p17, c17):
        raise InconclusiveError("mod 27 and mod 17 classes differ; bound on m does not follow")

    sols = {(1, 1, 0)}  # k = m = 0: u - v = +-1, H_3 = +-1, (u, v) = (1, 0)
    t = 1
    while True:
        r = _halftrace(t - 1) + _halftrace(t)
        if r > 9:
            break
        k = _q_exponent(r, 3)
        if k is not None and k >= 1:
            for e in (1, -1):
                u, v = -e * _halftrace(t - 1), e * _halftrace(t)
                f, g = eval_FG(u, v, 3)
                m = k + 1
                cand = SolutionTuple(x=abs(f), q=3, m=m, y=u * u + v * v, p=3)
                if abs(g) == 3**m and verify_solution(cand):
                    sols.add((cand.x, cand.y, m))
        t += 1
    return sorted(sols, key=lambda s: s[2])
