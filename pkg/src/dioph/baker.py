"""Exponent bounds from a lower bound for linear forms in two logarithms.

For a solution with u + d4*v = +-q**m the quantity

    Lambda = b1*i*pi - b2*log(alpha),   h(alpha) = (log y)/2,

satisfies log|Lambda| <= log 4 - (p-1)/2 * log y, while Mignotte's explicit
estimate gives a lower bound that only grows like (log p)**2 * log y. For p
large enough the two clash; this module finds where, with interval
arithmetic throughout so that every "clash" is a rigorous statement.

All real quantities are ``mpmath.iv`` intervals unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import mpmath

from .errors import InconclusiveError
from .numth import is_prime, primes_up_to

iv = mpmath.iv

__all__ = [
    "MignotteParams",
    "MignotteConstants",
    "BakerEvaluation",
    "BakerCase",
    "CASES",
    "alpha_height",
    "mignotte_constants",
    "mignotte_lower_bound",
    "evaluate",
    "linear_form_upper_bound",
    "liouville_p_max",
    "p_bound_for_case",
    "check_certificate",
    "BoundCertificate",
    "BlockCheck",
]

DPS = 60
MARGIN = mpmath.mpf("1e-10")
P_CEILING = 10**5


def _ivf(x) -> mpmath.ctx_iv.ivmpf:
    """Interval enclosing x; strings keep decimal constants exact-enclosed."""
    if isinstance(x, str):
        return iv.mpf(x)
    if isinstance(x, float):
        return iv.mpf(repr(x))
    return iv.mpf(x)


@dataclass(frozen=True)
class MignotteParams:
    lam: object = "1.8"
    D: int = 1
    h_alpha: object = None
    b1: int = 13
    b2: int = 13

    @property
    def B(self) -> int:
        return max(13, self.b1, self.b2)


@dataclass(frozen=True)
class MignotteConstants:
    rho: object
    K: object
    t: object
    T: object
    H: object


@dataclass(frozen=True)
class BakerEvaluation:
    params: MignotteParams
    constants: MignotteConstants
    lower_bound: object  # interval; its left end is the rigorous bound


def _validate(params: MignotteParams) -> None:
    lam = mpmath.mpf(params.lam if not isinstance(params.lam, float) else repr(params.lam))
    if not (mpmath.mpf("1.8") <= lam < 4):
        raise ValueError(f"lambda must lie in [1.8, 4), got {params.lam}")
    if params.D <= 0:
        raise ValueError("D must be positive")
    if params.b1 < 1 or params.b2 < 1:
        raise ValueError("b1, b2 must be positive integers")
    if params.h_alpha is None:
        raise ValueError("h_alpha is required")


def alpha_height(y: int) -> mpmath.mpf:
    """(log y)/2, rounded up."""
    if y < 2:
        raise ValueError("y must be >= 2")
    old = iv.dps
    iv.dps = DPS
    try:
        return mpmath.mpf((iv.log(iv.mpf(y)) / 2).b)
    finally:
        iv.dps = old


@dataclass(frozen=True)
class _LambdaPart:
    """Parts of the lower bound that depend on lambda only."""

    lam: object
    rho: object
    t: object
    T: object
    c: object  # 8*pi*T*rho/lambda
    tail: object  # 0.5*lambda + 2*log(lambda)


def _lambda_part(lam) -> _LambdaPart:
    lam = _ivf(lam)
    pi = iv.pi
    rho = iv.exp(lam)
    t = 1 / (6 * pi * rho) - 1 / (48 * pi * rho * (1 + 2 * pi * rho / (3 * lam)))
    T = ((iv.mpf(1) / 3 + iv.sqrt(iv.mpf(1) / 9 + 2 * lam * t)) / lam) ** 2
    c = 8 * pi * T * rho / lam
    tail = lam / 2 + 2 * iv.log(lam)
    return _LambdaPart(lam=lam, rho=rho, t=t, T=T, c=c, tail=tail)


def _H(lp: _LambdaPart, D, K, logB):
    pi = iv.pi
    inner = (
        D * (logB + iv.log(1 / (pi * lp.rho) + 1 / (2 * K)) - iv.log(iv.sqrt(lp.T)) + iv.mpf("0.886"))
        + 3 * lp.lam / 2
        + (1 / lp.T) * (1 / (6 * lp.rho * pi) + 1 / (3 * K))
        + iv.mpf("0.023")
    )
    three_lam = 3 * lp.lam
    # interval max: take the larger endpoints componentwise
    return iv.mpf([max(inner.a, three_lam.a), max(inner.b, three_lam.b)])


def _lower(lp: _LambdaPart, D, K, H):
    return -(lp.c * H**2 + iv.mpf("0.23")) * K - 2 * H - 2 * iv.log(H) + lp.tail - (D + 2) * iv.log(iv.mpf(2))


def mignotte_constants(params: MignotteParams) -> MignotteConstants:
    _validate(params)
    old = iv.dps
    iv.dps = DPS
    try:
        lp = _lambda_part(params.lam)
        D = iv.mpf(params.D)
        K = iv.mpf("0.5") * lp.rho * iv.pi + D * _ivf(params.h_alpha)
        H = _H(lp, D, K, iv.log(iv.mpf(params.B)))
        return MignotteConstants(rho=lp.rho, K=K, t=lp.t, T=lp.T, H=H)
    finally:
        iv.dps = old


def evaluate(params: MignotteParams) -> BakerEvaluation:
    c = mignotte_constants(params)
    old = iv.dps
    iv.dps = DPS
    try:
        lp = _lambda_part(params.lam)
        lb = _lower(lp, iv.mpf(params.D), c.K, c.H)
    finally:
        iv.dps = old
    return BakerEvaluation(params=params, constants=c, lower_bound=lb)


def mignotte_lower_bound(params: MignotteParams) -> mpmath.mpf:
    """Rigorous lower bound for log|Lambda| (left end of the interval)."""
    return mpmath.mpf(evaluate(params).lower_bound.a)


def _ub_interval(logy, p: int):
    return iv.log(iv.mpf(4)) - iv.mpf(p - 1) / 2 * logy


def linear_form_upper_bound(y: int, p: int) -> mpmath.mpf:
    """log 4 - (p-1)/2 * log y, rounded up."""
    if y < 2 or p < 3:
        raise ValueError("need y >= 2 and p >= 3")
    old = iv.dps
    iv.dps = DPS
    try:
        return mpmath.mpf(_ub_interval(iv.log(iv.mpf(y)), p).b)
    finally:
        iv.dps = old


def liouville_p_max(y_min: int) -> int:
    """Largest prime p for which log 4 - (p-1)/2 log y >= -4 (log 6)**3 log y
    can hold for some y >= y_min.

    The inequality reads (p-1)/2 <= 4 (log 6)**3 + log 4 / log y, whose right
    side is largest at y = y_min.
    """
    if y_min < 2:
        raise ValueError("y_min must be >= 2")
    old = iv.dps
    iv.dps = DPS
    try:
        rhs = 4 * iv.log(iv.mpf(6)) ** 3 + iv.log(iv.mpf(4)) / iv.log(iv.mpf(y_min))
        # keep p unless it is certainly excluded
        p_cap = int(mpmath.floor(2 * mpmath.mpf(rhs.b) + 1))
    finally:
        iv.dps = old
    p = p_cap
    while p > 2 and not is_prime(p):
        p -= 1
    return p


# ---------------------------------------------------------------------------
# case bounds


@dataclass(frozen=True)
class BakerCase:
    name: str
    y_min: Callable[[int], int]
    p_start: int = 1000
    description: str = ""


def _half_up(n: int) -> int:
    return (n + 1) // 2


CASES: dict[str, BakerCase] = {
    "qm503": BakerCase("qm503", lambda p: 126505, description="u + d4*v = +-q^m, q^m >= 503"),
    "pq": BakerCase("pq", lambda p: _half_up(p * p), description="p = q"),
    "m40": BakerCase("m40", lambda p: _half_up(3**80), description="u + d4*v = +-q^m, m >= 40"),
    "m100": BakerCase("m100", lambda p: _half_up(3**200), description="u + d4*v = +-q^m, m >= 100"),
    "m250": BakerCase("m250", lambda p: _half_up(3**500), description="u + d4*v = +-q^m, m >= 250"),
}


@dataclass(frozen=True)
class BlockCheck:
    """Contradiction for every prime in [p_lo, p_hi] and every y >= y_min.

    ub is evaluated at p_lo (largest upper bound), lb at p_hi (smallest lower
    bound, since H grows with p), both at y_min. The slope condition makes the
    gap widen as log y grows: (p_lo - 1)/2 > (c*H**2 + 0.23)*D/2 with H taken
    at p_hi and y_min (H decreases as y grows).
    """

    p_lo: int
    p_hi: int
    y_min: int
    ub: str
    lb: str
    ub_slope: str
    lb_slope: str


@dataclass
class BoundCertificate:
    case: str
    lam: str
    ceiling: int
    p_bound: int
    failing: Optional[dict]
    blocks: list[BlockCheck] = field(default_factory=list)


class _Evaluator:
    def __init__(self, lam="1.8", D: int = 1):
        _validate(MignotteParams(lam=lam, D=D, h_alpha=1))
        old = iv.dps
        iv.dps = DPS
        try:
            self.lp = _lambda_part(lam)
            self.D = iv.mpf(D)
            self.half_rho_pi = iv.mpf("0.5") * self.lp.rho * iv.pi
            self.log4 = iv.log(iv.mpf(4))
        finally:
            iv.dps = old
        self.lam = str(lam)
        self._logy: dict[int, object] = {}

    def _log(self, y: int):
        if y not in self._logy:
            self._logy[y] = iv.log(iv.mpf(y))
        return self._logy[y]

    def sides(self, p_lo: int, p_hi: int, y_min: int):
        """(ub, lb, ub_slope, lb_slope) as intervals."""
        old = iv.dps
        iv.dps = DPS
        try:
            logy = self._log(y_min)
            K = self.half_rho_pi + self.D * logy / 2
            H = _H(self.lp, self.D, K, iv.log(iv.mpf(max(13, p_hi))))
            lb = _lower(self.lp, self.D, K, H)
            ub = self.log4 - iv.mpf(p_lo - 1) / 2 * logy
            ub_slope = iv.mpf(p_lo - 1) / 2
            lb_slope = (self.lp.c * H**2 + iv.mpf("0.23")) * self.D / 2
            return ub, lb, ub_slope, lb_slope
        finally:
            iv.dps = old

    def verdict(self, p_lo: int, p_hi: int, y_min: int) -> Optional[BlockCheck]:
        """BlockCheck if the clash is certified, None if it certainly fails.

        Raises InconclusiveError when the two sides are within the margin or
        the crossing holds but the slope comparison does not.
        """
        ub, lb, us, ls = self.sides(p_lo, p_hi, y_min)
        gap = mpmath.mpf(lb.a) - mpmath.mpf(ub.b)
        if gap > MARGIN:
            if not mpmath.mpf(us.a) > mpmath.mpf(ls.b):
                if p_lo == p_hi:
                    raise InconclusiveError(f"slope check fails at p = {p_lo}")
                return None
            return BlockCheck(
                p_lo, p_hi, y_min,
                mpmath.nstr(mpmath.mpf(ub.b), 25), mpmath.nstr(mpmath.mpf(lb.a), 25),
                mpmath.nstr(mpmath.mpf(us.a), 25), mpmath.nstr(mpmath.mpf(ls.b), 25),
            )
        if p_lo == p_hi and mpmath.mpf(ub.a) - mpmath.mpf(lb.b) <= MARGIN:
            raise InconclusiveError(f"sides within margin at p = {p_lo}")
        return None


def p_bound_for_case(
    case: BakerCase | str, ceiling: int = P_CEILING, lam="1.8"
) -> tuple[int, BoundCertificate]:
    """Smallest B* such that every prime B* < p <= ceiling is excluded.

    Primes are covered top-down by blocks; a block that cannot be certified
    as a whole is halved, down to single primes. The first single prime
    (from the top) with no contradiction is B*.
    """
    if isinstance(case, str):
        case = CASES[case]
    ev = _Evaluator(lam)
    primes = [p for p in primes_up_to(ceiling) if p > case.p_start]
    cert = BoundCertificate(case=case.name, lam=str(lam), ceiling=ceiling, p_bound=case.p_start, failing=None)

    # stack of index ranges [i, j] into primes, processed from the top
    stack = [(0, len(primes) - 1)] if primes else []
    while stack:
        i, j = stack.pop()
        p_lo, p_hi = primes[i], primes[j]
        chk = ev.verdict(p_lo, p_hi, case.y_min(p_lo))
        if chk is not None:
            cert.blocks.append(chk)
            continue
        if i == j:
            ub, lb, _, _ = ev.sides(p_lo, p_lo, case.y_min(p_lo))
            cert.p_bound = p_lo
            cert.failing = {
                "p": p_lo,
                "y_min": case.y_min(p_lo),
                "ub": mpmath.nstr(mpmath.mpf(ub.a), 25),
                "lb": mpmath.nstr(mpmath.mpf(lb.b), 25),
            }
            break
        mid = (i + j) // 2
        stack.append((i, mid))
        stack.append((mid + 1, j))
    cert.blocks.sort(key=lambda b: b.p_lo)
    return cert.p_bound, cert


def check_certificate(cert: BoundCertificate, case: BakerCase | str | None = None) -> bool:
    """Recompute every block and confirm they cover all primes in (p_bound, ceiling]."""
    case = CASES[cert.case] if case is None else (CASES[case] if isinstance(case, str) else case)
    ev = _Evaluator(cert.lam)
    need = [p for p in primes_up_to(cert.ceiling) if p > cert.p_bound]
    covered = set()
    for b in cert.blocks:
        if b.y_min != case.y_min(b.p_lo) or ev.verdict(b.p_lo, b.p_hi, b.y_min) is None:
            return False
        covered.update(p for p in need if b.p_lo <= p <= b.p_hi)
    if covered != set(need):
        return False
    if cert.failing is not None:
        p = cert.failing["p"]
        try:
            return ev.verdict(p, p, case.y_min(p)) is None
        except InconclusiveError:
            return False
    return True
