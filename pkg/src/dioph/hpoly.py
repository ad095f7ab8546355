"""The descent polynomials F_p, G_p, H_p and their sign constants.

For an odd prime p,

    (1 + i)(u + iv)**p = F_p(u, v) + i*G_p(u, v),

and H_p(u, v) = G_p(u, v) / (u + delta4*v) is a binary form of degree p-1
with integer coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

import mpmath

from .errors import InvariantViolation, PoleError, PrecisionError
from .numth import GaussianPair, gaussian_pow, is_prime

__all__ = [
    "delta4",
    "delta8",
    "eval_FG",
    "hp_eval",
    "hp_form",
    "hp_univariate",
    "gp_univariate",
    "ShiftedHPoly",
    "hp_shifted",
    "excluded_root_index",
    "excluded_root_index_literal",
    "hp_root_product_check",
    "poly_eval",
]

ONE_PLUS_I = GaussianPair(1, 1)


def _check_odd_prime(p: int) -> None:
    if p < 3 or p % 2 == 0 or not is_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")


def delta4(p: int) -> int:
    """+1 if p = 1 (mod 4), -1 if p = 3 (mod 4)."""
    _check_odd_prime(p)
    return 1 if p % 4 == 1 else -1


def delta8(p: int) -> int:
    """+1 if p = 1, 3 (mod 8), -1 if p = 5, 7 (mod 8)."""
    _check_odd_prime(p)
    return 1 if p % 8 in (1, 3) else -1


def eval_FG(u: int, v: int, p: int) -> tuple[int, int]:
    """Real and imaginary parts of (1+i)(u+iv)**p."""
    _check_odd_prime(p)
    z = ONE_PLUS_I * gaussian_pow(GaussianPair(u, v), p)
    return z.re, z.im


def hp_eval(u: int, v: int, p: int) -> int:
    """H_p(u, v) = G_p(u, v) / (u + delta4*v), with the division certified exact."""
    d = u + delta4(p) * v
    if d == 0:
        raise PoleError(f"u + delta4*v = 0 at (u, v) = ({u}, {v}), p = {p}")
    _, g = eval_FG(u, v, p)
    h, r = divmod(g, d)
    if r:
        raise InvariantViolation(f"G_{p}({u},{v}) = {g} not divisible by {d}")
    return h


def hp_form(u: int, v: int, p: int) -> int:
    """H_p(u, v) from the homogeneous coefficients; defined on the whole plane."""
    c = hp_univariate(p)
    d = len(c) - 1
    # sum_i c_i u^i v^(d-i), Horner in u
    acc = c[d]
    vpow = 1
    for i in range(d - 1, -1, -1):
        vpow *= v
        acc = acc * u + c[i] * vpow
    return acc


@lru_cache(maxsize=None)
def gp_univariate(p: int) -> tuple[int, ...]:
    """Coefficients of G_p(X, 1), index i holding the coefficient of X**i."""
    _check_odd_prime(p)
    # (X + i)**p = sum_j C(p, j) X**j i**(p-j); multiply by (1+i), keep Im.
    ipow = ((1, 0), (0, 1), (-1, 0), (0, -1))
    out = []
    for j in range(p + 1):
        a, b = ipow[(p - j) % 4]
        out.append((a + b) * comb(p, j))
    return tuple(out)


@lru_cache(maxsize=None)
def hp_univariate(p: int) -> tuple[int, ...]:
    """Coefficients of H_p(X, 1) (degree p-1), by exact division of G_p(X, 1) by X + delta4."""
    g = gp_univariate(p)
    d4 = delta4(p)
    n = len(g) - 1
    quot = [0] * n
    carry = g[n]
    for j in range(n - 1, -1, -1):
        quot[j] = carry
        carry = g[j] - d4 * carry
    if carry != 0:
        raise InvariantViolation(f"X + {d4} does not divide G_{p}(X, 1)")
    return tuple(quot)


def poly_eval(coeffs, x):
    """Horner evaluation; coefficient i multiplies x**i. Works for ints, mpf and intervals."""
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class ShiftedHPoly:
    """H_p(sign*qk - delta4*v, v) as a polynomial in v (coeffs[t] multiplies v**t)."""

    p: int
    qk: int
    sign: int
    coeffs: tuple[int, ...]

    @property
    def leading(self) -> int:
        return self.coeffs[-1]

    @property
    def constant(self) -> int:
        return self.coeffs[0]

    @property
    def middle(self) -> tuple[int, ...]:
        return self.coeffs[1:-1]

    def __call__(self, v: int) -> int:
        return poly_eval(self.coeffs, v)

    def reduced(self, w: int) -> tuple[int, ...]:
        return tuple(c % w for c in self.coeffs)


def hp_shifted(p: int, qk: int, sign: int = 1) -> ShiftedHPoly:
    """Expand H_p(sign*qk - delta4*v, v) in v.

    Uses the quotient form

        [(1+i)(a + (i - d4) v)**p - (1-i)(a + (-i - d4) v)**p] / (2i a),  a = sign*qk,

    expanding binomially in Z[i] and dividing each coefficient exactly.
    """
    _check_odd_prime(p)
    if qk < 1:
        raise ValueError("qk must be >= 1")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    d4 = delta4(p)
    a = sign * qk
    two_i_a = GaussianPair(0, 2 * a)
    step_plus = GaussianPair(-d4, 1)
    step_minus = GaussianPair(-d4, -1)
    ONE_MINUS_I = GaussianPair(1, -1)

    coeffs = []
    zp = GaussianPair(1, 0)
    zm = GaussianPair(1, 0)
    for t in range(p + 1):
        scale = comb(p, t) * a ** (p - t)
        num = (ONE_PLUS_I * zp - ONE_MINUS_I * zm) * scale
        c = num.divexact(two_i_a)
        if c is None or c.im != 0:
            raise InvariantViolation(f"coefficient of v^{t} is not an integer multiple")
        coeffs.append(c.re)
        zp = zp * step_plus
        zm = zm * step_minus
    if coeffs[-1] != 0:
        raise InvariantViolation("coefficient of v^p does not vanish")
    return ShiftedHPoly(p=p, qk=qk, sign=sign, coeffs=tuple(coeffs[:-1]))


def excluded_root_index(p: int) -> int:
    """Index k in [0, p) with tan((4k+3)pi/(4p)) = -delta4.

    This is the root of G_p(X, 1) removed by the division by X + delta4.
    Closed form: (3p-3)/4 when p = 1 (mod 4), (p-3)/4 when p = 3 (mod 4).
    """
    d4 = delta4(p)
    # (4k+3)/(4p) = -d4/4 (mod 1)  <=>  4k = -d4*p - 3 (mod 4p)
    k = ((-d4 * p - 3) % (4 * p)) // 4
    if poly_eval(gp_univariate(p), -d4) != 0 or poly_eval(hp_univariate(p), -d4) == 0:
        raise InvariantViolation("excluded root bookkeeping failed")
    return k


def excluded_root_index_literal(p: int) -> int:
    """floor(p/4) * (p mod 4); kept for comparison with excluded_root_index."""
    _check_odd_prime(p)
    return (p // 4) * (p % 4)


def hp_root_product_check(p: int, dps: int | None = None) -> mpmath.mpf:
    """Rigorous bound on max |coeff(prod (X - tan((4k+3)pi/4p))) - coeff(H_p(X,1))|.

    The product runs over k != excluded_root_index(p) and is formed in interval
    arithmetic, so the returned value is an upper bound on the true deviation.
    """
    _check_odd_prime(p)
    if dps is None:
        dps = 2 * p + 20
    if dps < 2 * p:
        raise PrecisionError(f"need at least {2 * p} digits for p = {p}, got {dps}")
    iv = mpmath.iv
    k0 = excluded_root_index(p)
    target = hp_univariate(p)
    old = iv.dps
    iv.dps = dps
    try:
        poly = [iv.mpf(1)]
        for k in range(p):
            if k == k0:
                continue
            root = iv.tan(iv.mpf(4 * k + 3) * iv.pi / (4 * p))
            # multiply poly by (X - root)
            nxt = [iv.mpf(0)] * (len(poly) + 1)
            for i, c in enumerate(poly):
                nxt[i + 1] += c
                nxt[i] -= c * root
            poly = nxt
        worst = mpmath.mpf(0)
        for c_iv, c in zip(poly, target):
            diff = abs(c_iv - c)
            worst = max(worst, mpmath.mpf(diff.b))
        return worst
    finally:
        iv.dps = old
