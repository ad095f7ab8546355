"""Exact integer, modular, Gaussian and CRT arithmetic.

Everything here works on Python ints, so there is no overflow and no
rounding anywhere in this module.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import NotInvertibleError

__all__ = [
    "GaussianPair",
    "mod_pow",
    "multiplicative_order",
    "carmichael",
    "factorize",
    "crt_solve",
    "gaussian_pow",
    "is_perfect_square",
    "is_prime",
    "primes_up_to",
    "prime_power",
    "lcm",
]

# Orders are found by plain iteration below this modulus.
ORDER_ITERATION_LIMIT = 10**6


def mod_pow(base: int, exp: int, modulus: int) -> int:
    """Return ``base**exp mod modulus`` in ``[0, modulus)``."""
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if exp < 0:
        raise ValueError("exponent must be non-negative")
    return pow(base, exp, modulus)


def factorize(n: int) -> dict[int, int]:
    """Trial-division factorization. Only meant for moduli of modest size."""
    if n < 1:
        raise ValueError("n must be positive")
    out: dict[int, int] = {}
    for d in (2, 3):
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
    d = 5
    while d * d <= n:
        for c in (d, d + 2):
            while n % c == 0:
                out[c] = out.get(c, 0) + 1
                n //= c
        d += 6
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def lcm(*xs: int) -> int:
    return reduce(lambda a, b: a * b // math.gcd(a, b), xs, 1)


def carmichael(n: int) -> int:
    """Carmichael function lambda(n): exponent of the unit group mod n."""
    parts = []
    for p, e in factorize(n).items():
        if p == 2:
            parts.append(1 if e == 1 else 2 if e == 2 else 2 ** (e - 2))
        else:
            parts.append((p - 1) * p ** (e - 1))
    return lcm(*parts)


def multiplicative_order(a: int, w: int) -> int:
    """Smallest d >= 1 with a**d == 1 (mod w).

    Small moduli are handled by iteration; above ``ORDER_ITERATION_LIMIT``
    the order is carved out of the Carmichael exponent instead.
    """
    if w < 2:
        raise ValueError(f"modulus must be >= 2, got {w}")
    a %= w
    if math.gcd(a, w) != 1:
        raise NotInvertibleError(f"{a} is not invertible modulo {w}")
    if w <= ORDER_ITERATION_LIMIT:
        d, x = 1, a
        while x != 1:
            x = x * a % w
            d += 1
        return d
    d = carmichael(w)
    for p in factorize(d):
        while d % p == 0 and pow(a, d // p, w) == 1:
            d //= p
    return d


def crt_solve(system: Iterable[tuple[int, int]]) -> Optional[tuple[int, int]]:
    """Solve ``x = r_i (mod m_i)`` for moduli that need not be coprime.

    Returns ``(x, L)`` with ``L`` the lcm of the moduli and ``0 <= x < L``,
    or ``None`` when the congruences are inconsistent.
    """
    x, m = 0, 1
    for r, n in system:
        if n < 2:
            raise ValueError(f"moduli must be >= 2, got {n}")
        r %= n
        g = math.gcd(m, n)
        if (r - x) % g:
            return None
        # x + m*t = r (mod n)  ->  t = (r - x)/g * inv(m/g) mod n/g
        n_g = n // g
        t = (r - x) // g * pow(m // g, -1, n_g) % n_g if n_g > 1 else 0
        x += m * t
        m *= n_g
        x %= m
    return x, m


@dataclass(frozen=True)
class GaussianPair:
    """The Gaussian integer ``re + im*i``."""

    re: int
    im: int

    def __add__(self, other: GaussianPair) -> GaussianPair:
        return GaussianPair(self.re + other.re, self.im + other.im)

    def __sub__(self, other: GaussianPair) -> GaussianPair:
        return GaussianPair(self.re - other.re, self.im - other.im)

    def __neg__(self) -> GaussianPair:
        return GaussianPair(-self.re, -self.im)

    def __mul__(self, other: GaussianPair | int) -> GaussianPair:
        if isinstance(other, int):
            return GaussianPair(self.re * other, self.im * other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return GaussianPair(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> GaussianPair:
        return gaussian_pow(self, n)

    def conj(self) -> GaussianPair:
        return GaussianPair(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im

    def divexact(self, other: GaussianPair) -> Optional[GaussianPair]:
        """Exact quotient ``self / other`` in Z[i], or None if it is not integral."""
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian integer")
        num = self * other.conj()
        if num.re % n or num.im % n:
            return None
        return GaussianPair(num.re // n, num.im // n)


ONE = GaussianPair(1, 0)
I = GaussianPair(0, 1)


def gaussian_pow(z: GaussianPair, n: int) -> GaussianPair:
    """Exact ``z**n`` by square-and-multiply."""
    if n < 0:
        raise ValueError("exponent must be non-negative")
    result = ONE
    base = z
    while n:
        if n & 1:
            result = result * base
        n >>= 1
        if n:
            base = base * base
    return result


def is_perfect_square(n: int) -> Optional[int]:
    """Return r >= 0 with r*r == n, or None."""
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


# Deterministic Miller-Rabin witnesses, valid for n < 3.3e24 (covers 2**64).
_DET_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71)


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas_probable_prime(n: int) -> bool:
    # Selfridge parameters: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    if is_perfect_square(n) is not None:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4

    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1

    inv2 = (n + 1) // 2
    U, V, Qk = 1, P, Q % n
    for bit in bin(d)[3:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int, rounds: int = 30) -> bool:
    """Primality test.

    Deterministic below 2**64. Above that, ``rounds`` Miller-Rabin tests
    with pseudo-random bases (error < 4**-rounds) followed by a strong
    Lucas test.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    if n < 2**64:
        return all(_strong_probable_prime(n, a) for a in _DET_BASES)
    rng = random.Random(n)
    for _ in range(rounds):
        if not _strong_probable_prime(n, rng.randrange(2, n - 1)):
            return False
    return _strong_lucas_probable_prime(n)


def primes_up_to(n: int) -> list[int]:
    """All primes <= n (sieve of Eratosthenes)."""
    if n < 2:
        return []
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.flatnonzero(sieve).tolist()


def prime_power(n: int) -> Optional[tuple[int, int]]:
    """Return (q, m) with n == q**m, q prime, m >= 1; otherwise None."""
    if n < 2:
        return None
    for m in range(n.bit_length(), 0, -1):
        q = _iroot(n, m)
        if q >= 2 and q**m == n and is_prime(q):
            return q, m
    return None


def _iroot(n: int, k: int) -> int:
    """Floor of the k-th root of n >= 0."""
    if k == 1 or n < 2:
        return n
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def residues_consistent(system: Sequence[tuple[int, int]], x: int) -> bool:
    return all((x - r) % n == 0 for r, n in system)
