import math
import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from dioph.errors import NotInvertibleError
from dioph.numth import (
    GaussianPair,
    carmichael,
    crt_solve,
    factorize,
    gaussian_pow,
    is_perfect_square,
    is_prime,
    mod_pow,
    multiplicative_order,
    prime_power,
    primes_up_to,
)


def test_mod_pow_examples():
    assert mod_pow(3, 5, 242) == 1
    assert mod_pow(7, 0, 10) == 1
    assert mod_pow(3, 4, 17) == 13
    with pytest.raises(ValueError):
        mod_pow(3, 4, 1)


def test_mod_pow_matches_repeated_multiplication():
    rng = random.Random(1)
    for _ in range(200):
        b, e, n = rng.randrange(-50, 50), rng.randrange(0, 40), rng.randrange(2, 500)
        acc = 1
        for _ in range(e):
            acc = acc * b % n
        assert mod_pow(b, e, n) == acc % n


def test_order_examples():
    assert multiplicative_order(3, 242) == 5
    assert multiplicative_order(3, 136) == 16
    assert multiplicative_order(1, 97) == 1
    with pytest.raises(NotInvertibleError):
        multiplicative_order(3, 243)


def test_order_exhaustive_up_to_1000():
    for w in range(2, 1001):
        for a in range(1, w):
            if math.gcd(a, w) != 1:
                continue
            d = multiplicative_order(a, w)
            assert pow(a, d, w) == 1 % w
            # minimality: no proper divisor d/r works
            assert all(pow(a, d // r, w) != 1 % w for r in factorize(d)) or d == 1


def test_order_large_modulus_path():
    rng = random.Random(2)
    for _ in range(30):
        w = rng.randrange(10**6 + 1, 10**9)
        a = rng.randrange(2, w)
        if math.gcd(a, w) != 1:
            continue
        assert multiplicative_order(a, w) == sympy.n_order(a, w)


def test_carmichael_against_sympy():
    for n in range(1, 2000):
        assert carmichael(n) == sympy.reduced_totient(n)


def test_crt_examples():
    assert crt_solve([(4, 5), (17, 27), (10, 34)]) == (44, 4590)
    assert crt_solve([(0, 16), (0, 27)]) == (0, 432)
    assert crt_solve([(1, 4), (3, 8)]) is None
    with pytest.raises(ValueError):
        crt_solve([(0, 1)])


@given(st.lists(st.tuples(st.integers(0, 10**6), st.integers(2, 400)), min_size=1, max_size=5))
@settings(max_examples=300, deadline=None)
def test_crt_properties(system):
    system = [(r % n, n) for r, n in system]
    sol = crt_solve(system)
    brute = None
    L = math.lcm(*(n for _, n in system))
    if L <= 20000:
        brute = next((x for x in range(L) if all((x - r) % n == 0 for r, n in system)), None)
    if sol is None:
        assert brute is None or L > 20000
        return
    x, m = sol
    assert m == L and 0 <= x < m
    assert all((x - r) % n == 0 for r, n in system)
    assert crt_solve(system + [(x, m)]) == sol
    if brute is not None:
        assert brute == x


def test_crt_matches_sympy_on_coprime_moduli():
    rng = random.Random(3)
    from sympy.ntheory.modular import crt

    for _ in range(200):
        mods = [rng.choice([5, 7, 9, 11, 13, 16, 17, 19, 23, 27])]
        while len(mods) < 3:
            c = rng.choice([5, 7, 9, 11, 13, 16, 17, 19, 23, 27])
            if all(math.gcd(c, m) == 1 for m in mods):
                mods.append(c)
        res = [rng.randrange(m) for m in mods]
        x, m = crt_solve(zip(res, mods))
        assert (x, m) == tuple(int(v) for v in crt(mods, res))


def test_gaussian_pow_examples():
    assert gaussian_pow(GaussianPair(2, 1), 3) == GaussianPair(2, 11)
    assert gaussian_pow(GaussianPair(5, -7), 0) == GaussianPair(1, 0)
    assert gaussian_pow(GaussianPair(0, 1), 2) == GaussianPair(-1, 0)


@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6), st.integers(0, 50))
@settings(max_examples=200, deadline=None)
def test_gaussian_norm_multiplicative(a, b, n):
    z = GaussianPair(a, b)
    assert gaussian_pow(z, n).norm() == z.norm() ** n


@given(st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100), st.integers(-100, 100))
def test_gaussian_mul_commutes(a, b, c, d):
    x, y = GaussianPair(a, b), GaussianPair(c, d)
    assert x * y == y * x
    assert (x * y).norm() == x.norm() * y.norm()


def test_perfect_square_examples():
    assert is_perfect_square(156250) is None
    assert is_perfect_square(0) == 0
    assert is_perfect_square(62001) == 249
    assert is_perfect_square(-4) is None


def test_perfect_square_exhaustive():
    squares = set(i * i for i in range(1001))
    for n in range(10**6 + 1):
        r = is_perfect_square(n)
        assert (r is not None) == (n in squares)
        if r is not None:
            assert r * r == n


def test_is_prime_examples():
    assert is_prime(79)
    assert not is_prime(1)
    assert is_prime(42641)
    assert is_prime(2299357537036323025594528471766399)
    assert is_prime(224803637342655330236336909331037067112119583602184017999)


def test_is_prime_against_sympy():
    for n in range(20000):
        assert is_prime(n) == sympy.isprime(n)
    rng = random.Random(4)
    for _ in range(500):
        n = rng.getrandbits(rng.choice([40, 64, 80, 128])) | 1
        assert is_prime(n) == sympy.isprime(n)
    # strong pseudoprimes to several bases, and Carmichael numbers
    for n in (3215031751, 2152302898747, 3474749660383, 341550071728321, 561, 1105, 1729):
        assert not is_prime(n)


def test_primes_up_to_and_prime_power():
    assert primes_up_to(50) == list(sympy.primerange(2, 51))
    assert prime_power(243) == (3, 5)
    assert prime_power(12) is None
    assert prime_power(1) is None
    assert prime_power(2**61 - 1) == (2**61 - 1, 1)
