"""Computational toolkit for x**2 + q**(2m) = 2*y**p.

Modules
-------
numth    exact integer, modular, Gaussian and CRT arithmetic
hpoly    the descent polynomials F_p, G_p, H_p
descent  verification, descent witnesses and bounded searches
baker    interval evaluation of the two-logarithm exponent bounds
sieve    congruence sieve on m and CRT elimination of primes p
cli      the ``dioph`` command-line interface
"""

from .errors import (
    ConfigurationError,
    InconclusiveError,
    InvariantViolation,
    KClassContradiction,
    NotInvertibleError,
    PoleError,
    PrecisionError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "InconclusiveError",
    "InvariantViolation",
    "KClassContradiction",
    "NotInvertibleError",
    "PoleError",
    "PrecisionError",
]
