"""Exception types shared across the package."""


class NotInvertibleError(ValueError):
    """Raised when an element has no inverse (or order) modulo n."""


class PoleError(ZeroDivisionError):
    """Raised when H_p is evaluated on the line u + delta4*v = 0."""


class InvariantViolation(ArithmeticError):
    """An internal arithmetic certificate failed; indicates a bug."""


class PrecisionError(ArithmeticError):
    """Working precision is too low for the requested rigorous evaluation."""


class KClassContradiction(ArithmeticError):
    """A descent witness has an exponent k outside {0, m, m-1}."""


class InconclusiveError(ArithmeticError):
    """A rigorous comparison or period search could not be decided."""


class ConfigurationError(ValueError):
    """A fixed table (e.g. sieve moduli) is inconsistent with itself."""
