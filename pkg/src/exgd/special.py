"""Scalar special functions: log-gamma, upper incomplete gamma, real binomials.

The incomplete gamma routines use the power series for the lower function when
``x < s + 1`` and a modified-Lentz continued fraction for the upper function
otherwise. Both return logarithms internally so that ``Gamma(s, x)`` with large
``s`` (it reaches a few hundred inside the tail-integral series) never overflows.
"""

from __future__ import annotations

import math

from .errors import DomainError

_EPS = 2.0e-16
_TINY = 1.0e-300
_MAX_ITER = 100_000


def log_gamma(s: float) -> float:
    """Natural log of the gamma function for ``s > 0``."""
    if not s > 0:
        raise DomainError(f"log_gamma requires s > 0, got {s!r}")
    return math.lgamma(s)


def _lower_series(s: float, x: float) -> float:
    # regularized P(s, x); caller guarantees 0 < x < s + 1
    ap = s
    term = total = 1.0 / s
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:  # pragma: no cover - unreachable for x < s + 1
        raise ArithmeticError("incomplete gamma series failed to converge")
    return total * math.exp(s * math.log(x) - x - math.lgamma(s))


def _log_upper_cf(s: float, x: float) -> float:
    # log Gamma(s, x) via the Legendre continued fraction; x >= s + 1
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:  # pragma: no cover
        raise ArithmeticError("incomplete gamma continued fraction failed to converge")
    return s * math.log(x) - x + math.log(h)


def _check(s: float, x: float) -> None:
    if not s > 0:
        raise DomainError(f"incomplete gamma requires s > 0, got s={s!r}")
    if not x >= 0:
        raise DomainError(f"incomplete gamma requires x >= 0, got x={x!r}")


def log_upper_incomplete_gamma(s: float, x: float) -> float:
    """``log Gamma(s, x)`` where ``Gamma(s, x) = int_x^inf u^(s-1) e^-u du``."""
    _check(s, x)
    if x == 0.0:
        return math.lgamma(s)
    if math.isinf(x):
        return -math.inf
    if x < s + 1.0:
        return math.lgamma(s) + math.log1p(-_lower_series(s, x))
    return _log_upper_cf(s, x)


def regularized_upper_gamma(s: float, x: float) -> float:
    """``Q(s, x) = Gamma(s, x) / Gamma(s)``."""
    _check(s, x)
    if x == 0.0:
        return 1.0
    if x < s + 1.0:
        return 1.0 - _lower_series(s, x)
    return math.exp(_log_upper_cf(s, x) - math.lgamma(s))


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma ``Gamma(s, x)`` for ``s > 0``, ``x >= 0``.

    Overflows to ``inf`` only when the true value exceeds the float range.
    """
    return math.exp(log_upper_incomplete_gamma(s, x))


def generalized_binomial(a: float, i: int) -> float:
    """Binomial coefficient with real upper argument: ``a (a-1) ... (a-i+1) / i!``."""
    if i < 0 or int(i) != i:
        raise DomainError(f"generalized_binomial requires a nonnegative integer i, got {i!r}")
    out = 1.0
    for k in range(int(i)):
        out *= (a - k) / (k + 1)
    return out
