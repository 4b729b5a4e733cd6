"""Moments, generating functions and inequality curves of the EXGD.

Everything here is assembled from the binomial series in :mod:`exgd.series`.
With ``A = alpha theta^2 / (1 + theta)`` the density is
``A x^0 e^{-theta x} U^(alpha-1) (1 + theta x^2 / 2)``, so

    int_t^inf x^r e^{s x} f(x) dx = A [L1(alpha, theta, r, theta - s, t)
                                       + theta/2 L2(alpha, theta, r, theta - s, t)].

The characteristic function is the MGF with ``t`` replaced by ``i t`` and the
cumulant generating function is ``log M(t)``; only the real-argument MGF is
evaluated here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .distribution import Parameters, exgd_pdf, exgd_survival, quantile
from .errors import DomainError, SeriesConvergenceError, SurvivalUnderflowError
from .series import DEFAULT_CONFIG, SeriesConfig, binomial_series


def _lead(p: Parameters) -> float:
    return p.alpha * p.theta**2 / (1.0 + p.theta)


def _check_order(r, name="r"):
    if not (int(r) == r and 1 <= r <= 4):
        raise DomainError(f"{name} must be an integer in 1..4, got {r!r}")
    return int(r)


def _weighted(p: Parameters, powers, delta, t, cfg):
    """``A [L1 + theta/2 L2]`` for each power in ``powers``, in one series pass."""
    specs, rows = [], []
    for j, r in enumerate(powers):
        specs += [(r, delta, t), (r + 2, delta, t)]
        row = np.zeros(2 * len(powers))
        row[2 * j], row[2 * j + 1] = 1.0, 0.5 * p.theta
        rows.append(row)
    lead = _lead(p)
    try:
        vals = binomial_series(p.alpha, p.theta, specs, cfg, weights=rows)
    except SeriesConvergenceError as exc:
        # report the estimate on the scale of the requested quantity
        exc.estimate = [lead * float(v) for v in np.atleast_1d(exc.estimate)]
        exc.error_estimate = [lead * float(v) for v in np.atleast_1d(exc.error_estimate)]
        raise
    return [lead * v for v in vals]


def raw_moment(r: int, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``E[X^r]`` for ``r`` in 1..4."""
    r = _check_order(r)
    return _weighted(p, [r], p.theta, 0.0, cfg)[0]


@dataclass(frozen=True)
class Moments:
    raw: tuple  # E X, E X^2, E X^3, E X^4
    central: tuple  # mu2, mu3, mu4
    pearson_sk: float
    pearson_kr: float

    @property
    def mean(self) -> float:
        return self.raw[0]

    @property
    def variance(self) -> float:
        return self.central[0]


def central_from_raw(m1, m2, m3, m4):
    mu2 = m2 - m1**2
    mu3 = m3 - 3 * m2 * m1 + 2 * m1**3
    mu4 = m4 - 4 * m3 * m1 + 6 * m2 * m1**2 - 3 * m1**4
    return mu2, mu3, mu4


def moments(p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> Moments:
    """First four raw and central moments plus the Pearson ratios.

    ``pearson_sk`` is ``mu3^2 / mu2^3`` (the squared-skewness convention) and
    ``pearson_kr`` is ``mu4 / mu2^2``.
    """
    raw = tuple(_weighted(p, [1, 2, 3, 4], p.theta, 0.0, cfg))
    mu2, mu3, mu4 = central_from_raw(*raw)
    return Moments(raw=raw, central=(mu2, mu3, mu4), pearson_sk=mu3**2 / mu2**3, pearson_kr=mu4 / mu2**2)


def mgf(t: float, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Moment generating function ``E[e^{tX}]``, finite only for ``t < theta``."""
    if not (math.isfinite(t) and t < p.theta):
        raise DomainError(f"the MGF diverges for t >= theta ({p.theta}); got t={t!r}")
    return _weighted(p, [0], p.theta - t, 0.0, cfg)[0]


def cgf(t: float, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Cumulant generating function ``log M(t)``."""
    return math.log(mgf(t, p, cfg))


def tail_moment(r: int, x: float, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Incomplete moment ``int_x^inf u^r f(u) du`` (no normalization)."""
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"threshold must be finite and nonnegative, got {x!r}")
    return _weighted(p, [r], p.theta, float(x), cfg)[0]


def conditional_moment(n: int, x: float, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``E[X^n | X > x]``."""
    n = _check_order(n, "n")
    surv = exgd_survival(x, p)
    if surv <= 0:
        raise SurvivalUnderflowError(f"survival underflows at x={x!r}; the conditional moment is undefined")
    return tail_moment(n, x, p, cfg) / surv


def mean_deviation(p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Mean absolute deviation about the mean.

    ``2 mu F(mu) - 2 mu + 2 T(mu)`` with ``T`` the tail moment, regrouped as
    ``2 [T(mu) - mu S(mu)]`` to avoid cancelling two numbers of size ``mu``.
    """
    mu = raw_moment(1, p, cfg)
    return 2.0 * (tail_moment(1, mu, p, cfg) - mu * exgd_survival(mu, p))


# -- inequality curves ----------------------------------------------------------

def _lower_moment_quad(q, p):
    # int_0^q x f(x) dx; the integrand is x^alpha near 0, so quad copes with alpha < 1
    val, _ = integrate.quad(lambda x: x * exgd_pdf(x, p) if x > 0 else 0.0, 0.0, q,
                            epsabs=0.0, epsrel=1e-11, limit=200)
    return val


def _curve_values(prob, p, cfg, method):
    arr = np.atleast_1d(np.asarray(prob, dtype=float))
    q = np.atleast_1d(quantile(arr, p))
    mu = raw_moment(1, p, cfg)
    if method == "series":
        lor = np.array([(mu - tail_moment(1, qi, p, cfg)) / mu for qi in q])
    elif method == "quadrature":
        lor = np.array([_lower_moment_quad(qi, p) / mu for qi in q])
    else:
        raise DomainError(f"unknown method {method!r}; expected 'series' or 'quadrature'")
    return arr, np.clip(lor, 0.0, 1.0)


def lorenz_curve(prob, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG, method: str = "series"):
    """``L(prob) = (1/mu) int_0^Q(prob) x f(x) dx``.

    ``method="series"`` evaluates the integral as ``mu`` minus the tail moment
    series. That series slows down sharply for small thresholds when
    ``alpha < 1``; ``method="quadrature"`` integrates the lower part directly.
    """
    arr, lor = _curve_values(prob, p, cfg, method)
    return float(lor[0]) if np.ndim(prob) == 0 else lor


def bonferroni_curve(prob, p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG, method: str = "series"):
    """``B(prob) = L(prob) / prob``."""
    arr, lor = _curve_values(prob, p, cfg, method)
    out = lor / arr
    return float(out[0]) if np.ndim(prob) == 0 else out


def _integrate_curve(fn, p, cfg):
    val, _ = integrate.quad(lambda u: fn(u, p, cfg), 0.0, 1.0, epsabs=1e-10, epsrel=1e-9, limit=200)
    return val


def gini_index(p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG, method: str = "identity") -> float:
    """Gini index ``1 - 2 int_0^1 L(u) du``.

    ``method="identity"`` uses ``int_0^1 L = E[X S(X)] / mu`` together with
    ``E[X F(X)] = mu(2 alpha) / 2``, which gives ``G = mu(2 alpha)/mu(alpha) - 1``
    from two full-range moment series. ``method="curve"`` integrates the Lorenz
    curve numerically; it is exact in principle but the tail series behind
    each curve value converges slowly near ``u = 0`` when ``alpha < 1``.
    """
    if method == "identity":
        return raw_moment(1, Parameters(2.0 * p.alpha, p.theta), cfg) / raw_moment(1, p, cfg) - 1.0
    if method == "curve":
        return 1.0 - 2.0 * _integrate_curve(lorenz_curve, p, cfg)
    raise DomainError(f"unknown method {method!r}")


def bonferroni_index(p: Parameters, cfg: SeriesConfig = DEFAULT_CONFIG, method: str = "identity") -> float:
    """Bonferroni index ``1 - int_0^1 B(u) du``.

    Substituting ``u = F(x)`` gives ``int_0^1 B = -(1/mu) E[X log F(X)]`` and
    differentiating ``mu`` in ``alpha`` gives ``E[X log F(X)] = alpha mu' - mu``,
    so the index equals ``alpha d(log mu)/d(alpha)``. The identity route takes
    that derivative by a five-point difference of moment series.
    """
    if method == "identity":
        a = p.alpha
        h = 1e-3 * a
        mu = [raw_moment(1, Parameters(a + k * h, p.theta), cfg) for k in (-2, -1, 1, 2)]
        dmu = (mu[0] - 8 * mu[1] + 8 * mu[2] - mu[3]) / (12 * h)
        return a * dmu / raw_moment(1, p, cfg)
    if method == "curve":
        return 1.0 - _integrate_curve(bonferroni_curve, p, cfg)
    raise DomainError(f"unknown method {method!r}")


__all__ = [
    "Moments",
    "bonferroni_curve",
    "bonferroni_index",
    "central_from_raw",
    "cgf",
    "conditional_moment",
    "gini_index",
    "lorenz_curve",
    "mean_deviation",
    "mgf",
    "moments",
    "raw_moment",
    "tail_moment",
]
