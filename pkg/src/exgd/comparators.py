"""Baseline lifetime models used to benchmark the EXGD.

Parameterizations (parameter order is the order reported in tables):

=====  =========================================  =====================
name   density                                    params
=====  =========================================  =====================
ED     t e^{-t x}                                 (rate t,)
LD     t^2/(1+t) (1+x) e^{-t x}                   (t,)
RD     2 t x e^{-t x^2}                           (t,)
XGD    t^2/(1+t) (1 + t x^2/2) e^{-t x}           (t,)
GED    a l e^{-l x} (1 - e^{-l x})^(a-1)          (shape a, rate l)
WD     k l (l x)^(k-1) e^{-(l x)^k}               (shape k, rate l)
GD     l^k x^(k-1) e^{-l x} / Gamma(k)            (shape k, rate l)
EXGD   see :mod:`exgd.distribution`               (alpha, theta)
=====  =========================================  =====================
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from . import distribution as dist
from .estimation import Sample, _as_sample, fit_mle
from .errors import DomainError

MODELS = ("ED", "LD", "RD", "XGD", "GED", "WD", "GD", "EXGD")
_K = {"ED": 1, "LD": 1, "RD": 1, "XGD": 1, "GED": 2, "WD": 2, "GD": 2, "EXGD": 2}


@dataclass(frozen=True)
class ModelSpec:
    name: str
    params: tuple

    def __post_init__(self):
        name = _check_name(self.name)
        params = tuple(float(v) for v in self.params)
        if len(params) != _K[name]:
            raise DomainError(f"{name} takes {_K[name]} parameter(s), got {len(params)}")
        if not all(math.isfinite(v) and v > 0 for v in params):
            raise DomainError(f"{name} parameters must be finite and positive, got {params}")
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", params)

    @property
    def k(self) -> int:
        return _K[self.name]


@dataclass(frozen=True)
class ModelFit:
    model: ModelSpec
    neg_log_lik: float
    converged: bool
    iterations: int
    method: str = "mle"


def _check_name(name):
    key = str(name).upper()
    if key not in _K:
        raise DomainError(f"unknown model {name!r}; expected one of {MODELS}")
    return key


def n_params(name) -> int:
    return _K[_check_name(name)]


# -- densities -----------------------------------------------------------------

def _logpdf(name, params, x):
    x = np.asarray(x, dtype=float)
    if name == "ED":
        (t,) = params
        return math.log(t) - t * x
    if name == "LD":
        (t,) = params
        return 2 * math.log(t) - math.log1p(t) + np.log1p(x) - t * x
    if name == "RD":
        (t,) = params
        with np.errstate(divide="ignore"):
            return math.log(2 * t) + np.log(x) - t * x * x
    if name == "XGD":
        (t,) = params
        return 2 * math.log(t) - math.log1p(t) + np.log1p(0.5 * t * x * x) - t * x
    if name == "GED":
        a, lam = params
        with np.errstate(divide="ignore", invalid="ignore"):
            return math.log(a * lam) - lam * x + (a - 1) * np.log(-np.expm1(-lam * x))
    if name == "WD":
        k, lam = params
        with np.errstate(divide="ignore", invalid="ignore"):
            return math.log(k * lam) + (k - 1) * np.log(lam * x) - (lam * x) ** k
    if name == "GD":
        k, lam = params
        with np.errstate(divide="ignore", invalid="ignore"):
            return k * math.log(lam) + (k - 1) * np.log(x) - lam * x - special.gammaln(k)
    return np.asarray(dist.exgd_logpdf(x, dist.Parameters(*params)))


def _cdf(name, params, x):
    x = np.asarray(x, dtype=float)
    if name == "ED":
        return -np.expm1(-params[0] * x)
    if name == "LD":
        (t,) = params
        return 1.0 - (1.0 + t + t * x) / (1.0 + t) * np.exp(-t * x)
    if name == "RD":
        return -np.expm1(-params[0] * x * x)
    if name == "XGD":
        return dist.cdf_bracket(x, params[0])
    if name == "GED":
        a, lam = params
        return (-np.expm1(-lam * x)) ** a
    if name == "WD":
        k, lam = params
        return -np.expm1(-((lam * x) ** k))
    if name == "GD":
        k, lam = params
        return special.gammainc(k, lam * x)
    return np.asarray(dist.exgd_cdf(x, dist.Parameters(*params)))


def _prepare(name, params, x):
    spec = ModelSpec(name, params)
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0):
        raise DomainError("x must be nonnegative")
    return spec, arr


def model_logpdf(name, params, x):
    spec, arr = _prepare(name, params, x)
    val = _logpdf(spec.name, spec.params, arr)
    return float(val) if np.ndim(x) == 0 else val


def model_pdf(name, params, x):
    spec, arr = _prepare(name, params, x)
    val = np.exp(_logpdf(spec.name, spec.params, arr))
    return float(val) if np.ndim(x) == 0 else val


def model_cdf(name, params, x):
    spec, arr = _prepare(name, params, x)
    val = _cdf(spec.name, spec.params, arr)
    return float(val) if np.ndim(x) == 0 else val


def model_neg_log_lik(name, params, s) -> float:
    s = _as_sample(s)
    return -math.fsum(np.atleast_1d(model_logpdf(name, params, s.x)))


# -- maximum likelihood -----------------------------------------------------------

def _closed_or_profile(name, s: Sample):
    """Closed forms, or a one-dimensional profile, per model. Returns params."""
    x, n = s.x, s.n
    mean = float(np.mean(x))
    if name == "ED":
        return (1.0 / mean,)
    if name == "RD":
        return (n / math.fsum(x * x),)
    if name == "LD":
        # the score equation is quadratic in t
        return ((-(mean - 1.0) + math.sqrt((mean - 1.0) ** 2 + 8.0 * mean)) / (2.0 * mean),)
    if name == "XGD":
        def dl(t):
            return 2 * n / t - n / (1 + t) - n * mean + math.fsum(0.5 * x * x / (1 + 0.5 * t * x * x))
        # dl > 0 as t -> 0 and dl < 0 once t exceeds 2 / mean
        hi = 2.0 / mean
        while dl(hi) > 0:
            hi *= 2.0
        return (optimize.brentq(dl, 1e-12 * hi, hi, xtol=1e-15 * hi, rtol=4 * np.finfo(float).eps),)
    if name == "GD":
        # log k - digamma(k) = log(mean) - mean(log x), then rate = k / mean
        target = math.log(mean) - float(np.mean(np.log(x)))
        if target <= 0:
            raise DomainError("gamma MLE needs non-constant data")
        g = lambda k: math.log(k) - special.digamma(k) - target
        k = optimize.brentq(g, 1e-8, 1e8, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        return (k, k / mean)
    if name == "WD":
        lx = np.log(x)

        def g(k):
            xk = x**k
            return math.fsum(xk * lx) / math.fsum(xk) - 1.0 / k - float(np.mean(lx))

        lo, hi = 1e-3, 1.0
        while g(hi) < 0:
            hi *= 2.0
        k = optimize.brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
        return (k, (n / math.fsum(x**k)) ** (1.0 / k))
    if name == "GED":
        # shape profiled out: a(l) = -n / sum log(1 - e^{-l x}); root of the rate score
        def shape(lam):
            return -n / math.fsum(np.log(-np.expm1(-lam * x)))

        def dl(log_lam):
            lam = math.exp(log_lam)
            ratio = x / np.expm1(lam * x)  # x e^{-lx} / (1 - e^{-lx})
            return n / lam - n * mean + (shape(lam) - 1.0) * math.fsum(ratio)

        lo = hi = math.log(1.0 / mean)
        while dl(lo) <= 0:
            lo -= 1.0
        while dl(hi) >= 0:
            hi += 1.0
        lam = math.exp(optimize.brentq(dl, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps))
        return (shape(lam), lam)
    raise DomainError(f"no closed form for {name}")  # pragma: no cover


def _numeric(name, s: Sample, start):
    """Nelder-Mead on log parameters, used as an independent check of the above."""
    def f(z):
        val = model_neg_log_lik(name, tuple(np.exp(z)), s)
        return val if math.isfinite(val) else math.inf

    res = optimize.minimize(
        f, np.log(start), method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 5000, "maxfev": 20000},
    )
    # a simplex cannot locate the minimum much better than sqrt(eps |f|);
    # finish with Newton steps on a five-point difference gradient
    z = _newton_polish(f, np.asarray(res.x, dtype=float))
    return tuple(np.exp(z)), bool(res.success), int(res.nit)


def _newton_polish(f, z, h=1e-3, steps=4):
    d = len(z)
    eye = np.eye(d)
    for _ in range(steps):
        grad = np.array([
            (f(z - 2 * h * e) - 8 * f(z - h * e) + 8 * f(z + h * e) - f(z + 2 * h * e)) / (12 * h)
            for e in eye
        ])
        hess = np.empty((d, d))
        for i in range(d):
            for j in range(d):
                ei, ej = eye[i] * h, eye[j] * h
                hess[i, j] = (f(z + ei + ej) - f(z + ei - ej) - f(z - ei + ej) + f(z - ei - ej)) / (4 * h * h)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or f(z - step) > f(z) + 1e-9 * abs(f(z)):
            break
        z = z - step
    return z


def model_fit_mle(name, s, numeric: bool = False) -> ModelFit:
    """Maximum likelihood fit of a comparator (or the EXGD itself).

    ``numeric=True`` skips the closed-form/profile route and runs a plain
    simplex search from a moment-based start.
    """
    name = _check_name(name)
    s = _as_sample(s)
    if s.n < 2:
        raise DomainError("fitting needs at least two observations")
    if name == "EXGD":
        r = fit_mle(s)
        spec = ModelSpec(name, r.params.as_tuple())
        return ModelFit(spec, r.neg_log_lik, r.converged, r.iterations)
    if numeric:
        start = (1.0 / float(np.mean(s.x)),) if _K[name] == 1 else (1.0, 1.0 / float(np.mean(s.x)))
        if name == "RD":
            start = (1.0 / float(np.mean(s.x)) ** 2,)
        params, ok, nit = _numeric(name, s, start)
    else:
        params, ok, nit = _closed_or_profile(name, s), True, 0
    spec = ModelSpec(name, params)
    return ModelFit(spec, model_neg_log_lik(name, spec.params, s), ok, nit)
