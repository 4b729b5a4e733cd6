"""Parameter estimation for the EXGD: MLE, LSE, WLSE, CME and MPSE.

All five estimators minimize an objective over ``(log alpha, log theta)`` with
a Nelder-Mead simplex, started from the best point of an 8 x 8 log-grid scan.
Working in log space keeps both parameters positive without constraints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .distribution import (
    Parameters,
    exgd_cdf,
    exgd_hazard,
    exgd_logpdf,
    exgd_survival,
    log_cdf_bracket,
)
from .errors import DomainError

METHODS = ("mle", "lse", "wlse", "cme", "mpse")

XATOL = 1e-8
FATOL = 1e-10
MAXITER = 5000
GRID_SIZE = 8
_TIE_GUARD = 1e-300


@dataclass(frozen=True)
class Sample:
    """Positive observations, sorted ascending on construction."""

    values: tuple
    source: str = ""
    _array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float).ravel()
        if arr.size == 0:
            raise DomainError("a sample needs at least one observation")
        if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
            raise DomainError("sample values must be finite and strictly positive")
        arr = np.sort(arr)
        arr.setflags(write=False)
        object.__setattr__(self, "values", tuple(arr.tolist()))
        object.__setattr__(self, "_array", arr)

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def x(self) -> np.ndarray:
        return self._array


@dataclass(frozen=True)
class FitResult:
    method: str
    params: Parameters
    objective_at_optimum: float
    converged: bool
    iterations: int
    neg_log_lik: float


# -- likelihood ------------------------------------------------------------------

def _as_sample(s) -> Sample:
    return s if isinstance(s, Sample) else Sample(tuple(np.asarray(s, dtype=float).ravel()))


def log_likelihood(s, p: Parameters) -> float:
    """Full log-likelihood written out term by term.

    ``n log a + 2n log t - n log(1+t) - t sum x + (a-1) sum log U(x) + sum log(1 + t x^2/2)``.
    """
    s = _as_sample(s)
    x, n = s.x, s.n
    a, t = p.alpha, p.theta
    return (
        n * math.log(a) + 2 * n * math.log(t) - n * math.log1p(t) - t * math.fsum(x)
        + (a - 1.0) * math.fsum(log_cdf_bracket(x, t)) + math.fsum(np.log1p(0.5 * t * x * x))
    )


def _dlogU_dtheta(x, t):
    # dU/dtheta = theta x e^{-theta x}/(1+theta) [(2+theta)/(1+theta) + theta x/(2(1+theta)) + theta x^2/2];
    # the bracket has no cancellation, so the ratio stays accurate as x -> 0
    bracket = (2.0 + t) / (1.0 + t) + t * x / (2.0 * (1.0 + t)) + 0.5 * t * x * x
    log_du = math.log(t) - math.log1p(t) + np.log(x) - t * x + np.log(bracket)
    return np.exp(log_du - log_cdf_bracket(x, t))


def score(s, p: Parameters) -> tuple[float, float]:
    """Gradient ``(dl/dalpha, dl/dtheta)`` of :func:`log_likelihood`."""
    s = _as_sample(s)
    x, n = s.x, s.n
    a, t = p.alpha, p.theta
    d_alpha = n / a + math.fsum(log_cdf_bracket(x, t))
    d_theta = (
        2 * n / t - n / (1.0 + t) - math.fsum(x)
        + (a - 1.0) * math.fsum(_dlogU_dtheta(x, t))
        + math.fsum(0.5 * x * x / (1.0 + 0.5 * t * x * x))
    )
    return d_alpha, d_theta


# -- objectives ------------------------------------------------------------------

def wlse_weights(n: int) -> np.ndarray:
    i = np.arange(1, n + 1, dtype=float)
    return (n + 1.0) ** 2 * (n + 2.0) / (i * (n - i + 1.0))


def lse_objective(s, p: Parameters) -> float:
    s = _as_sample(s)
    F = exgd_cdf(s.x, p)
    pos = np.arange(1, s.n + 1) / (s.n + 1.0)
    return math.fsum((F - pos) ** 2)


def wlse_objective(s, p: Parameters) -> float:
    s = _as_sample(s)
    F = exgd_cdf(s.x, p)
    pos = np.arange(1, s.n + 1) / (s.n + 1.0)
    return math.fsum(wlse_weights(s.n) * (F - pos) ** 2)


def cme_objective(s, p: Parameters) -> float:
    s = _as_sample(s)
    F = exgd_cdf(s.x, p)
    pos = (2.0 * np.arange(1, s.n + 1) - 1.0) / (2.0 * s.n)
    return 1.0 / (12.0 * s.n) + math.fsum((F - pos) ** 2)


def spacings(s, p: Parameters) -> np.ndarray:
    """The ``n + 1`` spacings ``F(x_i) - F(x_{i-1})`` with ``F(x_0) = 0``, ``F(x_{n+1}) = 1``.

    The last spacing is taken from the survival function so that it keeps
    precision when ``F(x_n)`` is close to one.
    """
    s = _as_sample(s)
    F = np.asarray(exgd_cdf(s.x, p))
    D = np.empty(s.n + 1)
    D[0] = F[0]
    D[1:-1] = np.diff(F)
    D[-1] = exgd_survival(s.x[-1], p)
    return D


def mpse_objective(s, p: Parameters) -> float:
    """``H = (1/(n+1)) sum log D_i``; larger is better.

    A spacing that vanishes (tied observations, or CDF saturation) is replaced
    by ``f(x_i)`` times the float spacing at ``x_i``, the usual tie device that
    keeps ``H`` finite without dropping data.
    """
    s = _as_sample(s)
    D = spacings(s, p)
    bad = D < _TIE_GUARD
    if np.any(bad):
        idx = np.flatnonzero(bad)
        xs = s.x[np.minimum(idx, s.n - 1)]
        with np.errstate(divide="ignore"):
            logf = np.asarray(exgd_logpdf(xs, p), dtype=float)
        D = D.copy()
        D[idx] = np.exp(logf) * np.spacing(xs)
        D = np.maximum(D, _TIE_GUARD)
    return math.fsum(np.log(D)) / (s.n + 1.0)


def _neg_log_lik(s, p):
    return -log_likelihood(s, p)


# objective to minimize, and the sign that maps it back to the reported value
_OBJECTIVES = {
    "mle": (_neg_log_lik, -1.0),
    "lse": (lse_objective, 1.0),
    "wlse": (wlse_objective, 1.0),
    "cme": (cme_objective, 1.0),
    "mpse": (lambda s, p: -mpse_objective(s, p), -1.0),
}


def objective(method: str, s, p: Parameters) -> float:
    """The value each method optimizes (log-likelihood and H are maximized)."""
    fn, sign = _OBJECTIVES[_check_method(method)]
    return sign * fn(_as_sample(s), p)


def _check_method(method):
    if method not in _OBJECTIVES:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    return method


# -- optimizer -------------------------------------------------------------------

def _safe(fn, s):
    def wrapped(z):
        try:
            val = fn(s, Parameters(math.exp(z[0]), math.exp(z[1])))
        except (ArithmeticError, ValueError, OverflowError):
            return math.inf
        return val if math.isfinite(val) else math.inf

    return wrapped


def grid_start(fn, s: Sample) -> Parameters:
    """Best point of an 8 x 8 log-spaced grid, scaled to the sample mean."""
    scale = 1.0 / float(np.mean(s.x))
    alphas = np.geomspace(0.1, 20.0, GRID_SIZE)
    thetas = scale * np.geomspace(0.05, 20.0, GRID_SIZE)
    f = _safe(fn, s)
    best, best_val = None, math.inf
    for a in alphas:
        for t in thetas:
            val = f((math.log(a), math.log(t)))
            if val < best_val:
                best, best_val = (a, t), val
    if best is None:
        raise DomainError("objective is not finite anywhere on the starting grid")
    return Parameters(*best)


def minimize_log_params(fn, s: Sample, init: Parameters | None = None):
    """Nelder-Mead on ``(log alpha, log theta)``; returns ``(params, value, converged, iterations)``."""
    start = init if init is not None else grid_start(fn, s)
    res = optimize.minimize(
        _safe(fn, s),
        x0=np.log(start.as_tuple()),
        method="Nelder-Mead",
        options={"xatol": XATOL, "fatol": FATOL, "maxiter": MAXITER, "maxfev": 4 * MAXITER},
    )
    p = Parameters(math.exp(res.x[0]), math.exp(res.x[1]))
    return p, float(res.fun), bool(res.success), int(res.nit)


def _polish_mle(s: Sample, p: Parameters, nll: float):
    """Newton steps on the analytic score in log-parameter space.

    The simplex stops once function values stop resolving, which can leave a
    score of order 1e-3 when theta is small; a couple of Newton steps remove it.
    Steps that lower the likelihood are rejected.
    """
    for _ in range(3):
        z = np.log(p.as_tuple())

        def g(w):
            q = Parameters(math.exp(w[0]), math.exp(w[1]))
            da, dt = score(s, q)
            return np.array([da * q.alpha, dt * q.theta])

        h = 1e-5
        jac = np.column_stack([(g(z + h * e) - g(z - h * e)) / (2 * h) for e in np.eye(2)])
        try:
            step = np.linalg.solve(jac, g(z))
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or np.max(np.abs(step)) > 1e-2:
            break
        w = z - step
        q = Parameters(math.exp(w[0]), math.exp(w[1]))
        val = -log_likelihood(s, q)
        if not val <= nll + 1e-12 * abs(nll):
            break
        p, nll = q, val
    return p, nll


def fit(s, method: str = "mle", init: Parameters | None = None) -> FitResult:
    """Fit with any of the five methods; non-convergence is reported, not raised."""
    s = _as_sample(s)
    if s.n < 2:
        raise DomainError("fitting needs at least two observations")
    fn, sign = _OBJECTIVES[_check_method(method)]
    p, val, ok, nit = minimize_log_params(fn, s, init)
    if method == "mle" and ok:
        p, val = _polish_mle(s, p, val)
    return FitResult(
        method=method,
        params=p,
        objective_at_optimum=sign * val,
        converged=ok,
        iterations=nit,
        neg_log_lik=-log_likelihood(s, p),
    )


def fit_mle(s, init: Parameters | None = None) -> FitResult:
    return fit(s, "mle", init)


def fit_lse(s, init: Parameters | None = None) -> FitResult:
    return fit(s, "lse", init)


def fit_wlse(s, init: Parameters | None = None) -> FitResult:
    return fit(s, "wlse", init)


def fit_cme(s, init: Parameters | None = None) -> FitResult:
    return fit(s, "cme", init)


def fit_mpse(s, init: Parameters | None = None) -> FitResult:
    return fit(s, "mpse", init)


# -- plug-in reliability -------------------------------------------------------------

def plugin_survival(x, result: FitResult):
    """Survival function at the fitted parameters (same path for every method)."""
    return exgd_survival(x, result.params)


def plugin_hazard(x, result: FitResult):
    return exgd_hazard(x, result.params)


__all__ = [
    "FitResult",
    "METHODS",
    "Sample",
    "cme_objective",
    "fit",
    "fit_cme",
    "fit_lse",
    "fit_mle",
    "fit_mpse",
    "fit_wlse",
    "log_likelihood",
    "lse_objective",
    "mpse_objective",
    "objective",
    "plugin_hazard",
    "plugin_survival",
    "score",
    "spacings",
    "wlse_objective",
]
