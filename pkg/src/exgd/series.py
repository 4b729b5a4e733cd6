"""Binomial-expansion series for the EXGD moment integrals.

For ``a > 0, b > 0, delta > 0, c >= 0, t >= 0`` define

    L1(a, b, c, delta, t) = int_t^inf x^c e^{-delta x} U_b(x)^(a-1) dx,

with ``U_b`` the xgamma CDF at scale ``b``; ``L2`` is the same with ``c + 2``,
and ``K1``/``K2`` are the ``t = 0`` cases. Expanding ``U_b^(a-1)`` binomially
and the inner polynomial ``(1 + b + b x + b^2 x^2 / 2)^i`` term by term gives

    sum_i C(a-1, i) (-1)^i / (1+b)^i
          sum_{j<=i} sum_{k<=j} sum_{l<=k} C(i,j) C(j,k) C(k,l) b^j (b/2)^l
          Gamma(c+k+l+1, t D_i) / D_i^(c+k+l+1),        D_i = b i + delta.

The triple inner sum depends on ``(j, k, l)`` only through ``m = k + l`` once
the coefficients are collected, and those collected coefficients are exactly
the coefficients of ``Q(x)^i`` with ``Q(x) = 1 + b/(1+b) x + b^2/(2(1+b)) x^2``.
They are built by one convolution per outer index, in log space, so each outer
term costs ``O(i)`` rather than ``O(i^3)``.

Outer-sum truncation. For integer ``a`` the outer sum terminates after ``a``
terms. Otherwise it is summed until the latest outer term is below
``rel_tol`` times the running sum. For ``t = 0`` the outer terms decay only
like ``i^-(a+c+1)``, so this rule alone can need millions of terms; at
doubling checkpoints the remainder is instead estimated by fitting
``T_i ~ i^-(a+c+1) sum_k d_k i^-k`` on the trailing half of the terms and
summing the fitted tail with Hurwitz zeta functions. The estimate is accepted
when two successive checkpoints agree to ``tail_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp, zeta

from .errors import DomainError, SeriesConvergenceError
from .special import log_upper_incomplete_gamma


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation policy for the outer (``i``) sum.

    max_terms: cap on the number of outer terms.
    rel_tol: stop once ``|T_i| < rel_tol * |partial sum|``.
    tail_tol: acceptance threshold for the extrapolated remainder (t = 0 only).
    extrapolate: allow the fitted-tail estimate; without it only ``rel_tol``
        counts.
    """

    max_terms: int = 8192
    rel_tol: float = 1e-12
    tail_tol: float = 1e-8
    extrapolate: bool = True

    def __post_init__(self):
        if not (int(self.max_terms) == self.max_terms and self.max_terms >= 1):
            raise DomainError("max_terms must be a positive integer")
        if not 0 < self.rel_tol < 1:
            raise DomainError("rel_tol must lie in (0, 1)")
        if not 0 < self.tail_tol < 1:
            raise DomainError("tail_tol must lie in (0, 1)")


DEFAULT_CONFIG = SeriesConfig()

_FIT_ORDER = 6
_FIRST_CHECKPOINT = 64


def _validate(a, b, c, delta, t):
    for v in (a, b, c, delta, t):
        if not math.isfinite(v):
            raise DomainError("series arguments must be finite")
    if not (a > 0 and b > 0 and delta > 0 and c >= 0 and t >= 0):
        raise DomainError(
            f"series requires a > 0, b > 0, delta > 0, c >= 0, t >= 0; "
            f"got a={a}, b={b}, c={c}, delta={delta}, t={t}"
        )


def _log_upper_gamma_ladder(s: float, x: float, count: int) -> np.ndarray:
    """``log Gamma(s + m, x)`` for ``m = 0 .. count-1``.

    Uses ``Q(s+m+1, x) = Q(s+m, x) + x^(s+m) e^-x / Gamma(s+m+1)``, which only
    adds positive terms and is therefore stable in the upward direction.
    """
    m = np.arange(count, dtype=float)
    lg = gammaln(s + m)
    if x == 0:
        return lg
    log_q0 = log_upper_incomplete_gamma(s, x) - lg[0]
    if count == 1:
        return lg + log_q0
    incr = (s + m[:-1]) * math.log(x) - x - gammaln(s + m[:-1] + 1.0)
    log_q = np.logaddexp.accumulate(np.concatenate(([log_q0], incr)))
    return lg + np.minimum(log_q, 0.0)


def _tail_estimate(terms: np.ndarray, p: float) -> float:
    """Partial sum plus a fitted power-law remainder for ``sum_{i >= N}``."""
    N = len(terms)
    i = np.arange(N // 2, N, dtype=float)
    z = N / i
    y = terms[N // 2:] / z**p
    basis = np.vstack([z**k for k in range(_FIT_ORDER)]).T
    coef, *_ = np.linalg.lstsq(basis, y, rcond=None)
    tail = sum(coef[k] * N ** (p + k) * zeta(p + k, N) for k in range(_FIT_ORDER))
    return math.fsum(terms) + tail


class _Track:
    """Running state of one integral inside :func:`binomial_series`."""

    def __init__(self, c, delta, t):
        self.c, self.delta, self.t = c, delta, t
        self.terms = []
        self.partial = 0.0
        self.scale = 0.0  # log of the i = 0 inner sum; terms are stored relative to it
        self.done = False
        self.estimate = math.nan
        self.error = math.inf

    def finish(self, value, error=0.0):
        self.done = True
        self.estimate = value
        self.error = error


def binomial_series(a: float, b: float, specs, cfg: SeriesConfig = DEFAULT_CONFIG, weights=None):
    """Evaluate ``L1(a, b, c, delta, t)`` for every ``(c, delta, t)`` in ``specs``.

    All specs share the polynomial coefficients, so batching related
    integrals (e.g. the four raw moments) costs little more than one.

    With ``weights`` (one row, or a list of rows, each as long as ``specs``)
    the return value is the weighted combination per row and convergence is
    judged on those combinations rather than on each integral. Without it a
    list with one value per spec is returned.
    Raises :class:`SeriesConvergenceError` when the budget runs out.
    """
    tracks = [_Track(float(c), float(d), float(t)) for c, d, t in specs]
    for tr in tracks:
        _validate(a, b, tr.c, tr.delta, tr.t)
    single_row = False
    rows = None
    if weights is not None:
        rows = np.atleast_2d(np.asarray(weights, dtype=float))
        single_row = np.ndim(weights) == 1
        if rows.shape[1] != len(tracks):
            raise DomainError("weights and specs differ in length")

    integer_a = float(a).is_integer()
    n_outer = int(a) if integer_a else int(cfg.max_terms)
    width = 2 * n_outer - 1
    m_all = np.arange(width, dtype=float)

    zero_t = [tr for tr in tracks if tr.t == 0.0]
    pos_t = [tr for tr in tracks if tr.t > 0.0]
    if zero_t:
        c0 = np.array([tr.c for tr in zero_t])
        delta0 = np.array([tr.delta for tr in zero_t])
        lg0 = gammaln(c0[:, None] + m_all[None, :] + 1.0)
        pw0 = c0[:, None] + m_all[None, :] + 1.0
        idx0 = np.arange(len(zero_t))

    log_u = math.log(b / (1.0 + b))
    log_v = math.log(b * b / (2.0 * (1.0 + b)))
    log_q = np.zeros(1)
    coef = 1.0  # C(a-1, i) (-1)^i
    combo = combo_err = None  # weighted combinations at the latest checkpoint

    for i in range(n_outer):
        if i > 0:
            new = np.full(2 * i + 1, -np.inf)
            new[: 2 * i - 1] = log_q
            new[1: 2 * i] = np.logaddexp(new[1: 2 * i], log_q + log_u)
            new[2:] = np.logaddexp(new[2:], log_q + log_v)
            log_q = new
            coef *= -(a - i) / i
        if coef == 0.0:
            break
        k = 2 * i + 1

        if zero_t:
            live = [j for j in idx0 if not zero_t[j].done]
            if live:
                log_D = np.log(b * i + delta0[live])
                mat = log_q[None, :] + lg0[live, :k] - pw0[live, :k] * log_D[:, None]
                for j, val in zip(live, logsumexp(mat, axis=1)):
                    _push(zero_t[j], i, coef, val)
        for tr in pos_t:
            if tr.done:
                continue
            D = b * i + tr.delta
            log_g = _log_upper_gamma_ladder(tr.c + 1.0, tr.t * D, k)
            _push(tr, i, coef, logsumexp(log_q + log_g - (tr.c + m_all[:k] + 1.0) * math.log(D)))

        if integer_a:
            continue
        n = i + 1
        checkpoint = n >= _FIRST_CHECKPOINT and (n & (n - 1)) == 0
        for tr in tracks:
            if tr.done:
                continue
            if i > 0 and abs(tr.terms[-1]) < cfg.rel_tol * abs(tr.partial):
                tr.finish(math.fsum(tr.terms))
            elif checkpoint and tr.t == 0.0 and cfg.extrapolate:
                tail = np.asarray(tr.terms[n // 2:])
                if np.all(tail > 0) or np.all(tail < 0):
                    est = _tail_estimate(np.asarray(tr.terms), a + tr.c + 1.0)
                    tr.error = abs(est - tr.estimate)  # nan -> inf on first pass below
                    if not math.isfinite(tr.error):
                        tr.error = math.inf
                    tr.estimate = est
                    if tr.error <= cfg.tail_tol * abs(est):
                        tr.finish(est, tr.error)
        if all(tr.done for tr in tracks):
            break
        if rows is not None and checkpoint:
            current = _combine(rows, tracks)
            if current is not None and combo is not None:
                combo_err = np.abs(current - combo)
                if np.all(combo_err <= cfg.tail_tol * np.abs(current)):
                    for tr in tracks:
                        if not tr.done:
                            tr.finish(tr.estimate, tr.error)
                    break
            combo = current

    for tr in tracks:
        if integer_a:
            tr.finish(math.fsum(tr.terms))
    if not all(tr.done for tr in tracks):
        best = np.array([
            (tr.estimate if math.isfinite(tr.estimate) else math.fsum(tr.terms)) * math.exp(tr.scale)
            for tr in tracks
        ])
        errs = np.array([
            (tr.error if math.isfinite(tr.error) else abs(tr.terms[-1]) * len(tr.terms)) * math.exp(tr.scale)
            for tr in tracks
        ])
        bad = [tr for tr in tracks if not tr.done][0]
        if rows is None:
            estimate, err = list(best), list(errs)
        else:
            estimate = rows @ best
            err = combo_err if combo_err is not None else np.abs(rows) @ errs
            if single_row:
                estimate, err = float(estimate[0]), float(err[0])
        raise SeriesConvergenceError(
            f"outer series did not converge within {n_outer} terms "
            f"(a={a}, b={b}, c={bad.c}, delta={bad.delta}, t={bad.t})",
            estimate=estimate,
            error_estimate=err,
            terms=len(bad.terms),
        )
    values = np.array([tr.estimate * math.exp(tr.scale) for tr in tracks])
    if rows is None:
        return list(values)
    combos = [math.fsum(r * values) for r in rows]
    return combos[0] if single_row else combos


def _combine(rows, tracks):
    # the per-integral errors are strongly correlated, so the combination is
    # judged by its own change between checkpoints
    est = np.array([tr.estimate * math.exp(tr.scale) for tr in tracks])
    if not np.all(np.isfinite(est)):
        return None
    return rows @ est


def _push(tr: _Track, i: int, coef: float, log_inner: float) -> None:
    if i == 0:
        tr.scale = log_inner
    term = coef * math.exp(log_inner - tr.scale)
    tr.terms.append(term)
    tr.partial += term


def K1(a, b, c, delta, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``int_0^inf x^c e^{-delta x} U_b(x)^(a-1) dx`` by the binomial series."""
    return binomial_series(a, b, [(c, delta, 0.0)], cfg)[0]


def K2(a, b, c, delta, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """``K1`` with the power of ``x`` raised by two."""
    return binomial_series(a, b, [(c + 2.0, delta, 0.0)], cfg)[0]


def L1(a, b, c, delta, t, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    """Tail version of ``K1``: the integral over ``[t, inf)``."""
    return binomial_series(a, b, [(c, delta, t)], cfg)[0]


def L2(a, b, c, delta, t, cfg: SeriesConfig = DEFAULT_CONFIG) -> float:
    return binomial_series(a, b, [(c + 2.0, delta, t)], cfg)[0]


def K1_direct(a, b, c, delta, n_outer: int) -> float:
    """The quadruple sum exactly as written, truncated at ``n_outer`` outer terms.

    ``O(n_outer^4)``; kept as an independent check on :func:`binomial_series`.
    """
    total = 0.0
    coef = 1.0
    for i in range(n_outer):
        if i > 0:
            coef *= (a - i) / i
        for j in range(i + 1):
            for k in range(j + 1):
                for l in range(k + 1):
                    s = c + k + l + 1
                    total += (
                        coef * math.comb(i, j) * math.comb(j, k) * math.comb(k, l)
                        * (-1) ** i * b**j * (b / 2) ** l
                        * math.exp(math.lgamma(s) - s * math.log(b * i + delta))
                        / (1 + b) ** i
                    )
    return total
