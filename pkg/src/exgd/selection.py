"""Information criteria, the Kolmogorov-Smirnov distance and comparison tables."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .comparators import MODELS, ModelSpec, model_cdf, model_fit_mle, n_params
from .errors import DomainError
from .estimation import _as_sample
from .report import dumps_json, fmt_sig

COLUMNS = ("Model", "MLE", "-LogL", "AIC", "CAIC", "HQIC", "BIC", "KS")
CRITERIA = ("neg_log_lik", "aic", "caic", "hqic", "bic", "ks")


def ks_statistic(s, cdf: Callable, alternative: str = "two-sided") -> float:
    """``max_i max(i/n - F(x_i), F(x_i) - (i-1)/n)`` over the sorted sample.

    ``alternative="greater"`` returns only the first part, ``D+``, and
    ``"less"`` only the second, ``D-``.
    """
    s = _as_sample(s)
    F = np.asarray(cdf(s.x), dtype=float)
    if F.shape != s.x.shape or np.any(~np.isfinite(F)):
        raise DomainError("cdf must return one finite value per observation")
    i = np.arange(1, s.n + 1)
    d_plus = float(np.max(i / s.n - F))
    d_minus = float(np.max(F - (i - 1) / s.n))
    if alternative == "two-sided":
        return max(d_plus, d_minus)
    if alternative == "greater":
        return d_plus
    if alternative == "less":
        return d_minus
    raise DomainError(f"unknown alternative {alternative!r}")


class Criteria(NamedTuple):
    aic: float
    caic: float
    hqic: float
    bic: float


def criteria(neg_log_lik: float, k: int, n: int) -> Criteria:
    """AIC, consistent AIC, Hannan-Quinn and Bayesian criteria.

    ``caic = 2 nll + k (log n + 1)`` (Bozdogan's consistent AIC), which equals
    ``bic + k``. The small-sample corrected AIC is available as :func:`aicc`.
    """
    if not (int(k) == k and k >= 0):
        raise DomainError(f"k must be a nonnegative integer, got {k!r}")
    if not (int(n) == n and n >= 2):
        raise DomainError(f"n must be an integer >= 2, got {n!r}")
    if not math.isfinite(neg_log_lik):
        raise DomainError("neg_log_lik must be finite")
    two_nll = 2.0 * neg_log_lik
    log_n = math.log(n)
    return Criteria(
        aic=two_nll + 2.0 * k,
        caic=two_nll + k * (log_n + 1.0),
        hqic=two_nll + 2.0 * k * math.log(log_n),
        bic=two_nll + k * log_n,
    )


def aicc(neg_log_lik: float, k: int, n: int) -> float:
    """Small-sample corrected AIC; undefined when ``n <= k + 1``."""
    if n <= k + 1:
        raise DomainError("AICc needs n > k + 1")
    return 2.0 * neg_log_lik + 2.0 * k + 2.0 * k * (k + 1) / (n - k - 1)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    k: int
    params: tuple = ()
    neg_log_lik: float = math.nan
    aic: float = math.nan
    caic: float = math.nan
    hqic: float = math.nan
    bic: float = math.nan
    ks: float = math.nan
    converged: bool = False
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def as_dict(self) -> dict:
        return {
            "model": self.name,
            "k": self.k,
            "params": list(self.params),
            "neg_log_lik": self.neg_log_lik,
            "aic": self.aic,
            "caic": self.caic,
            "hqic": self.hqic,
            "bic": self.bic,
            "ks": self.ks,
            "converged": self.converged,
            "error": self.error,
        }


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple
    n: int
    notes: tuple = field(default=())

    def row(self, name: str) -> ComparisonRow:
        for r in self.rows:
            if r.name == name.upper():
                return r
        raise KeyError(name)

    def sorted_by(self, criterion: str = "aic") -> list:
        if criterion not in CRITERIA:
            raise DomainError(f"unknown criterion {criterion!r}; expected one of {CRITERIA}")
        good = sorted((r for r in self.rows if r.ok), key=lambda r: getattr(r, criterion))
        return good + [r for r in self.rows if not r.ok]

    def best(self, criterion: str = "aic") -> str:
        return self.sorted_by(criterion)[0].name

    def to_records(self) -> list:
        return [r.as_dict() for r in self.rows]

    def to_json(self) -> str:
        return dumps_json({"spec_version": 1, "n": self.n, "rows": self.to_records(), "notes": list(self.notes)})

    def _cells(self, r: ComparisonRow, digits=None):
        fmt = (lambda v: fmt_sig(v, digits)) if digits else (lambda v: repr(float(v)))
        if len(r.params) == 1:
            mle = fmt(r.params[0])
        elif r.params:
            mle = "[" + ", ".join(fmt(v) for v in r.params) + "]"
        else:
            mle = ""
        return [r.name, mle] + [fmt(getattr(r, c)) for c in CRITERIA]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in self.rows:
            w.writerow(self._cells(r))
        return buf.getvalue()

    def to_text(self, digits: int = 6) -> str:
        body = [list(COLUMNS)] + [self._cells(r, digits) for r in self.rows]
        widths = [max(len(line[j]) for line in body) for j in range(len(COLUMNS))]
        lines = ["  ".join(cell.ljust(wd) for cell, wd in zip(line, widths)).rstrip() for line in body]
        return "\n".join(lines + list(self.notes)) + "\n"


def compare_models(s, models=MODELS) -> ComparisonTable:
    """Fit each model by maximum likelihood and tabulate the selection criteria.

    A model whose fit fails gets a row carrying the error message instead of
    aborting the whole table.
    """
    s = _as_sample(s)
    rows = []
    for name in models:
        k = n_params(name)
        try:
            fit = model_fit_mle(name, s)
            spec: ModelSpec = fit.model
            crit = criteria(fit.neg_log_lik, spec.k, s.n)
            ks = ks_statistic(s, lambda x, spec=spec: model_cdf(spec.name, spec.params, x))
            rows.append(ComparisonRow(
                name=spec.name, k=spec.k, params=spec.params, neg_log_lik=fit.neg_log_lik,
                ks=ks, converged=fit.converged, **crit._asdict(),
            ))
        except (ArithmeticError, ValueError, RuntimeError) as exc:
            rows.append(ComparisonRow(name=str(name).upper(), k=k, error=f"{type(exc).__name__}: {exc}"))
    return ComparisonTable(rows=tuple(rows), n=s.n)


# -- reference table for the bundled gastric-cancer sample ----------------------------

REFERENCE = {
    "ED": ((0.00139,), 340.9940, 683.9880, 686.7947, 684.6616, 685.7947, 0.1421),
    "LD": ((0.00278,), 342.6316, 687.2631, 690.0698, 687.9366, 689.0698, 0.1524),
    "RD": ((1.06e-06,), 356.6573, 715.3147, 718.1213, 684.6616, 717.1213, 0.3321),
    "XGD": ((0.00413,), 346.9955, 695.9910, 698.7976, 696.6645, 697.7976, 0.2035),
    "GED": ((1.3099, 0.00165), 340.1633, 684.3265, 689.9399, 685.6735, 687.9399, 0.1012),
    "WD": ((1.1568, 0.00132), 340.2174, 684.4348, 690.0481, 685.7818, 688.0481, 0.4318),
    "GD": ((1.2822, 0.00178), 340.1868, 684.3735, 689.9868, 685.7205, 687.9868, 0.1033),
    "EXGD": ((0.4634, 0.00278), 338.6061, 681.2121, 686.8255, 682.5592, 684.8255, 0.1326),
}
"""Reference values for the 45-patient sample: (params, nll, AIC, CAIC, HQIC, BIC, KS)."""

SUSPECT_CELLS = {("RD", "hqic"), ("WD", "ks")}
TOLERANCES = {"params": 1e-2, "neg_log_lik": 5e-3, "aic": 2e-2, "caic": 2e-2, "hqic": 2e-2, "bic": 2e-2, "ks": 5e-3}


@dataclass(frozen=True)
class Divergence:
    model: str
    column: str
    expected: float
    computed: float
    suspect: bool  # the reference cell is believed to be a typo


def divergences(table: ComparisonTable, reference=REFERENCE, tolerances=TOLERANCES) -> list:
    """Cells where a recomputed value differs from the reference value beyond tolerance.

    Parameter estimates are compared relatively, everything else absolutely.
    """
    out = []
    for name, (params, *cells) in reference.items():
        try:
            row = table.row(name)
        except KeyError:
            continue
        if not row.ok:
            out.append(Divergence(name, "fit", math.nan, math.nan, False))
            continue
        for j, (pv, cv) in enumerate(zip(params, row.params)):
            if abs(cv / pv - 1.0) > tolerances["params"]:
                out.append(Divergence(name, f"param{j + 1}", pv, cv, False))
        for col, expected in zip(CRITERIA, cells):
            computed = getattr(row, col)
            if abs(computed - expected) > tolerances[col]:
                out.append(Divergence(name, col, expected, computed, (name, col) in SUSPECT_CELLS))
    return out


def annotate(table: ComparisonTable, reference=REFERENCE) -> ComparisonTable:
    """Attach one note per divergence from the reference table."""
    notes = tuple(
        f"note: {d.model} {d.column} recomputed {fmt_sig(d.computed, 6)} vs reference {fmt_sig(d.expected, 6)}"
        + (" (reference cell looks like a typo)" if d.suspect else "")
        for d in divergences(table, reference)
    )
    return ComparisonTable(rows=table.rows, n=table.n, notes=table.notes + notes)
