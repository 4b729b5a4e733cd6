import csv
import io
import json
import math

import numpy as np
import pytest

from exgd import distribution as dist
from exgd.data import gastric_cancer
from exgd.errors import DomainError
from exgd.estimation import fit_mle
from exgd.selection import (
    COLUMNS, REFERENCE, aicc, annotate, compare_models, criteria, divergences, ks_statistic,
)


@pytest.fixture(scope="module")
def table():
    return compare_models(gastric_cancer())


# -- KS ------------------------------------------------------------------------------

def test_ks_single_point():
    assert ks_statistic([1.0], lambda x: np.full_like(x, 0.5)) == 0.5


def test_ks_symmetric_positions():
    n = 8
    p = dist.Parameters(2.0, 1.0)
    x = dist.quantile((np.arange(1, n + 1) - 0.5) / n, p)
    assert ks_statistic(x, lambda v: dist.exgd_cdf(v, p)) == pytest.approx(0.5 / n, abs=1e-12)


def test_ks_one_sided_parts():
    x = dist.sample(40, dist.Parameters(1.3, 0.6), seed=2)
    F = lambda v: dist.exgd_cdf(v, dist.Parameters(1.0, 1.0))
    d, dp, dm = (ks_statistic(x, F, alt) for alt in ("two-sided", "greater", "less"))
    assert d == max(dp, dm)
    with pytest.raises(DomainError):
        ks_statistic(x, F, "both")


def test_ks_invariant_under_monotone_transform():
    p = dist.Parameters(1.5, 0.8)
    x = dist.sample(60, p, seed=7)
    F = lambda v: dist.exgd_cdf(v, p)
    G = lambda y: dist.exgd_cdf(np.sqrt(y), p)  # data squared, cdf argument mapped back
    assert ks_statistic(x**2, G) == pytest.approx(ks_statistic(x, F), abs=1e-15)


def test_ks_gastric_exgd(table):
    assert table.row("EXGD").ks == pytest.approx(0.1326, abs=5e-3)
    s = gastric_cancer()
    r = fit_mle(s)
    assert ks_statistic(s, lambda v: dist.exgd_cdf(v, r.params)) == table.row("EXGD").ks


# -- criteria ----------------------------------------------------------------------------

def test_criteria_examples():
    c = criteria(338.6061, 2, 45)
    assert c.aic == pytest.approx(681.2122, abs=1e-9)
    c = criteria(340.9940, 1, 45)
    assert c.aic == pytest.approx(683.9880, abs=1e-9)
    assert c.bic == pytest.approx(683.9880 - 2 + math.log(45), abs=1e-9)
    assert c.bic == pytest.approx(685.7947, abs=1e-3)
    assert criteria(10.0, 0, 45).aic == 20.0


@pytest.mark.parametrize("name", list(REFERENCE))
def test_criteria_reproduce_reference_arithmetic(name):
    _, nll, aic, caic, hqic, bic, _ = REFERENCE[name]
    k = len(REFERENCE[name][0])
    c = criteria(nll, k, 45)
    assert c.aic == pytest.approx(aic, abs=2e-3)
    assert c.bic == pytest.approx(bic, abs=2e-3)
    assert c.caic == pytest.approx(caic, abs=2e-3)
    if name != "RD":  # the reference RD cell repeats the ED value
        assert c.hqic == pytest.approx(hqic, abs=2e-3)


def test_consistent_aic_relation():
    c = criteria(100.0, 3, 50)
    assert c.caic == pytest.approx(c.bic + 3)
    assert c.hqic == pytest.approx(200 + 6 * math.log(math.log(50)))


def test_aicc():
    assert aicc(100.0, 2, 45) == pytest.approx(204 + 12 / 42)
    with pytest.raises(DomainError):
        aicc(1.0, 2, 3)


@pytest.mark.parametrize("args", [(1.0, -1, 10), (1.0, 1, 1), (float("nan"), 1, 10), (1.0, 1.5, 10)])
def test_criteria_validation(args):
    with pytest.raises(DomainError):
        criteria(*args)


def test_same_k_orderings_coincide():
    rng = np.random.default_rng(0)
    nll = rng.uniform(100, 200, 10)
    for field in ("aic", "caic", "hqic", "bic"):
        vals = [getattr(criteria(v, 2, 45), field) for v in nll]
        assert list(np.argsort(vals)) == list(np.argsort(nll))


# -- comparison table ---------------------------------------------------------------------

def test_exgd_best_by_aic(table):
    assert table.best("aic") == "EXGD"
    assert [r.name for r in table.sorted_by("neg_log_lik")][0] == "EXGD"


def test_rank_by_aic_equals_rank_by_likelihood_for_equal_k(table):
    two = [r for r in table.rows if r.k == 2]
    assert sorted(two, key=lambda r: r.aic) == sorted(two, key=lambda r: r.neg_log_lik)


def test_single_model_table():
    t = compare_models(gastric_cancer(), ("LD",))
    assert len(t.rows) == 1 and t.best() == "LD"


def test_unknown_sort_key(table):
    with pytest.raises(DomainError):
        table.sorted_by("r2")


def test_failed_fit_is_recorded_in_row(monkeypatch):
    import exgd.selection as sel

    real = sel.model_fit_mle

    def flaky(name, s):
        if name == "GD":
            raise ArithmeticError("simulated failure")
        return real(name, s)

    monkeypatch.setattr(sel, "model_fit_mle", flaky)
    t = compare_models([1.0, 2.0, 3.0], ("ED", "GD"))
    assert t.row("ED").ok
    assert not t.row("GD").ok and "simulated failure" in t.row("GD").error
    assert t.best() == "ED"


def test_unknown_model_rejected():
    with pytest.raises(DomainError):
        compare_models([1.0, 2.0, 3.0], ("ED", "NOPE"))


def test_deterministic(table):
    assert compare_models(gastric_cancer()).to_json() == table.to_json()


def test_csv_layout(table):
    rows = list(csv.reader(io.StringIO(table.to_csv())))
    assert tuple(rows[0]) == COLUMNS == ("Model", "MLE", "-LogL", "AIC", "CAIC", "HQIC", "BIC", "KS")
    assert [r[0] for r in rows[1:]] == ["ED", "LD", "RD", "XGD", "GED", "WD", "GD", "EXGD"]
    assert rows[-1][1].startswith("[") and float(rows[-1][2]) == table.row("EXGD").neg_log_lik


def test_json_layout(table):
    obj = json.loads(table.to_json())
    assert obj["spec_version"] == 1 and obj["n"] == 45
    keys = list(obj["rows"][0])
    assert keys[:9] == ["model", "k", "params", "neg_log_lik", "aic", "caic", "hqic", "bic", "ks"]
    assert obj["rows"][-1]["aic"] == table.row("EXGD").aic


def test_text_table_uses_six_digits(table):
    text = table.to_text()
    assert "338.606" in text and "338.6061" not in text.split("\n")[-2]


def test_divergences_flag_known_typos(table):
    found = {(d.model, d.column): d for d in divergences(table)}
    assert found[("RD", "hqic")].suspect
    assert found[("WD", "ks")].suspect
    notes = annotate(table).notes
    assert any("RD hqic" in n for n in notes)
