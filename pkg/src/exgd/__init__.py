"""Exponentiated xgamma distribution: distribution functions, series moments,
estimation, model comparison and a command-line front end."""

from .distribution import (
    Parameters,
    bowley_skewness,
    exgd_cdf,
    exgd_hazard,
    exgd_logpdf,
    exgd_pdf,
    exgd_survival,
    moors_kurtosis,
    order_stat_cdf,
    order_stat_pdf,
    quantile,
    sample,
    sample_mixture,
    xgamma_cdf,
    xgamma_pdf,
)
from .errors import (
    ConvergenceError,
    DataError,
    DomainError,
    PoleError,
    SeriesConvergenceError,
    SurvivalUnderflowError,
)
from .estimation import (
    FitResult,
    Sample,
    fit,
    fit_cme,
    fit_lse,
    fit_mle,
    fit_mpse,
    fit_wlse,
    log_likelihood,
    plugin_hazard,
    plugin_survival,
    score,
)
from .properties import (
    Moments,
    bonferroni_curve,
    bonferroni_index,
    cgf,
    conditional_moment,
    gini_index,
    lorenz_curve,
    mean_deviation,
    mgf,
    moments,
    raw_moment,
)
from .series import K1, K2, L1, L2, SeriesConfig
from .comparators import MODELS, ModelFit, ModelSpec, model_cdf, model_fit_mle, model_pdf
from .selection import ComparisonRow, ComparisonTable, compare_models, criteria, ks_statistic
from .data import gastric_cancer, ingest

__version__ = "0.1.0"
