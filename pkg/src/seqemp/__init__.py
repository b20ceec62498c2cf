"""Sequential empirical processes under alpha-mixing.

Threshold-indexed (sequential) empirical processes, the SETAR threshold test,
a changepoint test for regressions with dependent innovations, simulation of
the Gaussian limits, and numerical checkers for the mixing/entropy conditions.
"""

__version__ = "0.1.0"

from .exceptions import CholeskyError, CsvFormatError, DegenerateDataError
from .laws import Law
from .seriesgen import (
    CatalogFunction,
    Innovation,
    MixingSpec,
    RegressionSample,
    UnivariateSeries,
    alpha_of,
    gen_mds_innovations,
    gen_regression,
    gen_setar,
)
from .empproc import ProcessPath, ThresholdFamily, d_metric, eval_process, rho_norm
from .entropy import (
    BracketSet,
    ConditionReport,
    EntropyBudget,
    bracketing_number,
    build_brackets,
    check_A1,
    check_A2_integral,
    check_A3,
)
from .limits import (
    GaussianLimit,
    QuantileTable,
    build_gamma_limit,
    functional_quantiles,
    ks_cdf,
    ks_quantile,
    sample_sup,
    simulate_bridge,
)
from .report import TestReport
from .setar_test import SetarTestConfig, regime_means, run_setar_test, sigma2_hat, t_process
from .cpt_test import CptConfig, alpha_process, beta_process, run_cpt_test

__all__ = [
    "BracketSet",
    "CatalogFunction",
    "CholeskyError",
    "ConditionReport",
    "CptConfig",
    "CsvFormatError",
    "DegenerateDataError",
    "EntropyBudget",
    "GaussianLimit",
    "Innovation",
    "Law",
    "MixingSpec",
    "ProcessPath",
    "QuantileTable",
    "RegressionSample",
    "SetarTestConfig",
    "TestReport",
    "ThresholdFamily",
    "UnivariateSeries",
    "alpha_of",
    "alpha_process",
    "beta_process",
    "bracketing_number",
    "build_brackets",
    "build_gamma_limit",
    "check_A1",
    "check_A2_integral",
    "check_A3",
    "d_metric",
    "eval_process",
    "functional_quantiles",
    "gen_mds_innovations",
    "gen_regression",
    "gen_setar",
    "ks_cdf",
    "ks_quantile",
    "regime_means",
    "rho_norm",
    "run_cpt_test",
    "run_setar_test",
    "sample_sup",
    "sigma2_hat",
    "simulate_bridge",
    "t_process",
]
