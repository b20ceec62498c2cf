"""Test for a threshold effect in the mean of a two-regime SETAR model.

For observations ``Y_0, ..., Y_n`` and a threshold ``z`` define the lag-based
empirical CDF ``F(z) = n^-1 sum I{Y_{i-1} <= z}`` and the regime means
``mu1(z)``, ``mu2(z)``.  The difference process

    T_n(z) = sqrt(n) F(z) (1 - F(z)) (mu1(z) - mu2(z))
           = n^{-1/2} sum_i Y_i (I{Y_{i-1} <= z} - F(z))

is small for all ``z`` when the regime means coincide.  The statistics

    T_n1 = sup_z |T_n(z)| / sigma
    T_n2 = sigma^-2 n^-1 sum_j T_n(Y_{j-1})^2

converge to ``sup |B_0|`` and ``int_0^1 B_0^2`` under the null.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .empproc import ProcessPath, jump_grid
from .exceptions import DegenerateDataError
from .limits import QuantileTable, ks_cdf, ks_quantile
from .report import TestReport
from .seriesgen import UnivariateSeries

__all__ = [
    "SetarTestConfig",
    "regime_means",
    "run_setar_test",
    "sigma2_hat",
    "t_at",
    "t_process",
]

MIN_N = 10


def _as_series(series) -> UnivariateSeries:
    return series if isinstance(series, UnivariateSeries) else UnivariateSeries(series)


def regime_means(series, z: float) -> tuple[float, float, float]:
    """``(mu1(z), mu2(z), F(z))``; an empty regime yields ``nan`` for its mean."""
    series = _as_series(series)
    lag, y, n = series.lagged, series.responses, series.n
    ind = lag <= z
    F = ind.mean()
    s1 = y[ind].sum()
    s2 = y[~ind].sum()
    mu1 = s1 / (n * F) if F > 0 else math.nan
    mu2 = s2 / (n * (1 - F)) if F < 1 else math.nan
    return float(mu1), float(mu2), float(F)


class _Cumulative:
    """Sorted-lag cumulative sums giving ``T_n`` at any threshold in O(log n)."""

    def __init__(self, series: UnivariateSeries):
        self.n = series.n
        order = np.argsort(series.lagged, kind="stable")
        self.sorted_lags = series.lagged[order]
        self.csum = np.concatenate([[0.0], np.cumsum(series.responses[order])])
        self.total = self.csum[-1]

    def at(self, z) -> np.ndarray:
        k = np.searchsorted(self.sorted_lags, np.asarray(z, dtype=float), side="right")
        F = k / self.n
        t = (self.csum[k] - F * self.total) / math.sqrt(self.n)
        return np.where((k == 0) | (k == self.n), 0.0, t)


def t_at(series, z) -> np.ndarray:
    """``T_n`` evaluated at arbitrary thresholds."""
    series = _as_series(series)
    return _Cumulative(series).at(z)


def t_process(series) -> ProcessPath:
    """``T_n`` on the jump grid (distinct lagged values plus two sentinels), ``s = 1``."""
    series = _as_series(series)
    if series.n < 2:
        raise ValueError("t_process needs n >= 2")
    z = jump_grid(series.lagged)
    vals = _Cumulative(series).at(z)
    return ProcessPath(np.array([1.0]), z, vals[None, :], series.n, "empirical")


def sigma2_hat(series) -> float:
    """Sample variance (divisor ``n``) of ``Y_1, ..., Y_n``."""
    series = _as_series(series)
    y = series.responses
    if y.size < 2:
        raise ValueError("sigma2_hat needs n >= 2")
    if np.ptp(y) == 0:
        raise DegenerateDataError("responses are constant; the variance estimate is zero")
    return float(np.mean((y - y.mean()) ** 2))


_STATISTICS = ("KS", "CvM", "both")


@dataclass
class SetarTestConfig:
    """Configuration of :func:`run_setar_test`.

    statistic
        ``"KS"`` (``T_n1``), ``"CvM"`` (``T_n2``) or ``"both"``.
    weights
        ``None`` for the empirical law of the lagged values (pivotal limit),
        or a pair ``(grid, weights)`` approximating ``int T_n^2 w dz`` by
        ``sum_k T_n(grid_k)^2 weights_k``; the limit is then not pivotal.
    ks_source
        ``"series"`` (Kolmogorov series) or ``"table"`` (``ks_table``).
    """

    statistic: str = "both"
    level: float = 0.05
    weights: Optional[tuple] = None
    ks_source: str = "series"
    ks_table: Optional[QuantileTable] = None
    cvm_table: Optional[QuantileTable] = None
    seed: object = None

    def __post_init__(self):
        if self.statistic not in _STATISTICS:
            raise ValueError(f"statistic must be one of {_STATISTICS}")
        if not 0 < self.level < 1:
            raise ValueError("level must lie in (0, 1)")
        if self.ks_source not in ("series", "table"):
            raise ValueError("ks_source must be 'series' or 'table'")
        if self.ks_source == "table" and self.statistic != "CvM" and self.ks_table is None:
            raise ValueError("ks_source='table' needs ks_table")

    def to_dict(self):
        return {
            "statistic": self.statistic,
            "level": self.level,
            "weighting": "empirical" if self.weights is None else "user-grid",
            "ks_source": self.ks_source,
            "ks_table": None if self.ks_table is None else self.ks_table.to_dict(),
            "cvm_table": None if self.cvm_table is None else self.cvm_table.to_dict(),
        }


def run_setar_test(series, config: SetarTestConfig = None) -> TestReport:
    config = config or SetarTestConfig()
    series = _as_series(series)
    n = series.n
    if n < MIN_N:
        raise ValueError(f"the threshold test needs n >= {MIN_N}, got {n}")
    want_ks = config.statistic in ("KS", "both")
    want_cvm = config.statistic in ("CvM", "both")
    if want_cvm and config.cvm_table is None:
        raise ValueError("the CvM statistic needs a Monte Carlo quantile table (cvm_table)")
    s2 = sigma2_hat(series)
    cum = _Cumulative(series)
    grid = jump_grid(series.lagged)
    t_grid = cum.at(grid)

    stats, crit, pvals, notes = {}, {}, {}, []
    j = int(np.argmax(np.abs(t_grid)))
    locator = {"argmax_z": float(grid[j]), "T_n_at_argmax": float(t_grid[j])}

    if want_ks:
        t1 = float(np.abs(t_grid).max() / math.sqrt(s2))
        stats["T_n1"] = t1
        if config.ks_source == "series":
            crit["T_n1"] = ks_quantile(1 - config.level)
            pvals["T_n1"] = 1.0 - ks_cdf(t1)
        else:
            crit["T_n1"] = config.ks_table.quantile(1 - config.level)
            pvals["T_n1"] = config.ks_table.pvalue(t1)
    if want_cvm:
        if config.weights is None:
            t2 = float(np.mean(cum.at(series.lagged) ** 2) / s2)
        else:
            wg, ww = (np.asarray(v, dtype=float) for v in config.weights)
            if wg.shape != ww.shape:
                raise ValueError("weight grid and weights must have equal length")
            t2 = float(np.sum(cum.at(wg) ** 2 * ww) / s2)
            msg = "user weighting: the CvM limit is not pivotal, p-value is approximate"
            notes.append(msg)
            warnings.warn(msg, stacklevel=2)
        stats["T_n2"] = t2
        crit["T_n2"] = config.cvm_table.quantile(1 - config.level)
        pvals["T_n2"] = config.cvm_table.pvalue(t2)

    return TestReport(
        test="setar-threshold",
        statistics=stats,
        critical_values=crit,
        p_values=pvals,
        n=n,
        level=config.level,
        sigma2=s2,
        locator=locator,
        seed=config.seed,
        config=config.to_dict(),
        warnings=notes,
        diagnostics={"grid_size": int(grid.size), "centering": "empirical"},
    )
