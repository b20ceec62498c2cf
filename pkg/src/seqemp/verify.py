"""Monte Carlo checks of the moment bound and of asymptotic equicontinuity.

* :func:`moment_scaling` -- ``(E|n^{-1/2} sum Z_i|^Q)^{1/Q}`` against
  ``max(n^{-1/2}, tau)`` over a range of ``n``.
* :func:`equicontinuity_modulus` -- ``(E sup_{d(phi, psi) < delta}
  |G_n(1, phi) - G_n(1, psi)|^Q)^{1/Q}`` for the indicator family.
* :func:`fidi_check` -- covariance of ``(T_n(z1), T_n(z2))`` against the
  Brownian-bridge-type limit.
* :func:`condition_agreement` -- closed-form versus numeric verdicts of the
  mixing and entropy conditions on a grid of configurations.
"""

from __future__ import annotations

import math
from functools import partial
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from ._rng import Seed, make_rng, seed_path
from .empproc import Indicator, d_metric
from .entropy import EntropyBudget, check_A1, check_A2_integral
from .laws import Law
from .limits import _map_chunks
from .seriesgen import Innovation, MixingSpec, _mds_from_eta, gen_setar
from .setar_test import t_at

__all__ = [
    "condition_agreement",
    "equicontinuity_modulus",
    "fidi_check",
    "moment_scaling",
    "population_cdf",
]

MOMENT_GENERATORS = ("zero", "iid-gaussian", "mds")


def _slope(n_list, ratios) -> float:
    r = np.asarray(ratios, dtype=float)
    if np.any(r <= 0):
        return 0.0 if np.all(r == 0) else math.nan
    return float(np.polyfit(np.log(n_list), np.log(r), 1)[0])


# ---------------------------------------------------------------------------
# moment inequality
# ---------------------------------------------------------------------------


def _moment_chunk(gen, Q, tau, n, count, seed, k, c):
    if gen == "zero":
        return np.zeros(count)
    rng = make_rng(seed, k, c)
    if gen == "iid-gaussian":
        z = rng.standard_normal((count, n))
    else:
        z = _mds_from_eta(rng.standard_normal((count, n + 1)))
    s = tau * z.sum(axis=1) / math.sqrt(n)
    return np.abs(s) ** Q


def moment_scaling(
    gen: str,
    Q: int,
    tau: float = 1.0,
    n_list: Sequence[int] = (64, 256, 1024, 4096),
    reps: int = 5000,
    seed: Seed = 0,
    *,
    workers: int = 1,
    chunk: int = 500,
) -> dict:
    """Monte Carlo ``M(n) = (E|n^{-1/2} sum Z_i|^Q)^{1/Q}`` and its ratio to ``max(n^{-1/2}, tau)``.

    Parameters
    ----------
    gen
        ``"zero"``, ``"iid-gaussian"`` (i.i.d. ``N(0, tau^2)``) or ``"mds"``
        (the one-dependent martingale difference sequence scaled by ``tau``).
    Q
        Even moment order.
    tau
        Scale of the summands (their standard deviation).
    """
    if gen not in MOMENT_GENERATORS:
        raise ValueError(f"unknown generator {gen!r}; expected one of {MOMENT_GENERATORS}")
    if isinstance(Q, bool) or int(Q) != Q or Q < 2 or Q % 2:
        raise ValueError(f"Q must be an even integer >= 2, got {Q!r}")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if reps < 1:
        raise ValueError("reps must be positive")
    n_list = [int(n) for n in n_list]
    if len(n_list) < 2 or min(n_list) < 1:
        raise ValueError("n_list needs at least two positive sizes")
    M, se = [], []
    for k, n in enumerate(n_list):
        sizes = [chunk] * (reps // chunk) + ([reps % chunk] if reps % chunk else [])
        args = [(gen, Q, tau, n, m, seed, k, c) for c, m in enumerate(sizes)]
        v = np.concatenate(_map_chunks(_moment_chunk, args, workers))
        if not np.all(np.isfinite(v)):
            raise FloatingPointError(f"non-finite moment estimate at n={n}")
        m = float(v.mean())
        M.append(m ** (1.0 / Q))
        sd = float(v.std(ddof=1)) / math.sqrt(reps) if reps > 1 else math.nan
        se.append(sd / Q * m ** (1.0 / Q - 1.0) if m > 0 else 0.0)
    bound = [max(n ** -0.5, tau) for n in n_list]
    ratios = [m / b for m, b in zip(M, bound)]
    return {
        "generator": gen,
        "Q": Q,
        "tau": tau,
        "n": n_list,
        "reps": reps,
        "seed": list(seed_path(seed)),
        "M": M,
        "M_se": se,
        "ratio": ratios,
        "log_log_slope": _slope(n_list, ratios),
    }


# ---------------------------------------------------------------------------
# equicontinuity modulus
# ---------------------------------------------------------------------------


class _RangeMax:
    """Sparse table for O(1) range-maximum queries on a fixed array."""

    def __init__(self, a: np.ndarray):
        self.levels = [a]
        k = 1
        while 2 * k <= a.size:
            prev = self.levels[-1]
            self.levels.append(np.maximum(prev[:-k], prev[k:]))
            k *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        """Maxima over inclusive index ranges ``[lo, hi]`` (requires ``lo <= hi``)."""
        length = hi - lo + 1
        k = np.floor(np.log2(length)).astype(int)
        out = np.empty(lo.size)
        for lev in np.unique(k):
            sel = k == lev
            t = self.levels[lev]
            out[sel] = np.maximum(t[lo[sel]], t[hi[sel] - (1 << lev) + 1])
        return out


def _continuum_sup(u: np.ndarray, r: float) -> float:
    """``sup |#{u in (a, b]} - n (b - a)|`` over ``0 <= a <= b <= 1`` with ``b - a < r``.

    ``u`` must be sorted.  Returns the count-scale value (not divided by
    ``sqrt(n)``).  Exact up to floating point: optimal intervals have their
    ends at data points, at ``0``/``1``, or at distance ``r`` from the other end.
    """
    n = u.size
    idx = np.arange(n)
    # positive excess: (a, b] = (u_i - 0, u_j], count j - i + 1
    J = np.searchsorted(u, u + r, side="left") - 1
    pos = _RangeMax(idx - n * u).query(idx, J) - idx + 1 + n * u
    best = float(pos.max())
    # negative excess between neighbours in v = (0, u, 1): open (v_i, v_j), count j - i - 1
    v = np.concatenate([[0.0], u, [1.0]])
    iv = np.arange(n + 2)
    J = np.searchsorted(v, v + r, side="left") - 1
    ok = J > iv
    if np.any(ok):
        lo = iv[ok] + 1
        neg = _RangeMax(n * v - iv).query(lo, J[ok]) + iv[ok] + 1 - n * v[ok]
        best = max(best, float(neg.max()))
    # negative excess over windows of the maximal length
    L = min(r, 1.0)
    a = np.concatenate([v, v - L])
    a = a[(a >= 0) & (a <= 1 - L)]
    count = np.searchsorted(u, a + L, side="left") - np.searchsorted(u, a, side="right")
    best = max(best, float((n * L - count).max()))
    return max(best, 0.0)


def _grid_sup(y: np.ndarray, z: np.ndarray, F: np.ndarray, pairs: np.ndarray) -> float:
    if pairs.size == 0:
        return 0.0
    n = y.size
    cnt = np.searchsorted(np.sort(y), z, side="right") - n * F
    return float(np.abs(cnt[pairs[:, 0]] - cnt[pairs[:, 1]]).max())


def _modulus_chunk(law, radii, z, F, pair_sets, n, count, seed, k, c):
    rng = make_rng(seed, k, c)
    out = np.empty((count, len(radii)))
    for b in range(count):
        y = law.sample(n, rng)
        if z is None:
            u = np.sort(law.cdf(y))
            out[b] = [_continuum_sup(u, r) for r in radii]
        else:
            out[b] = [_grid_sup(y, z, F, p) for p in pair_sets]
    return out / math.sqrt(n)


def equicontinuity_modulus(
    law: Law,
    Q: int,
    gamma: float,
    delta_list: Sequence[float],
    n_list: Sequence[int],
    reps: int = 500,
    seed: Seed = 0,
    *,
    z_grid=None,
    workers: int = 1,
    chunk: int = 50,
) -> dict:
    """Monte Carlo modulus ``M(delta, n)`` of the indicator family ``{I{. <= z}}``.

    Under a continuous law ``d(I{. <= z}, I{. <= z'}) = |F(z) - F(z')|^{1/p}``
    with ``p = Q (2 + gamma) / 2``.  Without ``z_grid`` the supremum runs over
    all thresholds (``"exact"`` resolution); with a finite ``z_grid`` it runs
    over grid pairs, and an empty pair set contributes 0 and is flagged.
    """
    if isinstance(Q, bool) or int(Q) != Q or Q < 2 or Q % 2:
        raise ValueError(f"Q must be an even integer >= 2, got {Q!r}")
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    deltas = [float(x) for x in delta_list]
    if not deltas or any(x <= 0 for x in deltas):
        raise ValueError("delta_list must hold positive values")
    if any(a <= b for a, b in zip(deltas, deltas[1:])):
        raise ValueError("delta_list must be strictly decreasing")
    n_list = [int(n) for n in n_list]
    if not n_list or min(n_list) < 1 or reps < 1:
        raise ValueError("n_list and reps must be positive")
    p = Q * (2.0 + gamma) / 2.0
    radii = [x**p for x in deltas]

    if z_grid is None:
        z, F, pair_sets, resolution = None, None, None, "exact"
        empty = [False] * len(deltas)
    else:
        z = np.asarray(z_grid, dtype=float)
        if z.ndim != 1 or z.size < 2 or np.any(np.diff(z) <= 0):
            raise ValueError("z_grid must be a strictly increasing 1-d grid with at least two points")
        F = law.cdf(z)
        ii, jj = np.triu_indices(z.size, 1)
        dist = np.array([d_metric(Indicator(z[i]), Indicator(z[j]), law, Q, gamma) for i, j in zip(ii, jj)])
        pair_sets = [np.column_stack([ii, jj])[dist < x] for x in deltas]
        empty = [ps.shape[0] == 0 for ps in pair_sets]
        resolution = float(dist.min())

    M = np.zeros((len(deltas), len(n_list)))
    se = np.zeros_like(M)
    monotone = True
    for k, n in enumerate(n_list):
        sizes = [chunk] * (reps // chunk) + ([reps % chunk] if reps % chunk else [])
        args = [(law, radii, z, F, pair_sets, n, m, seed, k, c) for c, m in enumerate(sizes)]
        sups = np.vstack(_map_chunks(_modulus_chunk, args, workers))
        monotone &= bool(np.all(np.diff(sups, axis=1) <= 0))
        v = sups**Q
        m = v.mean(axis=0)
        M[:, k] = m ** (1.0 / Q)
        sd = v.std(axis=0, ddof=1) / math.sqrt(reps) if reps > 1 else np.full(len(deltas), np.nan)
        with np.errstate(divide="ignore", invalid="ignore"):
            se[:, k] = np.where(m > 0, sd / Q * m ** (1.0 / Q - 1.0), 0.0)

    first, last = M[-1, 0], M[-1, -1]
    pooled = math.sqrt(se[-1, 0] ** 2 + se[-1, -1] ** 2)
    return {
        "law": law.to_dict(),
        "Q": Q,
        "gamma": gamma,
        "p": p,
        "delta": deltas,
        "n": n_list,
        "reps": reps,
        "seed": list(seed_path(seed)),
        "grid_resolution": resolution,
        "M": M.tolist(),
        "M_se": se.tolist(),
        "empty_pair_set": empty,
        "within_replication_monotone": monotone,
        "strictly_decreasing_in_delta": [bool(np.all(np.diff(M[:, k]) < 0)) for k in range(len(n_list))],
        "trend_smallest_delta": {
            "first_n": float(first),
            "last_n": float(last),
            "pooled_se": pooled,
            "no_growth": bool(last <= first + 3 * pooled),
        },
    }


# ---------------------------------------------------------------------------
# finite-dimensional covariance
# ---------------------------------------------------------------------------


def population_cdf(innovation: Innovation, z) -> np.ndarray:
    """CDF of ``innovation.sigma * eps`` for the i.i.d. catalog innovations."""
    z = np.asarray(z, dtype=float)
    if innovation.kind == "gaussian":
        return stats.norm.cdf(z / innovation.sigma)
    if innovation.kind == "student_t":
        df = innovation.df
        return stats.t.cdf(z / (innovation.sigma * math.sqrt((df - 2.0) / df)), df)
    raise ValueError("population_cdf needs an i.i.d. innovation (gaussian or student_t)")


def _population_ppf(innovation: Innovation, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if innovation.kind == "gaussian":
        return innovation.sigma * stats.norm.ppf(q)
    df = innovation.df
    return innovation.sigma * math.sqrt((df - 2.0) / df) * stats.t.ppf(q, df)


def _fidi_one(n, innovation, z, seed):
    return t_at(gen_setar(n, 0.0, 0.0, 0.0, innovation, seed), z)


def fidi_check(
    innovation: Innovation = Innovation(),
    z_pair: Optional[Sequence[float]] = None,
    n: int = 1000,
    reps: int = 2000,
    seed: Seed = 0,
    *,
    quantiles: Sequence[float] = (0.3, 0.7),
    workers: int = 1,
) -> dict:
    """Monte Carlo covariance of ``(T_n(z1), T_n(z2))`` under i.i.d. null data.

    The target is ``sigma^2 (F(z_i ^ z_j) - F(z_i) F(z_j))``.  ``z_pair``
    defaults to the population ``quantiles`` of ``Y``.
    """
    from .montecarlo import replicate

    if innovation.kind not in ("gaussian", "student_t"):
        raise ValueError("fidi_check needs an i.i.d. innovation (gaussian or student_t)")
    if z_pair is None:
        z = _population_ppf(innovation, quantiles)
    else:
        z = np.asarray(z_pair, dtype=float)
    if z.shape != (2,):
        raise ValueError("z_pair must hold exactly two thresholds")
    T = np.array(replicate(partial(_fidi_one, n, innovation, z), reps, seed, workers=workers, block=100))
    F = population_cdf(innovation, z)
    s2 = innovation.sigma**2
    target = s2 * (np.minimum.outer(F, F) - np.outer(F, F))
    Tc = T - T.mean(axis=0)
    cov = Tc.T @ Tc / (reps - 1)
    prods = Tc[:, :, None] * Tc[:, None, :]
    se = prods.std(axis=0, ddof=1) / math.sqrt(reps)
    dev = np.abs(cov - target)
    with np.errstate(divide="ignore", invalid="ignore"):
        zscore = np.where(se > 0, dev / se, np.where(dev > 0, np.inf, 0.0))
    return {
        "innovation": innovation.to_dict(),
        "z": z.tolist(),
        "F": F.tolist(),
        "n": n,
        "reps": reps,
        "seed": list(seed_path(seed)),
        "covariance": cov.tolist(),
        "target": target.tolist(),
        "mc_se": se.tolist(),
        "deviation": dev.tolist(),
        "max_abs_deviation": float(dev.max()),
        "cross_deviation_in_se": float(zscore[0, 1]),
        "max_deviation_in_se": float(zscore.max()),
    }


# ---------------------------------------------------------------------------
# closed-form versus numeric condition verdicts
# ---------------------------------------------------------------------------


def default_condition_grid() -> list[dict]:
    """Twenty configurations straddling the boundaries of both conditions.

    Ten polynomial-mixing cases with ``beta`` on either side of
    ``(Q - 1)(2 / gamma + 1)`` and ten entropy cases with ``Q`` on either
    side of ``d (gamma / 2 + 1)``.
    """
    grid = []
    for Q, gamma, factor in [(2, 2.0, 0.6), (2, 2.0, 1.6), (4, 2.0, 0.7), (4, 2.0, 1.4), (4, 1.0, 0.8),
                             (4, 1.0, 1.3), (6, 4.0, 0.75), (6, 4.0, 1.25), (2, 0.5, 0.5), (2, 0.5, 2.0)]:
        beta = factor * (Q - 1) * (2.0 / gamma + 1.0)
        grid.append({"condition": "A1", "Q": Q, "gamma": gamma, "beta": beta})
    for Q, gamma, d in [(2, 2.0, 1.0), (4, 2.0, 1.0), (4, 2.0, 2.0), (6, 2.0, 2.0), (6, 2.0, 3.5),
                        (8, 2.0, 3.0), (4, 1.0, 3.0), (6, 1.0, 3.0), (8, 6.0, 2.5), (2, 6.0, 0.25)]:
        grid.append({"condition": "A2", "Q": Q, "gamma": gamma, "d": d})
    return grid


def condition_agreement(grid: Optional[list] = None, truncation: int = 100_000) -> list[dict]:
    """Closed-form and numeric verdicts for each configuration of ``grid``."""
    grid = default_condition_grid() if grid is None else grid
    out = []
    for cfg in grid:
        if cfg["condition"] == "A1":
            budget = EntropyBudget(cfg["Q"], cfg["gamma"], mixing=MixingSpec("polynomial", C=1.0, beta=cfg["beta"]))
            rep = check_A1(budget, truncation)
        elif cfg["condition"] == "A2":
            rep = check_A2_integral(EntropyBudget(cfg["Q"], cfg["gamma"], bracket_exponent=cfg["d"]))
        else:
            raise ValueError(f"unknown condition {cfg['condition']!r}")
        numeric = rep.diagnostics["numeric_pass"]
        out.append({**cfg, "closed_form_pass": rep.passed, "numeric_pass": numeric, "agree": rep.passed == numeric,
                    "value": rep.to_dict()["value"]})
    return out
