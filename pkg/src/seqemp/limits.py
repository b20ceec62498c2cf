"""Limiting Gaussian objects and their quantiles.

* Brownian bridge functionals ``sup |B_0|`` and ``int_0^1 B_0(s)^2 ds``.
* The Kolmogorov distribution by its alternating series.
* The plug-in Kiefer-type process ``Gamma`` on a product ``(s, z)`` grid with
  covariance ``(s1 ^ s2 - s1 s2) (H(z1 ^ z2) - G(z1) G(z2))``.

Monte Carlo work is split into fixed-size chunks; chunk ``c`` draws from the
stream ``(seed, c)``, so results do not depend on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.linalg import lapack

from ._rng import Seed, make_rng, seed_path
from .exceptions import CholeskyError
from .seriesgen import RegressionSample

__all__ = [
    "GaussianLimit",
    "QuantileTable",
    "build_gamma_limit",
    "functional_quantiles",
    "ks_cdf",
    "ks_quantile",
    "sample_sup",
    "simulate_bridge",
]

KS_TOL = 1e-12
FUNCTIONALS = ("KS-sup", "CvM-integral", "custom-sup")
_ALIASES = {"ks": "KS-sup", "cvm": "CvM-integral", "sup": "custom-sup"}
JITTERS = (1e-12, 1e-11, 1e-10, 1e-9, 1e-8)


def _tag(functional: str) -> str:
    tag = _ALIASES.get(functional.lower(), functional) if isinstance(functional, str) else functional
    if tag not in FUNCTIONALS:
        raise ValueError(f"unknown functional {functional!r}; expected one of {FUNCTIONALS}")
    return tag


# ---------------------------------------------------------------------------
# Brownian bridge
# ---------------------------------------------------------------------------


def _bridges(resolution: int, count: int, rng: np.random.Generator) -> np.ndarray:
    dw = rng.standard_normal((count, resolution)) * math.sqrt(1.0 / resolution)
    w = np.zeros((count, resolution + 1))
    np.cumsum(dw, axis=1, out=w[:, 1:])
    s = np.arange(resolution + 1) / resolution
    b = w - s[None, :] * w[:, -1:]
    b[:, 0] = 0.0
    b[:, -1] = 0.0
    return b


def simulate_bridge(resolution: int, seed: Seed, n_paths: Optional[int] = None) -> np.ndarray:
    """Brownian bridge on ``{k / resolution}`` as ``W(s) - s W(1)``.

    Returns shape ``(resolution + 1,)``, or ``(n_paths, resolution + 1)``
    when ``n_paths`` is given.
    """
    if isinstance(resolution, bool) or int(resolution) != resolution or resolution < 2:
        raise ValueError("resolution must be an integer >= 2")
    b = _bridges(int(resolution), 1 if n_paths is None else int(n_paths), make_rng(seed))
    return b[0] if n_paths is None else b


def _functional_values(tag: str, b: np.ndarray) -> np.ndarray:
    if tag == "KS-sup":
        return np.abs(b).max(axis=1)
    res = b.shape[1] - 1
    sq = b**2
    return (sq[:, 1:] + sq[:, :-1]).sum(axis=1) / (2.0 * res)


# ---------------------------------------------------------------------------
# Kolmogorov distribution
# ---------------------------------------------------------------------------


def _ks_series(x: float) -> tuple[float, float]:
    """Series value and the first omitted term."""
    total = 0.0
    k = 1
    while True:
        term = math.exp(-2.0 * k * k * x * x)
        if term < KS_TOL:
            return 1.0 - 2.0 * total, term
        total += term if k % 2 else -term
        k += 1


def ks_cdf(x: float) -> float:
    """``P(sup |B_0| <= x) = 1 - 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 x^2)``."""
    if not x > 0:
        return 0.0
    v, _ = _ks_series(float(x))
    return min(1.0, max(0.0, v))


def ks_quantile(p: float) -> float:
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    return float(optimize.brentq(lambda x: ks_cdf(x) - p, 0.05, 10.0, xtol=1e-14))


# ---------------------------------------------------------------------------
# quantile tables
# ---------------------------------------------------------------------------


@dataclass
class QuantileTable:
    """Monte Carlo quantiles of a limit functional.

    ``sample`` (sorted simulated values) is kept in memory for p-values and
    standard errors but is not serialized.
    """

    functional: str
    levels: np.ndarray
    quantiles: np.ndarray
    reps: int
    resolution: int
    seed: tuple
    sample: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        self.levels = np.asarray(self.levels, dtype=float)
        self.quantiles = np.asarray(self.quantiles, dtype=float)
        if np.any(np.diff(self.quantiles) < 0):
            raise ValueError("quantiles must be nondecreasing in level")

    def quantile(self, level: float) -> float:
        if self.sample is not None:
            return float(np.quantile(self.sample, level))
        return float(np.interp(level, self.levels, self.quantiles))

    def pvalue(self, stat: float) -> float:
        """``P(functional >= stat)`` under the simulated law."""
        if self.sample is not None:
            k = np.searchsorted(self.sample, stat, side="left")
            return float((self.sample.size - k) / self.sample.size)
        if stat <= self.quantiles[0]:
            return float(1.0 - self.levels[0]) if stat == self.quantiles[0] else 1.0
        if stat > self.quantiles[-1]:
            return float(1.0 - self.levels[-1])
        return float(1.0 - np.interp(stat, self.quantiles, self.levels))

    def standard_errors(self) -> np.ndarray:
        """Order-statistic standard errors of the quantiles (needs ``sample``)."""
        if self.sample is None:
            raise ValueError("standard errors need the simulated sample")
        R = self.sample.size
        half = np.sqrt(self.levels * (1 - self.levels) / R)
        lo = np.quantile(self.sample, np.clip(self.levels - half, 0, 1))
        hi = np.quantile(self.sample, np.clip(self.levels + half, 0, 1))
        return (hi - lo) / 2.0

    def to_dict(self):
        return {
            "functional": self.functional,
            "levels": [float(v) for v in self.levels],
            "quantiles": [float(v) for v in self.quantiles],
            "reps": int(self.reps),
            "resolution": int(self.resolution),
            "seed": list(self.seed),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["functional"], d["levels"], d["quantiles"], d["reps"], d["resolution"], tuple(d["seed"]))


def _chunk_sizes(reps: int, chunk: int) -> list[int]:
    full, rest = divmod(reps, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _map_chunks(fn, args: list, workers: int) -> list:
    if workers <= 1 or len(args) <= 1:
        return [fn(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, *zip(*args)))


def _bridge_chunk(tag, resolution, count, seed, c):
    return _functional_values(tag, _bridges(resolution, count, make_rng(seed, c)))


DEFAULT_LEVELS = tuple(np.round(np.arange(0.01, 1.0, 0.01), 2)) + (0.995, 0.999)


def functional_quantiles(
    functional: str,
    levels: Sequence[float] = (0.90, 0.95, 0.99),
    resolution: int = 1024,
    reps: int = 100_000,
    seed: Seed = 0,
    *,
    workers: int = 1,
    chunk: int = 2000,
) -> QuantileTable:
    """Monte Carlo quantiles of ``sup |B_0|`` (``"ks"``) or ``int B_0^2`` (``"cvm"``)."""
    tag = _tag(functional)
    if tag == "custom-sup":
        raise ValueError("custom-sup tables come from sample_sup")
    if reps < 1000:
        raise ValueError("reps must be at least 1000")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    levels = np.asarray(levels, dtype=float)
    if np.any((levels <= 0) | (levels >= 1)):
        raise ValueError("levels must lie in (0, 1)")
    args = [(tag, resolution, m, seed, c) for c, m in enumerate(_chunk_sizes(reps, chunk))]
    vals = np.sort(np.concatenate(_map_chunks(_bridge_chunk, args, workers)))
    return QuantileTable(tag, levels, np.quantile(vals, levels), reps, resolution, seed_path(seed), vals)


# ---------------------------------------------------------------------------
# plug-in Gaussian limit on a product grid
# ---------------------------------------------------------------------------


def _jittered_cholesky(cov: np.ndarray) -> tuple[np.ndarray, float]:
    if not np.any(cov):
        return np.zeros_like(cov), 0.0
    scale = float(np.max(np.diag(cov)))
    info = 0
    for j in JITTERS:
        c, info = lapack.dpotrf(cov + j * scale * np.eye(cov.shape[0]), lower=1, clean=1)
        if info == 0:
            return c, j * scale
    raise CholeskyError(
        f"covariance not positive definite even with jitter {JITTERS[-1]:g} (leading minor {info})", info
    )


@dataclass
class GaussianLimit:
    """Centered Gaussian field on ``s_grid x z_grid`` with covariance ``K_s (x) K_z``.

    ``factor`` is the lower-triangular Kronecker product of the two jittered
    Cholesky factors; ``jitter`` records the diagonal loads actually used.
    """

    s_grid: np.ndarray
    z_grid: np.ndarray
    time_cov: np.ndarray
    threshold_cov: np.ndarray
    time_factor: np.ndarray = None
    threshold_factor: np.ndarray = None
    jitter: tuple = (0.0, 0.0)

    def __post_init__(self):
        for name in ("time_cov", "threshold_cov"):
            m = np.asarray(getattr(self, name), dtype=float)
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise ValueError(f"{name} must be square")
            if np.max(np.abs(m - m.T), initial=0.0) > 1e-12:
                raise ValueError(f"{name} must be symmetric")
            if np.any(np.diag(m) < 0):
                raise ValueError(f"{name} has a negative diagonal entry")
            setattr(self, name, m)
        if self.time_factor is None:
            self.time_factor, js = _jittered_cholesky(self.time_cov)
            self.threshold_factor, jz = _jittered_cholesky(self.threshold_cov)
            self.jitter = (js, jz)

    @classmethod
    def from_covariance(cls, cov) -> "GaussianLimit":
        cov = np.atleast_2d(np.asarray(cov, dtype=float))
        return cls(np.array([1.0]), np.arange(cov.shape[0], dtype=float), np.ones((1, 1)), cov)

    @property
    def shape(self) -> tuple[int, int]:
        return self.time_cov.shape[0], self.threshold_cov.shape[0]

    @property
    def covariance(self) -> np.ndarray:
        return np.kron(self.time_cov, self.threshold_cov)

    @property
    def factor(self) -> np.ndarray:
        return np.kron(self.time_factor, self.threshold_factor)

    def draw(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """``count`` fields of shape ``(|s_grid|, |z_grid|)``."""
        ns, nz = self.shape
        z = rng.standard_normal((count, ns, nz))
        return self.time_factor @ z @ self.threshold_factor.T


def _indicator_matrix(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    zz = z[:, None] if z.ndim == 1 else z
    return np.all(x[:, None, :] <= zz[None, :, :], axis=2).astype(float)


def build_gamma_limit(sample: RegressionSample, s_grid, z_grid) -> GaussianLimit:
    """Plug-in covariance of the changepoint limit on ``s_grid x z_grid``.

    ``H(z) = mean(Y^2 I{X <= z})`` estimates ``H1 + H2`` and
    ``G(z) = mean(Y I{X <= z})`` estimates ``G1``; since
    ``I{x <= z1 ^ z2} = I{x <= z1} I{x <= z2}`` the threshold part is
    ``A' diag(Y^2) A / n - G G'`` with ``A`` the indicator matrix.
    """
    s = np.asarray(s_grid, dtype=float)
    z = np.asarray(z_grid, dtype=float)
    if s.size == 0 or z.size == 0:
        raise ValueError("empty grid")
    y, x = sample.responses, sample.regressors
    n = y.size
    A = _indicator_matrix(x, z)
    G = (y[:, None] * A).mean(axis=0)
    H = (A * (y**2)[:, None]).T @ A / n
    Kz = H - np.outer(G, G)
    Kz = (Kz + Kz.T) / 2.0
    Ks = np.minimum.outer(s, s) - np.outer(s, s)
    return GaussianLimit(s, z, Ks, Kz)


def _sup_chunk(limit, count, seed, c):
    g = limit.draw(count, make_rng(seed, c))
    return np.abs(g).max(axis=(1, 2))


def sample_sup(
    limit: GaussianLimit,
    reps: int = 10_000,
    seed: Seed = 0,
    levels: Sequence[float] = (0.90, 0.95, 0.99),
    *,
    workers: int = 1,
    chunk: int = 1000,
) -> QuantileTable:
    """Quantiles of ``sup |Gamma|`` over the grid from ``reps`` draws."""
    if reps < 100:
        raise ValueError("reps must be at least 100")
    args = [(limit, m, seed, c) for c, m in enumerate(_chunk_sizes(reps, chunk))]
    vals = np.sort(np.concatenate(_map_chunks(_sup_chunk, args, workers)))
    ns, nz = limit.shape
    return QuantileTable(
        "custom-sup", levels, np.quantile(vals, np.asarray(levels)), reps, ns * nz, seed_path(seed), vals
    )
