"""Sequential empirical process over threshold-indexed function families.

For data ``X_1, ..., X_n`` and a member ``phi`` of a family,

    G_n(s, phi) = n^{-1/2} * sum_{i <= floor(n s)} (phi(X_i) - E[phi(X_i)]).

Also provides the L2 semi-norm ``rho`` and the semi-metric
``d(phi, psi) = E|phi - psi|^p ^ (1/p)`` with ``p = Q (2 + gamma) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .laws import Law
from .seriesgen import RegressionSample, UnivariateSeries

__all__ = [
    "Constant",
    "Identity",
    "Indicator",
    "Interval",
    "ProcessPath",
    "ThresholdFamily",
    "d_metric",
    "eval_process",
    "floor_ns",
    "jump_grid",
    "rho_norm",
]


def floor_ns(n: int, s) -> np.ndarray:
    """``floor(n * s)`` robust to representation error in grids like ``i / n``."""
    return np.floor(np.round(n * np.asarray(s, dtype=float), 9)).astype(np.int64)


def jump_grid(values) -> np.ndarray:
    """Sorted distinct values plus one sentinel beyond each extreme.

    Any statistic that is a step function of ``z`` with jumps at ``values``
    attains its supremum over ``R`` on this grid.
    """
    u = np.unique(np.asarray(values, dtype=float))
    pad = max(1.0, float(u[-1] - u[0]))
    return np.concatenate([[u[0] - pad], u, [u[-1] + pad]])


# ---------------------------------------------------------------------------
# single family members (used for rho, d and brackets)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Indicator:
    """``y -> I{y <= z}``; ``z = inf`` is the constant 1."""

    z: float

    def __call__(self, y):
        return (np.asarray(y, dtype=float) <= self.z).astype(float)

    def abs_moment(self, law: Law, p: float) -> float:
        return float(law.cdf(self.z))


@dataclass(frozen=True)
class Interval:
    """``y -> I{lo < y <= hi}``."""

    lo: float
    hi: float

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return ((y > self.lo) & (y <= self.hi)).astype(float)

    def abs_moment(self, law: Law, p: float) -> float:
        if self.hi <= self.lo:
            return 0.0
        return float(law.cdf(self.hi) - law.cdf(self.lo))


@dataclass(frozen=True)
class Constant:
    c: float

    def __call__(self, y):
        return np.full(np.shape(y), float(self.c))

    def abs_moment(self, law: Law, p: float) -> float:
        return abs(self.c) ** p


@dataclass(frozen=True)
class Identity:
    def __call__(self, y):
        return np.asarray(y, dtype=float)

    def abs_moment(self, law: Law, p: float) -> float:
        return law.abs_moment(p)


class _Difference:
    def __init__(self, phi, psi):
        self.phi, self.psi = phi, psi

    def __call__(self, y):
        return self.phi(y) - self.psi(y)


def _difference(phi, psi):
    if isinstance(phi, Indicator) and isinstance(psi, Indicator):
        lo, hi = sorted((phi.z, psi.z))
        return Interval(lo, hi)
    if isinstance(phi, Constant) and isinstance(psi, Constant):
        return Constant(phi.c - psi.c)
    return _Difference(phi, psi)


def _abs_moment(phi, law, p: float) -> float:
    if isinstance(law, Law):
        if hasattr(phi, "abs_moment"):
            val = phi.abs_moment(law, p)
        else:
            val = law.expect(lambda y: abs(float(phi(np.array([y]))[0])) ** p)
    else:
        sample = np.asarray(law, dtype=float)
        if sample.size == 0:
            raise ValueError("empty sample")
        with np.errstate(over="ignore", invalid="ignore"):
            val = float(np.mean(np.abs(phi(sample)) ** p))
    if not np.isfinite(val):
        raise ValueError(f"moment of order {p} is not finite under the supplied law")
    return val


def rho_norm(phi, law: Union[Law, np.ndarray]) -> float:
    """``E[phi(Y)^2]^{1/2}``: analytic under a catalog :class:`Law`, plug-in for a sample."""
    return float(np.sqrt(_abs_moment(phi, law, 2.0)))


def _check_q_gamma(Q, gamma):
    if isinstance(Q, bool) or int(Q) != Q or Q < 2 or Q % 2:
        raise ValueError(f"Q must be an even integer >= 2, got {Q!r}")
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")


def d_metric(phi, psi, law: Union[Law, np.ndarray], Q: int, gamma: float) -> float:
    """Semi-metric ``E|phi - psi|^p ^ (1/p)`` with ``p = Q (2 + gamma) / 2``."""
    _check_q_gamma(Q, gamma)
    if phi == psi:
        return 0.0
    p = Q * (2.0 + gamma) / 2.0
    m = _abs_moment(_difference(phi, psi), law, p)
    return float(m ** (1.0 / p))


# ---------------------------------------------------------------------------
# families and process paths
# ---------------------------------------------------------------------------

_FAMILY_KINDS = ("indicator", "residual-indicator", "response-indicator")


@dataclass
class ThresholdFamily:
    """A finite threshold-indexed family ``{phi_z : z in z_grid}``.

    kind
        ``indicator``: ``y -> I{y <= z}`` on 1-d data.
        ``residual-indicator``: ``(e, y) -> e (I{y <= z} - F(z))``; ``cdf`` is a
        table of ``F`` over ``z_grid`` or ``None`` for the empirical CDF of ``y``.
        ``response-indicator``: ``(y, x) -> y I{x <= z}`` with componentwise order.
    centering
        ``"empirical"`` (sample means) or a table of ``E[phi_z]`` over ``z_grid``.
    """

    kind: str
    z_grid: np.ndarray
    centering: Union[str, np.ndarray] = "empirical"
    cdf: Union[None, np.ndarray] = None

    def __post_init__(self):
        if self.kind not in _FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}; expected one of {_FAMILY_KINDS}")
        z = np.asarray(self.z_grid, dtype=float)
        if z.size == 0:
            raise ValueError("empty z grid")
        if z.ndim == 1:
            if np.any(np.diff(z) <= 0):
                raise ValueError("z grid must be strictly increasing")
        elif z.ndim == 2:
            if self.kind != "response-indicator":
                raise ValueError(f"{self.kind} family needs a 1-d z grid")
            keys = [tuple(row) for row in z]
            if any(a >= b for a, b in zip(keys, keys[1:])):
                raise ValueError("multivariate z grid must be strictly increasing in lexicographic order")
        else:
            raise ValueError("z grid must be 1-d or 2-d")
        self.z_grid = z
        if not isinstance(self.centering, str):
            c = np.asarray(self.centering, dtype=float)
            if c.shape != (z.shape[0],):
                raise ValueError(
                    f"centering table has {c.size} entries but the z grid has {z.shape[0]} points"
                )
            self.centering = c
        elif self.centering != "empirical":
            raise ValueError("centering must be 'empirical' or a table over the z grid")
        if self.cdf is not None:
            self.cdf = np.asarray(self.cdf, dtype=float)
            if self.cdf.shape != (z.shape[0],):
                raise ValueError("cdf table must cover the z grid")

    @property
    def size(self) -> int:
        return self.z_grid.shape[0]

    @property
    def centering_label(self) -> str:
        return "empirical" if isinstance(self.centering, str) else "exact"

    def evaluate(self, data) -> np.ndarray:
        """Matrix ``phi_{z_j}(X_i)`` of shape ``(n, |z_grid|)``."""
        z = self.z_grid
        if self.kind == "indicator":
            y = _as_1d(data)
            return (y[:, None] <= z[None, :]).astype(float)
        if self.kind == "residual-indicator":
            e, y = data
            e, y = np.asarray(e, dtype=float), np.asarray(y, dtype=float)
            ind = (y[:, None] <= z[None, :]).astype(float)
            F = ind.mean(axis=0) if self.cdf is None else self.cdf
            return e[:, None] * (ind - F[None, :])
        y, x = _response_and_regressors(data)
        zz = z[:, None] if z.ndim == 1 else z
        if zz.shape[1] != x.shape[1]:
            raise ValueError(f"z grid has dimension {zz.shape[1]} but regressors have {x.shape[1]}")
        ind = np.all(x[:, None, :] <= zz[None, :, :], axis=2)
        return y[:, None] * ind


def _as_1d(data):
    if isinstance(data, UnivariateSeries):
        return data.values
    y = np.asarray(data, dtype=float)
    if y.ndim != 1:
        raise ValueError("indicator family needs 1-d data")
    return y


def _response_and_regressors(data):
    if isinstance(data, RegressionSample):
        return data.responses, data.regressors
    y, x = data
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return y, x


@dataclass
class ProcessPath:
    """Values ``G(s_i, phi_{z_j})`` on an ``(s, z)`` grid."""

    s_grid: np.ndarray
    z_grid: np.ndarray
    values: np.ndarray
    n: int
    centering: str = "empirical"

    def __post_init__(self):
        self.s_grid = np.asarray(self.s_grid, dtype=float)
        self.z_grid = np.asarray(self.z_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.s_grid.size, self.z_grid.shape[0]):
            raise ValueError("values must have shape (|s_grid|, |z_grid|)")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("process values must be finite")

    def sup_abs(self):
        """``(max |value|, s at argmax, z at argmax)``."""
        a = np.abs(self.values)
        i, j = np.unravel_index(int(np.argmax(a)), a.shape)
        z = self.z_grid[j]
        return float(a[i, j]), float(self.s_grid[i]), (z.tolist() if np.ndim(z) else float(z))

    def to_csv(self, path) -> None:
        from .io import fmt

        multi = self.z_grid.ndim == 2
        zcols = [f"z{k + 1}" for k in range(self.z_grid.shape[1])] if multi else ["z"]
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(["s"] + zcols + ["value"]) + "\n")
            for i, s in enumerate(self.s_grid):
                for j in range(self.z_grid.shape[0]):
                    zs = [fmt(v) for v in np.atleast_1d(self.z_grid[j])]
                    fh.write(",".join([fmt(s)] + zs + [fmt(self.values[i, j])]) + "\n")


def eval_process(data, family: ThresholdFamily, s_grid) -> ProcessPath:
    """Exact partial-sum evaluation of the sequential empirical process."""
    s = np.asarray(s_grid, dtype=float)
    if s.size == 0:
        raise ValueError("empty s grid")
    if np.any((s < 0) | (s > 1)):
        raise ValueError("s grid must lie in [0, 1]")
    phi = family.evaluate(data)
    n = phi.shape[0]
    if n == 0:
        raise ValueError("empty data")
    center = phi.mean(axis=0) if family.centering_label == "empirical" else family.centering
    csum = np.vstack([np.zeros(phi.shape[1]), np.cumsum(phi - center[None, :], axis=0)])
    vals = csum[floor_ns(n, s)] / np.sqrt(n)
    return ProcessPath(s, family.z_grid, vals, n, family.centering_label)
