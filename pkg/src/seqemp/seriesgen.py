"""Seeded data-generating processes with known mixing behaviour.

The SETAR generator follows

    Y_t = mu1 + eps_t  if Y_{t-1} <= z,
    Y_t = mu2 + eps_t  otherwise,          t = 1, ..., n,

and the regression generator follows ``Y_t = m(X_t) + s(X_t) * eps_t`` with
i.i.d. regressors independent of the innovations.  All generators are pure
functions of their parameters and seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, stats

from ._rng import Seed, make_rng, seed_path

__all__ = [
    "CatalogFunction",
    "Innovation",
    "MixingSpec",
    "RegressionSample",
    "UnivariateSeries",
    "alpha_of",
    "gen_mds_innovations",
    "gen_regression",
    "gen_setar",
    "mds_scale",
]

MIXING_CAP = 0.25


# ---------------------------------------------------------------------------
# data containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class UnivariateSeries:
    """Observations ``Y_0, ..., Y_n``; lagged pairs exist for ``i = 1..n``."""

    values: np.ndarray
    origin: object = "ingested"

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("a series needs at least two values Y_0, Y_1")
        if not np.all(np.isfinite(v)):
            raise ValueError("series values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size - 1

    @property
    def lagged(self) -> np.ndarray:
        return self.values[:-1]

    @property
    def responses(self) -> np.ndarray:
        return self.values[1:]


@dataclass(frozen=True, eq=False)
class RegressionSample:
    """Pairs ``(Y_t, X_t)``, ``t = 1..n``, with ``X_t`` in ``R^d``."""

    responses: np.ndarray
    regressors: np.ndarray
    origin: object = "ingested"

    def __post_init__(self):
        y = np.asarray(self.responses, dtype=float)
        x = np.asarray(self.regressors, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if y.ndim != 1 or y.size < 1:
            raise ValueError("responses must be a nonempty 1-d sequence")
        if x.ndim != 2 or x.shape[0] != y.size or x.shape[1] < 1:
            raise ValueError(
                f"regressors must have shape (n, d) with n = {y.size}, got {np.shape(self.regressors)}"
            )
        if not (np.all(np.isfinite(y)) and np.all(np.isfinite(x))):
            raise ValueError("responses and regressors must be finite")
        y.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "responses", y)
        object.__setattr__(self, "regressors", x)

    @property
    def n(self) -> int:
        return self.responses.size

    @property
    def d(self) -> int:
        return self.regressors.shape[1]


# ---------------------------------------------------------------------------
# mixing coefficients
# ---------------------------------------------------------------------------

_MIXING_FORMS = ("independent", "m-dependent", "polynomial", "geometric")


@dataclass(frozen=True)
class MixingSpec:
    """Parametric mixing coefficient.

    ``m-dependent`` uses ``m``; ``polynomial`` uses ``C * t**-beta``;
    ``geometric`` uses ``c * rho**t``.  Values are clipped at 1/4, the
    largest value an alpha-mixing coefficient can take for ``t >= 1``.
    """

    form: str = "independent"
    m: int = 0
    C: float = 1.0
    beta: float = 1.0
    c: float = 1.0
    rho: float = 0.5

    def __post_init__(self):
        if self.form not in _MIXING_FORMS:
            raise ValueError(f"unknown mixing form {self.form!r}; expected one of {_MIXING_FORMS}")
        for name in ("C", "beta", "c"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"mixing parameter {name} must be finite and nonnegative")
        if self.m < 0:
            raise ValueError("m must be nonnegative")
        if self.form == "geometric" and not 0 < self.rho < 1:
            raise ValueError("geometric mixing needs rho in (0, 1)")

    def to_dict(self):
        out = {"form": self.form}
        out.update(
            {
                "independent": {},
                "m-dependent": {"m": self.m},
                "polynomial": {"C": self.C, "beta": self.beta},
                "geometric": {"c": self.c, "rho": self.rho},
            }[self.form]
        )
        return out


def alpha_of(spec: MixingSpec, t):
    """Mixing coefficient alpha(t); accepts a scalar or an integer array."""
    tt = np.asarray(t)
    if np.any(tt < 0):
        raise ValueError("t must be nonnegative")
    tf = tt.astype(float)
    if spec.form == "independent":
        out = np.zeros_like(tf)
    elif spec.form == "m-dependent":
        out = np.where(tf > spec.m, 0.0, MIXING_CAP)
    elif spec.form == "polynomial":
        with np.errstate(divide="ignore"):
            out = np.minimum(MIXING_CAP, spec.C * np.power(np.maximum(tf, 1.0), -spec.beta))
    else:
        out = np.minimum(MIXING_CAP, spec.c * np.power(spec.rho, tf))
    out = np.where(tt == 0, 1.0, out)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# innovations
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def mds_scale() -> float:
    """Constant ``a`` with ``E[g(eta)^2] = 1`` for ``g(eta) = a (1 + tanh(eta) / 2)``."""
    m2, _ = integrate.quad(
        lambda x: (1.0 + 0.5 * math.tanh(x)) ** 2 * stats.norm.pdf(x), -np.inf, np.inf, epsabs=1e-13
    )
    return 1.0 / math.sqrt(m2)


def _mds_from_eta(eta: np.ndarray) -> np.ndarray:
    g = mds_scale() * (1.0 + 0.5 * np.tanh(eta[..., :-1]))
    return eta[..., 1:] * g


def gen_mds_innovations(n: int, seed: Seed) -> np.ndarray:
    """One-dependent martingale difference sequence with unit variance.

    ``eps_t = eta_t * g(eta_{t-1})`` for i.i.d. standard gaussian ``eta``, so
    ``E[eps_t | past] = 0`` and ``eps_t`` is independent of ``eps_{t+2}, ...``.
    """
    n = _check_n(n, 2)
    return _mds_from_eta(make_rng(seed).standard_normal(n + 1))


_INNOVATION_KINDS = ("gaussian", "student_t", "mds")


@dataclass(frozen=True)
class Innovation:
    """Innovation descriptor.

    Parameters
    ----------
    kind : {"gaussian", "student_t", "mds"}
        i.i.d. gaussian, i.i.d. Student t rescaled to variance ``sigma**2``,
        or the one-dependent martingale difference sequence of
        :func:`gen_mds_innovations` multiplied by ``sigma``.
    sigma : float
        Standard deviation. ``sigma = 0`` gives the degenerate innovation 0.
    df : float, optional
        Degrees of freedom for ``student_t``; must exceed 2.
    """

    kind: str = "gaussian"
    sigma: float = 1.0
    df: Optional[float] = None

    def __post_init__(self):
        if self.kind not in _INNOVATION_KINDS:
            raise ValueError(f"unknown innovation {self.kind!r}; expected one of {_INNOVATION_KINDS}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise ValueError("innovation sigma must be finite and nonnegative")
        if self.kind == "student_t" and (self.df is None or not self.df > 2):
            raise ValueError("student_t innovations need df > 2 for a finite variance")

    @property
    def iid(self) -> bool:
        return self.kind != "mds"

    def check_moment(self, order: float):
        """Raise if ``E|eps|^order`` is infinite."""
        if self.kind == "student_t" and not self.df > order:
            raise ValueError(
                f"student_t with df={self.df} has no absolute moment of order {order}; need df > {order}"
            )

    def draw(self, size: int, rng: np.random.Generator) -> np.ndarray:
        if self.kind == "gaussian":
            e = rng.standard_normal(size)
        elif self.kind == "student_t":
            e = rng.standard_t(self.df, size) * math.sqrt((self.df - 2.0) / self.df)
        else:
            e = _mds_from_eta(rng.standard_normal(size + 1))
        return self.sigma * e

    def to_dict(self):
        out = {"kind": self.kind, "sigma": self.sigma}
        if self.df is not None:
            out["df"] = self.df
        return out


# ---------------------------------------------------------------------------
# SETAR
# ---------------------------------------------------------------------------


def _check_n(n, least):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < least:
        raise ValueError(f"n must be an integer >= {least}, got {n!r}")
    return int(n)


def _check_finite(**params):
    for name, v in params.items():
        if not np.isfinite(v):
            raise ValueError(f"parameter {name} must be finite, got {v!r}")


def _setar_recursion(eps, y0, mu1, mu2, threshold):
    y = np.empty(eps.size)
    y[0] = y0
    prev = y0
    for t in range(1, eps.size):
        prev = (mu1 if prev <= threshold else mu2) + eps[t]
        y[t] = prev
    return y


def gen_setar(
    n: int,
    mu1: float,
    mu2: float,
    threshold: float,
    innovation: Innovation = Innovation(),
    seed: Seed = 0,
    *,
    burn_in: int = 0,
    y0: Optional[float] = None,
    moment_order: float = 4.0,
) -> UnivariateSeries:
    """Simulate ``Y_0, ..., Y_n`` from the two-regime threshold model.

    ``Y_0 = mu1 + eps_0`` unless ``y0`` is given.  With ``burn_in > 0`` the
    chain is run that many extra steps and the first values are dropped.
    ``moment_order`` is the absolute innovation moment that must exist
    (checked for Student t innovations).
    """
    n = _check_n(n, 2)
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    _check_finite(mu1=mu1, mu2=mu2, threshold=threshold)
    if y0 is not None:
        _check_finite(y0=y0)
    innovation.check_moment(moment_order)

    eps = innovation.draw(n + 1 + burn_in, make_rng(seed))
    start = mu1 + eps[0] if y0 is None else float(y0)
    if mu1 == mu2:
        # regime indicator is irrelevant
        y = mu1 + eps
        y[0] = start
    else:
        y = _setar_recursion(eps, start, mu1, mu2, threshold)
    y = y[burn_in:]
    origin = {
        "generator": "setar",
        "n": n,
        "mu1": mu1,
        "mu2": mu2,
        "threshold": threshold,
        "innovation": innovation.to_dict(),
        "burn_in": burn_in,
        "y0": y0,
        "seed": list(seed_path(seed)),
    }
    return UnivariateSeries(y, origin)


# ---------------------------------------------------------------------------
# regression with optional changepoint
# ---------------------------------------------------------------------------

_FUNCTION_KINDS = ("constant", "linear", "sinusoidal")
_REGRESSOR_LAWS = ("uniform", "gaussian")


@dataclass(frozen=True)
class CatalogFunction:
    """Catalog map ``R^d -> R`` acting on the coordinate sum ``u = x_1 + ... + x_d``.

    constant:   ``level``
    linear:     ``level + slope * u``
    sinusoidal: ``level + amplitude * sin(frequency * u)``
    """

    kind: str = "constant"
    level: float = 0.0
    slope: float = 0.0
    amplitude: float = 0.0
    frequency: float = 1.0

    def __post_init__(self):
        if self.kind not in _FUNCTION_KINDS:
            raise ValueError(f"unknown function {self.kind!r}; expected one of {_FUNCTION_KINDS}")
        _check_finite(level=self.level, slope=self.slope, amplitude=self.amplitude, frequency=self.frequency)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        u = x.sum(axis=1) if x.ndim == 2 else x
        if self.kind == "constant":
            return np.full(u.shape, self.level)
        if self.kind == "linear":
            return self.level + self.slope * u
        return self.level + self.amplitude * np.sin(self.frequency * u)

    def infimum(self, regressor_law: str, d: int) -> float:
        """Infimum over the support of the regressor law."""
        if self.kind == "constant" or (self.kind == "linear" and self.slope == 0):
            return self.level
        if self.kind == "linear":
            if regressor_law == "gaussian":
                return -np.inf
            return self.level + min(0.0, self.slope * d)
        return self.level - abs(self.amplitude)

    def shifted(self, delta: float) -> "CatalogFunction":
        return CatalogFunction(self.kind, self.level + delta, self.slope, self.amplitude, self.frequency)

    def to_dict(self):
        return {
            "kind": self.kind,
            "level": self.level,
            "slope": self.slope,
            "amplitude": self.amplitude,
            "frequency": self.frequency,
        }


def gen_regression(
    n: int,
    d: int,
    mean_fn: CatalogFunction = CatalogFunction(),
    scale_fn: CatalogFunction = CatalogFunction("constant", 1.0),
    regressor_law: str = "uniform",
    innovation: Innovation = Innovation(),
    seed: Seed = 0,
    *,
    change_fraction: Optional[float] = None,
    mean_fn_after: Optional[CatalogFunction] = None,
) -> RegressionSample:
    """Simulate ``Y_t = m_t(X_t) + s(X_t) eps_t``, ``t = 1..n``.

    Regressors are i.i.d. uniform on ``[0, 1]^d`` or standard gaussian, drawn
    from a stream independent of the innovations.  With ``change_fraction``
    set to ``theta``, observations ``t > floor(theta * n)`` use
    ``mean_fn_after``.  A scale function identically 0 gives noiseless data;
    otherwise the scale must be bounded away from 0 on the regressor support.
    """
    n = _check_n(n, 1)
    d = _check_n(d, 1)
    if regressor_law not in _REGRESSOR_LAWS:
        raise ValueError(f"unknown regressor law {regressor_law!r}; expected one of {_REGRESSOR_LAWS}")
    noiseless = scale_fn.kind == "constant" and scale_fn.level == 0.0
    if not noiseless and not scale_fn.infimum(regressor_law, d) > 0:
        raise ValueError("scale_fn must be strictly positive on the regressor support")
    if change_fraction is not None:
        if not 0 < change_fraction < 1:
            raise ValueError("change_fraction must lie in (0, 1)")
        if mean_fn_after is None:
            raise ValueError("change_fraction requires mean_fn_after")

    rx = make_rng(seed, 0)
    if regressor_law == "uniform":
        x = rx.random((n, d))
    else:
        x = rx.standard_normal((n, d))
    eps = innovation.draw(n, make_rng(seed, 1))

    mean = mean_fn(x)
    if change_fraction is not None:
        k = int(math.floor(change_fraction * n))
        mean[k:] = mean_fn_after(x[k:])
    y = mean + scale_fn(x) * eps if not noiseless else mean
    origin = {
        "generator": "regression",
        "n": n,
        "d": d,
        "mean_fn": mean_fn.to_dict(),
        "scale_fn": scale_fn.to_dict(),
        "regressor_law": regressor_law,
        "innovation": innovation.to_dict(),
        "change_fraction": change_fraction,
        "mean_fn_after": None if mean_fn_after is None else mean_fn_after.to_dict(),
        "seed": list(seed_path(seed)),
    }
    return RegressionSample(y, x, origin)
