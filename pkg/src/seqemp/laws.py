"""Catalog of continuous laws on the real line with closed-form CDF and quantiles."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special, stats

_KINDS = ("uniform", "gaussian")


@dataclass(frozen=True)
class Law:
    """A catalog law.

    ``uniform`` is uniform on ``[loc, loc + scale]``; ``gaussian`` is
    ``N(loc, scale**2)``.
    """

    kind: str = "uniform"
    loc: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown law {self.kind!r}; expected one of {_KINDS}")
        if not (np.isfinite(self.loc) and np.isfinite(self.scale) and self.scale > 0):
            raise ValueError("law needs finite loc and positive finite scale")

    @classmethod
    def uniform(cls, a=0.0, b=1.0):
        return cls("uniform", a, b - a)

    @classmethod
    def gaussian(cls, mu=0.0, sigma=1.0):
        return cls("gaussian", mu, sigma)

    @cached_property
    def _dist(self):
        if self.kind == "uniform":
            return stats.uniform(loc=self.loc, scale=self.scale)
        return stats.norm(loc=self.loc, scale=self.scale)

    def cdf(self, z):
        return self._dist.cdf(z)

    def ppf(self, q):
        return self._dist.ppf(q)

    def pdf(self, y):
        return self._dist.pdf(y)

    def sample(self, size, rng: np.random.Generator):
        if self.kind == "uniform":
            return self.loc + self.scale * rng.random(size)
        return self.loc + self.scale * rng.standard_normal(size)

    @property
    def support(self):
        if self.kind == "uniform":
            return self.loc, self.loc + self.scale
        return -np.inf, np.inf

    def expect(self, f) -> float:
        """E[f(Y)] by adaptive quadrature against the density."""
        lo, hi = self.support
        val, _ = integrate.quad(lambda y: f(y) * self.pdf(y), lo, hi, limit=200)
        return float(val)

    def abs_moment(self, p: float) -> float:
        """E|Y|^p."""
        if self.kind == "gaussian" and self.loc == 0.0:
            return float(self.scale**p * 2 ** (p / 2) * special.gamma((p + 1) / 2) / np.sqrt(np.pi))
        return self.expect(lambda y: abs(y) ** p)

    def to_dict(self):
        return {"kind": self.kind, "loc": self.loc, "scale": self.scale}
