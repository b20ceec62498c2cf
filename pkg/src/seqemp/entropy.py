"""Brackets for indicator families and admissibility checks.

Conditions checked, for even ``Q >= 2`` and ``gamma > 0``:

A1  ``sum_t t^(Q-2) alpha(t)^(gamma/(2+gamma)) < inf``
A2  ``int_0^1 x^(-gamma/(2+gamma)) N(x)^(1/Q) dx < inf`` for bracketing
    numbers ``N(x) = O(x^-d)``, i.e. ``gamma/(2+gamma) + d/Q < 1``
A3  envelope with finite Q-th moment and uniformly bounded moments of order
    ``Q (2+gamma) / 2`` over the family (plug-in report).

Boundary cases of the strict inequalities are reported as failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .empproc import Indicator, Interval, ThresholdFamily, jump_grid, rho_norm
from .laws import Law
from .seriesgen import MixingSpec, RegressionSample, UnivariateSeries, alpha_of

__all__ = [
    "BracketSet",
    "ConditionReport",
    "EntropyBudget",
    "bracketing_number",
    "build_brackets",
    "check_A1",
    "check_A2_integral",
    "check_A3",
]


@dataclass(frozen=True)
class EntropyBudget:
    Q: int
    gamma: float
    bracket_exponent: float = 2.0
    mixing: MixingSpec = MixingSpec()

    def __post_init__(self):
        if isinstance(self.Q, bool) or int(self.Q) != self.Q or self.Q < 2 or self.Q % 2:
            raise ValueError(f"Q must be an even integer >= 2, got {self.Q!r}")
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.bracket_exponent > 0:
            raise ValueError("bracket_exponent must be positive")

    @property
    def kappa(self) -> float:
        """Mixing exponent ``gamma / (2 + gamma)``."""
        return self.gamma / (2.0 + self.gamma)

    @property
    def moment_order(self) -> float:
        return self.Q * (2.0 + self.gamma) / 2.0


def _json_number(v):
    v = float(v)
    return v if math.isfinite(v) else None


@dataclass
class ConditionReport:
    condition: str
    passed: bool
    value: float
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self):
        diag = {
            k: (_json_number(v) if isinstance(v, (float, np.floating)) else v)
            for k, v in self.diagnostics.items()
        }
        return {
            "condition": self.condition,
            "pass": bool(self.passed),
            "value": _json_number(self.value),
            "diagnostics": diag,
        }


# ---------------------------------------------------------------------------
# brackets
# ---------------------------------------------------------------------------


@dataclass
class BracketSet:
    """Brackets ``|I{. <= z} - a*| <= b*`` for the indicator family.

    Bucket ``k`` covers thresholds ``z`` in ``(q_{k-1}, q_k]`` with
    ``q_0 = -inf`` and ``q_N = +inf``; its approximating member is
    ``I{. <= q_k}`` and its bounding member ``I{q_{k-1} < . <= q_k}``.
    """

    cuts: np.ndarray  # q_0 .. q_N
    epsilon: float
    law: Law

    @property
    def approximating(self) -> list:
        return [Indicator(float(q)) for q in self.cuts[1:]]

    @property
    def bounding(self) -> list:
        return [Interval(float(a), float(b)) for a, b in zip(self.cuts[:-1], self.cuts[1:])]

    def __len__(self):
        return self.cuts.size - 1

    def locate(self, z):
        """Bucket index of each threshold."""
        return np.searchsorted(self.cuts[1:], np.asarray(z, dtype=float), side="left")

    def bracket(self, z: float):
        k = int(self.locate(z))
        return self.approximating[k], self.bounding[k]

    def covers(self, z, y) -> np.ndarray:
        """Pointwise check ``a*(y) - b*(y) <= I{y <= z} <= a*(y) + b*(y)``, all pairs."""
        z = np.atleast_1d(np.asarray(z, dtype=float))
        y = np.atleast_1d(np.asarray(y, dtype=float))
        k = self.locate(z)
        hi = self.cuts[1:][k]
        lo = self.cuts[:-1][k]
        phi = (y[None, :] <= z[:, None]).astype(float)
        a = (y[None, :] <= hi[:, None]).astype(float)
        b = ((y[None, :] > lo[:, None]) & (y[None, :] <= hi[:, None])).astype(float)
        return (a - b <= phi) & (phi <= a + b)

    def bounding_rho(self) -> np.ndarray:
        return np.array([rho_norm(b, self.law) for b in self.bounding])

    def satisfies_moment_condition(self, Q: int, gamma: float) -> bool:
        """``E|b|^(i (2+gamma)/2) ^ (1/2) <= epsilon`` for ``i = 2..Q`` and every ``b``."""
        for b in self.bounding:
            for i in range(2, Q + 1):
                if not b.abs_moment(self.law, i * (2.0 + gamma) / 2.0) ** 0.5 <= self.epsilon:
                    return False
        return True


def _cuts(N, law):
    inner = law.ppf(np.arange(1, N) / N) if N > 1 else np.empty(0)
    return np.concatenate([[-np.inf], inner, [np.inf]])


def build_brackets(epsilon: float, law: Law) -> BracketSet:
    """Equal-probability brackets with every bounding member of rho-norm below epsilon.

    The count is the smallest ``N`` with ``N > 1/epsilon^2`` for which the
    computed bucket norms are strictly below ``epsilon`` in floating point.
    """
    if not (np.isfinite(epsilon) and epsilon > 0):
        raise ValueError("epsilon must be positive and finite")
    if not isinstance(law, Law):
        raise ValueError("brackets need a catalog law with an invertible CDF")
    N = max(1, math.floor(1.0 / epsilon**2))
    while True:
        cuts = _cuts(N, law)
        rho = np.sqrt(np.diff(law.cdf(cuts)))
        if np.all(rho < epsilon):
            return BracketSet(cuts, float(epsilon), law)
        N += 1


def bracketing_number(epsilon: float, law: Law) -> int:
    return len(build_brackets(epsilon, law))


# ---------------------------------------------------------------------------
# A1: mixing summability
# ---------------------------------------------------------------------------


def _a1_terms(budget: EntropyBudget, T: int) -> np.ndarray:
    t = np.arange(1, T + 1, dtype=float)
    return t ** (budget.Q - 2) * alpha_of(budget.mixing, np.arange(1, T + 1)) ** budget.kappa


def _a1_tail_bound(budget: EntropyBudget, T: int) -> float:
    spec, kappa, q2 = budget.mixing, budget.kappa, budget.Q - 2
    if spec.form in ("independent", "m-dependent"):
        return 0.0 if spec.form == "independent" or T >= spec.m else math.inf
    if spec.form == "polynomial":
        if spec.C == 0:
            return 0.0
        p = spec.beta * kappa - q2
        if p <= 1:
            return math.inf
        # sum_{t>T} t^-p <= int_T^inf t^-p dt
        return spec.C**kappa * T ** (1 - p) / (p - 1)
    r = spec.rho**kappa * ((T + 2.0) / (T + 1.0)) ** q2
    if r >= 1:
        return math.inf
    return spec.c**kappa * (T + 1.0) ** q2 * spec.rho ** (kappa * (T + 1)) / (1 - r)


def _numeric_series_verdict(terms: np.ndarray) -> tuple[bool, float]:
    # increments of the partial sum over successive decades; for t^-p terms
    # the ratio is 10^(1-p)
    T = terms.size
    S = np.cumsum(terms)
    d1 = S[T // 10 - 1] - S[T // 100 - 1]
    d2 = S[T - 1] - S[T // 10 - 1]
    if d2 <= 1e-12:
        return True, 0.0
    ratio = d2 / d1 if d1 > 0 else math.inf
    return bool(ratio < 0.5), float(ratio)


def check_A1(budget: EntropyBudget, truncation: int = 100_000) -> ConditionReport:
    """Mixing-rate condition, decided in closed form with partial-sum diagnostics."""
    if truncation < 10:
        raise ValueError("truncation must be at least 10")
    spec = budget.mixing
    if spec.form == "polynomial" and spec.C > 0:
        exponent = spec.beta * budget.kappa
        passed = exponent > budget.Q - 1
        rule = "beta*gamma/(2+gamma) > Q-1"
    else:
        exponent = math.inf
        passed = True
        rule = "summable for independent, m-dependent and geometric mixing"
    terms = _a1_terms(budget, truncation)
    partial = float(terms.sum())
    diag = {
        "rule": rule,
        "mixing": spec.to_dict(),
        "Q": budget.Q,
        "gamma": budget.gamma,
        "exponent": exponent,
        "truncation": truncation,
        "partial_sum": partial,
        "tail_bound": _a1_tail_bound(budget, truncation),
        "last_increment": float(terms[-1]),
    }
    if truncation >= 1000:
        verdict, ratio = _numeric_series_verdict(terms)
        diag["numeric_pass"] = verdict
        diag["decade_increment_ratio"] = ratio
    return ConditionReport("A1", passed, partial, diag)


# ---------------------------------------------------------------------------
# A2: entropy integral
# ---------------------------------------------------------------------------

_QUAD_LOWER = 1e-9


def _power_integral(a: float, lo: float) -> float:
    """``int_lo^1 x^-a dx`` by adaptive quadrature, one decade at a time."""
    edges = np.logspace(math.log10(lo), 0.0, int(round(-math.log10(lo))) + 1)
    total = 0.0
    for l, h in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(lambda x: x ** (-a), l, h, epsabs=1e-9 * (h - l), epsrel=1e-12, limit=200)
        total += v
    return total


def check_A2_integral(budget: EntropyBudget) -> ConditionReport:
    """Entropy integral for ``N(x) = O(x^-d)`` with ``d = budget.bracket_exponent``."""
    a = budget.kappa + budget.bracket_exponent / budget.Q
    passed = a < 1
    value = 1.0 / (1.0 - a) if passed else math.inf
    i3, i6, i9 = (_power_integral(a, h) for h in (1e-3, 1e-6, _QUAD_LOWER))
    inc1, inc2 = i6 - i3, i9 - i6
    diag = {
        "rule": "gamma/(2+gamma) + d/Q < 1",
        "Q": budget.Q,
        "gamma": budget.gamma,
        "bracket_exponent": budget.bracket_exponent,
        "exponent_sum": a,
        "numeric_pass": bool(inc2 < 0.5 * inc1),
        "decade_increment_ratio": inc2 / inc1,
    }
    if passed:
        head = _QUAD_LOWER ** (1.0 - a) / (1.0 - a)
        quad = i9 + head
        diag["quadrature_value"] = quad
        diag["quadrature_rel_error"] = abs(quad - value) / value
    return ConditionReport("A2", passed, value, diag)


# ---------------------------------------------------------------------------
# A3: envelope and uniform moment bound (plug-in)
# ---------------------------------------------------------------------------


def check_A3(sample, family: ThresholdFamily, budget: EntropyBudget) -> ConditionReport:
    """Plug-in envelope moment and supremum of family moments over the jump grid.

    The supremum always includes the saturated face ``z = +inf``.  A
    heavy-tail warning is raised when one observation carries more than half
    of the top-order envelope moment.
    """
    Q, p = budget.Q, budget.moment_order
    if family.kind == "response-indicator":
        if isinstance(sample, RegressionSample):
            y, x = sample.responses, sample.regressors
        else:
            y, x = sample
            y, x = np.asarray(y, float), np.asarray(x, float).reshape(len(y), -1)
        data = (y, x)
        envelope = np.abs(y)
        z = jump_grid(x[:, 0]) if x.shape[1] == 1 else family.z_grid
        sat = np.full((1, x.shape[1]), np.inf)
        zz = np.vstack([z[:, None] if z.ndim == 1 else z, sat])
        ind = np.all(x[:, None, :] <= zz[None, :, :], axis=2)
        phi = y[:, None] * ind
    elif family.kind == "residual-indicator":
        if isinstance(sample, UnivariateSeries):
            e, yl = sample.responses, sample.lagged
        else:
            e, yl = (np.asarray(v, float) for v in sample)
        data = (e, yl)
        envelope = np.abs(e)
        fam = ThresholdFamily("residual-indicator", jump_grid(yl))
        phi = fam.evaluate(data)
    else:
        y = sample.values if isinstance(sample, UnivariateSeries) else np.asarray(sample, float)
        envelope = np.ones_like(y)
        zz = np.append(jump_grid(y), np.inf)
        phi = (y[:, None] <= zz[None, :]).astype(float)
    if envelope.size == 0:
        raise ValueError("empty sample")

    env_q = float(np.mean(envelope**Q))
    moments = np.mean(np.abs(phi) ** p, axis=0)
    top = envelope**p
    total = float(top.sum())
    share = float(top.max() / total) if total > 0 else 0.0
    heavy = share > 0.5
    sup_m = float(moments.max())
    passed = bool(np.isfinite(env_q) and np.isfinite(sup_m) and not heavy)
    diag = {
        "Q": Q,
        "gamma": budget.gamma,
        "moment_order": p,
        "envelope_moment": env_q,
        "sup_family_moment": sup_m,
        "sup_attained_at_index": int(np.argmax(moments)),
        "grid_size": int(moments.size),
        "largest_single_share": share,
        "heavy_tail_warning": heavy,
    }
    return ConditionReport("A3", passed, sup_m, diag)
