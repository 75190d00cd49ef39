"""Geometric approximation of random sums of positive integer summands.

W = X_1 + ... + X_N is compared against a geometric law matched at zero,
p = P(N = 0).  When N dominates that geometric in the hazard rate order the
error bound collapses to the closed form p (mu E[N] + 1) - 1; otherwise the
bound is evaluated through the quantile coupling of N and N conditioned to
be positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError
from .pmf import (DEFAULT_TAIL_EPS, GeometricLaw, Pmf, TvResult, compound_pmf, geometric_pmf,
                  hazard_order_vs_geometric, shift_tv, tv_distance)


@dataclass(frozen=True)
class RandomSumModel:
    """Count law N on {0, 1, ...} and summand law X on {1, 2, ...}."""

    n_law: Pmf
    x_law: Pmf

    def __post_init__(self) -> None:
        if len(self.x_law) < 2 or self.x_law.probs[0] != 0.0:
            raise ValueError("summand law must be supported on {1, 2, ...}")

    @property
    def p(self) -> float:
        """P(N = 0), the matched geometric parameter."""
        return float(self.n_law.probs[0])

    @property
    def mu(self) -> float:
        """Mean summand size (>= 1 by the support restriction)."""
        return self.x_law.mean()

    def n_mean(self) -> float:
        return self.n_law.mean()

    def positive_part(self) -> Pmf:
        """Law of N conditioned on N > 0."""
        p = self.p
        if p >= 1.0:
            raise DegenerateModelError("N is almost surely zero")
        probs = self.n_law.probs.copy()
        probs[0] = 0.0
        return Pmf(probs / (1.0 - p), self.n_law.tail_mass / (1.0 - p))


def geom_param(model: RandomSumModel) -> float:
    """P(N = 0); raises when it is 0 or 1 (approximation degenerates)."""
    p = model.p
    if p <= 0.0 or p >= 1.0:
        raise DegenerateModelError(f"P(N=0) = {p} leaves no geometric approximation")
    return p


def coupling_diff_law(model: RandomSumModel) -> np.ndarray:
    """Law of D = N' - N under the quantile coupling, N' = (N | N > 0).

    Entry d holds P(D = d); the coupling realises N' >= N almost surely
    because the conditional cdf is dominated by the unconditional one.
    """
    geom_param(model)
    cum_n = np.cumsum(model.n_law.probs)
    cum_n0 = np.cumsum(model.positive_part().probs)
    out = np.zeros(len(model.n_law) + 1)
    i = j = 0
    prev = 0.0
    while i < cum_n.size and j < cum_n0.size:
        t = min(cum_n[i], cum_n0[j])
        mass = t - prev
        if mass > 0.0:
            d = j - i
            if d < 0:
                raise AssertionError("quantile coupling produced a negative gap")
            out[d] += mass
        prev = t
        if cum_n[i] <= t:
            i += 1
        if cum_n0[j] <= t:
            j += 1
    return out


@dataclass(frozen=True)
class RandomSumBound:
    """Certified bound with the evaluation path that produced it."""

    bound: float
    path: str
    slack: float


def hazard_fast_bound(model: RandomSumModel) -> float:
    """Closed-form bound p (mu E[N] + 1) - 1, valid under the hazard order."""
    p = geom_param(model)
    return min(1.0, max(0.0, p * (model.mu * model.n_mean() + 1.0) - 1.0))


def general_coupling_bound(model: RandomSumModel) -> float:
    """(1 - p) E|S_D - 1| with S_d the d-fold sum of summands, D the coupling gap.

    E|S_d - 1| is evaluated from convolution powers of the summand law
    (S_0 = 0 contributes 1).
    """
    p = geom_param(model)
    d_law = coupling_diff_law(model)
    nonzero = np.flatnonzero(d_law)
    if nonzero.size == 0:
        return 0.0
    x = model.x_law.probs
    expect = 0.0
    power = np.ones(1)
    for d in range(int(nonzero[-1]) + 1):
        if d > 0:
            power = np.convolve(power, x)
        mass = d_law[d]
        if mass <= 0.0:
            continue
        s = np.arange(power.size)
        expect += mass * float(np.abs(s - 1.0) @ power)
    return min(1.0, max(0.0, (1.0 - p) * expect))


def random_sum_bound(model: RandomSumModel) -> RandomSumBound:
    """Bound on tv(L(W), Geom(P(N=0))), taking the hazard fast path when valid."""
    p = geom_param(model)
    slack = model.n_law.tail_mass + model.x_law.tail_mass
    if hazard_order_vs_geometric(model.n_law, p):
        return RandomSumBound(hazard_fast_bound(model), "hazard_fast", slack)
    return RandomSumBound(general_coupling_bound(model), "general", slack)


def mean_matched_geom_bound(r: float, x_law: Pmf) -> tuple[float, float]:
    """Comparison bound for geometric N, approximating with a mean-matched geometric.

    For N ~ Geom(r) returns (p', bound) with p' = r / (r + mu (1 - r)) and
    bound = min{1, r [1 + sqrt(-2 / (u log(1 - r)))]} (E[X^2] / mu - 1) / 2,
    where 1 - u is the tv distance between X and X + 1.  When u <= 0 the
    square-root branch is dropped and the min evaluates to 1.
    """
    if not 0.0 < r < 1.0:
        raise ValueError(f"geometric parameter must lie in (0, 1), got {r}")
    if len(x_law) < 2 or x_law.probs[0] != 0.0:
        raise ValueError("summand law must be supported on {1, 2, ...}")
    mu = x_law.mean()
    ex2 = x_law.second_moment()
    u = 1.0 - shift_tv(x_law).value
    p_prime = r / (r + mu * (1.0 - r))
    if u > 0.0:
        factor = min(1.0, r * (1.0 + math.sqrt(-2.0 / (u * math.log1p(-r)))))
    else:
        factor = 1.0
    return p_prime, 0.5 * factor * (ex2 / mu - 1.0)


def exact_sum_tv(model: RandomSumModel, eps_tail: float = DEFAULT_TAIL_EPS) -> TvResult:
    """Exact tv distance between the random sum and the matched geometric."""
    p = geom_param(model)
    w = compound_pmf(model.n_law, model.x_law)
    return tv_distance(w, geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
