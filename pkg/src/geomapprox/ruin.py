"""Infinite-horizon ruin probabilities for the compound binomial risk process.

The surplus process is U_t = m + t - (eta_1 + ... + eta_t) with iid
non-negative integer claims eta of mean q < 1.  The ruin probability
psi(m) = P(inf_t U_t <= 0) equals the tail of a geometric compound of
ladder variables (discrete Pollaczek-Khinchine); rewriting the compound
over strictly positive summands X turns the geometric-sum machinery into
two families of explicit approximations with error bounds.

Everything is evaluated from the truncated claim pmf; analytic claim
families (Poisson, geometric, negative binomial) get dedicated
constructors so their moments can be cross-checked in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize, stats

from .errors import DegenerateModelError
from .pmf import DEFAULT_TAIL_EPS, Pmf, point_mass

_MC_BATCH = 100_000


@dataclass(frozen=True)
class ClaimLaw:
    """Claim-size law eta on {0, 1, ...} with mean below 1 and P(eta = 0) > 0."""

    eta: Pmf

    def __post_init__(self) -> None:
        if self.eta.probs[0] <= 0.0:
            raise ValueError("claims must have positive mass at 0")
        if self.mean >= 1.0:
            raise ValueError(f"claim mean {self.mean} must be below 1 (positive drift)")

    @property
    def mean(self) -> float:
        """q = E[eta]."""
        return self.eta.mean()

    @property
    def p_zero(self) -> float:
        return float(self.eta.probs[0])

    @property
    def p_positive(self) -> float:
        return 1.0 - self.p_zero

    @property
    def excess_mean(self) -> float:
        """q - P(eta > 0) = sum_k (k - 1) P(eta = k) over k >= 1, computed without cancellation."""
        k = np.arange(len(self.eta))
        w = np.clip(k - 1, 0, None)[1:]
        return float(w @ self.eta.probs[1:]) + (len(self.eta) - 1) * self.eta.tail_mass

    @property
    def factorial_moment_2(self) -> float:
        """E[eta (eta - 1)], with tail mass attributed to the first truncated index."""
        k = np.arange(len(self.eta))
        n = len(self.eta)
        return float((k * (k - 1)) @ self.eta.probs) + n * (n - 1) * self.eta.tail_mass

    @property
    def third_combination(self) -> float:
        """E[eta (eta - 1) (2 eta - 1)], with the same tail attribution."""
        k = np.arange(len(self.eta))
        n = len(self.eta)
        return (float((k * (k - 1) * (2 * k - 1)) @ self.eta.probs)
                + n * (n - 1) * (2 * n - 1) * self.eta.tail_mass)

    def is_degenerate(self) -> bool:
        """Claims essentially supported on {0, 1}: the compound collapses to 0."""
        return len(self.eta) < 3 or self.excess_mean <= 0.0


def claims_from_probs(weights, tail_mass: float = 0.0) -> ClaimLaw:
    return ClaimLaw(Pmf(np.asarray(weights, dtype=float), tail_mass))


def poisson_claims(lam: float, eps_tail: float = DEFAULT_TAIL_EPS) -> ClaimLaw:
    if not 0.0 < lam < 1.0:
        raise ValueError("Poisson claim mean must lie in (0, 1)")
    horizon = int(stats.poisson.isf(eps_tail, lam))
    while stats.poisson.sf(horizon, lam) > eps_tail:
        horizon += 1
    probs = stats.poisson.pmf(np.arange(horizon + 1), lam)
    return ClaimLaw(Pmf(probs, float(stats.poisson.sf(horizon, lam))))


def geometric_claims(alpha: float, eps_tail: float = DEFAULT_TAIL_EPS) -> ClaimLaw:
    """eta ~ Geom(alpha) on {0, 1, ...}; needs alpha > 1/2 for drift."""
    if not 0.5 < alpha <= 1.0:
        raise ValueError("geometric claim parameter must exceed 1/2")
    horizon = max(0, math.ceil(math.log(eps_tail) / math.log1p(-alpha)) - 1)
    while (1.0 - alpha) ** (horizon + 1) > eps_tail:
        horizon += 1
    k = np.arange(horizon + 1)
    return ClaimLaw(Pmf(alpha * np.power(1.0 - alpha, k), (1.0 - alpha) ** (horizon + 1)))


def negbin_claims(shape: float, rate: float, eps_tail: float = DEFAULT_TAIL_EPS) -> ClaimLaw:
    """Negative binomial claims from a gamma(shape, rate) Poisson mixture; mean shape / rate."""
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    if shape / rate >= 1.0:
        raise ValueError("claim mean shape / rate must be below 1")
    psucc = rate / (rate + 1.0)
    horizon = int(stats.nbinom.isf(eps_tail, shape, psucc))
    while stats.nbinom.sf(horizon, shape, psucc) > eps_tail:
        horizon += 1
    probs = stats.nbinom.pmf(np.arange(horizon + 1), shape, psucc)
    return ClaimLaw(Pmf(probs, float(stats.nbinom.sf(horizon, shape, psucc))))


def ladder_pmf(claims: ClaimLaw) -> Pmf:
    """Ladder-height law: P(Y = j) = P(eta > j) / q for j >= 0."""
    q = claims.mean
    if q <= 0.0 or len(claims.eta) < 2:
        raise DegenerateModelError("claims carry no positive sizes: no ladder law")
    probs = claims.eta.survival()[:-1] / q
    tail = max(0.0, 1.0 - float(probs.sum()))
    return Pmf(probs, tail)


def conditioned_claim_pmf(claims: ClaimLaw) -> Pmf:
    """Ladder heights conditioned to be positive: P(X = j) = P(eta > j) / (q - P(eta > 0)), j >= 1."""
    if claims.is_degenerate():
        raise DegenerateModelError("claims supported on {0, 1}: the positive ladder law is undefined")
    surv = claims.eta.survival()
    probs = np.concatenate([[0.0], surv[1:-1]]) / claims.excess_mean
    tail = max(0.0, 1.0 - float(probs.sum()))
    return Pmf(probs, tail)


def pk_geometric_rate(claims: ClaimLaw) -> float:
    """r = (1 - q) / P(eta = 0), the geometric rate of the compound representation."""
    r = (1.0 - claims.mean) / claims.p_zero
    if r > 1.0 + 1e-12:
        raise ValueError(f"compound rate {r} above 1: claim mean must dominate P(eta > 0)")
    if r <= 0.0:
        raise ValueError("compound rate must be positive")
    return min(1.0, r)


def exact_ruin_probabilities(claims: ClaimLaw, m_max: int) -> np.ndarray:
    """psi(0..m_max): psi(0) = q, and psi(m) = P(W >= m) for m >= 1.

    W is the geometric compound of the positive ladder heights, evaluated by
    the defective-renewal recursion f(0) = r, f(s) = (1 - r) sum_j x_j f(s - j).
    """
    if m_max < 1:
        raise ValueError("m_max must be at least 1")
    psi = np.empty(m_max + 1)
    psi[0] = claims.mean
    if claims.is_degenerate():
        psi[1:] = 0.0
        return psi
    r = pk_geometric_rate(claims)
    x = conditioned_claim_pmf(claims).probs
    f = np.zeros(m_max)
    f[0] = r
    for s in range(1, m_max):
        jmax = min(s, x.size - 1)
        f[s] = (1.0 - r) * float(x[1:jmax + 1] @ f[s - 1::-1][:jmax])
    psi[1:] = np.clip(1.0 - np.cumsum(f), 0.0, 1.0)
    return psi


@dataclass(frozen=True)
class ClaimMoments:
    """Moments of the positive ladder law, in closed form from the claim law."""

    ex: float
    ex2: float
    shift_tv: float


def conditioned_claim_moments(claims: ClaimLaw) -> ClaimMoments:
    """E[X], E[X^2] and the smoothness term P(eta > 0) / (2 (q - P(eta > 0))).

    The smoothness term upper-bounds tv(L(X), L(X + 1)) whenever
    P(eta = 1) >= P(eta > 1) (it overshoots the exact distance outside that
    regime, which keeps the bounds that consume it one-sided).
    """
    if claims.is_degenerate():
        raise DegenerateModelError("claims supported on {0, 1}: the positive ladder law is undefined")
    denom = claims.excess_mean
    return ClaimMoments(
        ex=claims.factorial_moment_2 / (2.0 * denom),
        ex2=claims.third_combination / (6.0 * denom),
        shift_tv=claims.p_positive / (2.0 * denom),
    )


def ruin_bound_1(claims: ClaimLaw, m: int) -> tuple[float, float]:
    """Two-sided bracket from the zero-matched geometric approximation.

    lower = ((q - P(eta > 0)) / P(eta = 0))^m is also a guaranteed lower
    bound on psi(m); upper adds the closed-form error term.
    """
    if m < 1:
        raise ValueError("bounds apply for m >= 1")
    ratio = claims.excess_mean / claims.p_zero
    lower = min(1.0, ratio**m)
    err = (0.5 * claims.factorial_moment_2 - claims.excess_mean) / claims.p_zero
    upper = min(1.0, lower + max(0.0, err))
    return lower, upper


def ruin_bound_2(claims: ClaimLaw, m: int) -> tuple[float, float]:
    """Mean-matched geometric approximation with a symmetric error radius.

    center = (E[eta(eta-1)] / (2 (1 - q) + E[eta(eta-1)]))^m.  The error
    factor uses the smoothness branch only on its domain (2q - 3 P(eta > 0)
    positive and the log argument inside (0, 1)); otherwise the min is 1.
    """
    if m < 1:
        raise ValueError("bounds apply for m >= 1")
    fm2 = claims.factorial_moment_2
    if fm2 <= 0.0:
        return 0.0, 0.0
    center = (fm2 / (2.0 * (1.0 - claims.mean) + fm2)) ** m
    t = 2.0 * claims.mean - 3.0 * claims.p_positive
    log_arg = claims.excess_mean / claims.p_zero
    if t > 0.0 and 0.0 < log_arg < 1.0:
        v = math.sqrt(-4.0 * claims.excess_mean / (t * math.log(log_arg)))
        factor = min(1.0, (1.0 - claims.mean) * (1.0 + v) / claims.p_zero)
    else:
        factor = 1.0
    err = 0.5 * factor * (claims.third_combination / (3.0 * fm2) - 1.0)
    return min(1.0, center), max(0.0, err)


def poisson_claim_error(lam: float) -> float:
    """Bracket width of the first bound for Poisson(lam) claims, in closed form."""
    if not 0.0 <= lam < 1.0:
        raise ValueError("Poisson claim mean must lie in [0, 1)")
    return math.exp(lam) * (0.5 * lam * lam - lam + 1.0) - 1.0


def gamma_mixed_claim_error(shape: float, rate: float) -> float:
    """Bracket width of the first bound for gamma-mixed Poisson claims."""
    if shape <= 0 or rate <= 0:
        raise ValueError("shape and rate must be positive")
    if shape / rate >= 1.0:
        raise ValueError("claim mean shape / rate must be below 1")
    return ((1.0 + 1.0 / rate) ** shape
            * (shape * (shape + 1.0) / (2.0 * rate * rate) - shape / rate + 1.0) - 1.0)


@dataclass(frozen=True)
class RuinReport:
    """Exact ruin probability next to both approximations for one level m."""

    m: int
    psi_exact: float
    approx1: float
    err1: float
    approx2: float
    err2: float

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("reports apply for m >= 1")
        if not 0.0 <= self.psi_exact <= 1.0:
            raise ValueError("psi must be a probability")
        if min(self.approx1, self.err1, self.approx2, self.err2) < 0.0:
            raise ValueError("approximations and radii must be non-negative")


def ruin_reports(claims: ClaimLaw, m_max: int) -> list[RuinReport]:
    psi = exact_ruin_probabilities(claims, m_max)
    out = []
    for m in range(1, m_max + 1):
        lower, upper = ruin_bound_1(claims, m)
        center, err = ruin_bound_2(claims, m)
        out.append(RuinReport(m, float(psi[m]), lower, upper - lower, center, err))
    return out


def adjustment_coefficient(claims: ClaimLaw) -> float:
    """Positive root of E[exp(s (eta - 1))] = 1 for the truncated claim law."""
    probs = claims.eta.probs
    k = np.arange(probs.size)

    def moment(s: float) -> float:
        return float(probs @ np.exp(s * (k - 1.0))) - 1.0

    hi = 0.25
    while moment(hi) <= 0.0:
        hi *= 2.0
        if hi > 200.0:
            raise RuntimeError("failed to bracket the adjustment coefficient")
    return float(optimize.brentq(moment, 1e-12, hi, xtol=1e-12))


def mc_horizon(claims: ClaimLaw, m: int, residual_target: float = 1e-4) -> tuple[int, float]:
    """(horizon H, certified residual bound) for late-ruin truncation.

    Uses a Chernoff/supermartingale tail at half the adjustment coefficient:
    P(ruin after H) <= exp(-s m) phi(s)^(H+1) / (1 - phi(s)).
    """
    s = 0.5 * adjustment_coefficient(claims)
    probs = claims.eta.probs
    k = np.arange(probs.size)
    phi = float(probs @ np.exp(s * (k - 1.0)))
    if not phi < 1.0:
        raise RuntimeError("tilted moment did not contract")
    need = (math.log(residual_target * (1.0 - phi)) + s * m) / math.log(phi)
    horizon = max(1, math.ceil(need) - 1)
    while math.exp(-s * m) * phi ** (horizon + 1) / (1.0 - phi) > residual_target:
        horizon += 1
    return horizon, math.exp(-s * m) * phi ** (horizon + 1) / (1.0 - phi)


@dataclass(frozen=True)
class McRuin:
    estimate: float
    stderr: float
    n_paths: int
    horizon: int
    residual_bound: float


def monte_carlo_ruin(claims: ClaimLaw, m: int, n_paths: int = 1_000_000,
                     seed: int = 0, residual_target: float = 1e-4,
                     batch_size: int = _MC_BATCH) -> McRuin:
    """Simulate surplus paths and estimate psi(m).

    Batches use counter-based Philox streams keyed by (seed, batch index),
    so any parallel execution of batches reproduces bit-identically.
    """
    if m < 1:
        raise ValueError("ruin level m must be at least 1")
    horizon, residual = mc_horizon(claims, m, residual_target)
    probs = claims.eta.probs / claims.eta.probs.sum()
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    ruined = 0
    done = 0
    batch = 0
    while done < n_paths:
        size = min(batch_size, n_paths - done)
        rng = np.random.Generator(np.random.Philox(key=np.array([seed, batch], dtype=np.uint64)))
        u = rng.random((size, horizon))
        draws = np.searchsorted(cdf, u, side="right")
        walk = np.cumsum(draws - 1, axis=1)
        ruined += int((walk >= m).any(axis=1).sum())
        done += size
        batch += 1
    est = ruined / n_paths
    stderr = math.sqrt(max(est * (1.0 - est), 1e-300) / n_paths)
    return McRuin(est, stderr, n_paths, horizon, residual)
