"""Truncation-certified arithmetic on pmfs over the non-negative integers.

A law is stored as a finite vector of weights together with the probability
mass lying beyond the stored support.  Constructors that truncate an
infinite law record that residual mass exactly (or via an analytic tail
formula), and every derived quantity propagates it, so that comparisons
downstream can report a certified error band instead of silently ignoring
truncation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

DEFAULT_TAIL_EPS = 1e-12

_NORMALISATION_TOL = 1e-12


@dataclass(frozen=True)
class GeometricLaw:
    """Geometric law on {0, 1, ...}: P(Y = k) = p (1 - p)^k."""

    p: float

    def __post_init__(self) -> None:
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"geometric parameter must lie in (0, 1], got {self.p}")


@dataclass(frozen=True)
class Pmf:
    """Finitely supported pmf on {0, ..., K} plus certified mass beyond K.

    Invariants enforced at construction: all weights and the tail mass are
    non-negative and the total mass is 1 within 1e-12.  The weight array is
    frozen, so instances are safe to share between threads.
    """

    probs: np.ndarray
    tail_mass: float = 0.0

    def __post_init__(self) -> None:
        arr = np.array(self.probs, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("probs must be a non-empty 1-d sequence")
        if np.any(arr < 0.0):
            raise ValueError("pmf weights must be non-negative")
        if self.tail_mass < 0.0:
            raise ValueError("tail mass must be non-negative")
        total = float(arr.sum()) + self.tail_mass
        if abs(total - 1.0) > _NORMALISATION_TOL:
            raise ValueError(f"total mass {total!r} is not 1 within {_NORMALISATION_TOL}")
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)
        object.__setattr__(self, "tail_mass", float(self.tail_mass))

    def __len__(self) -> int:
        return int(self.probs.size)

    @property
    def support_end(self) -> int:
        """Largest index carried explicitly."""
        return int(self.probs.size - 1)

    def mean(self) -> float:
        """Mean of the stored law.

        Mass beyond the support is attributed to the first truncated index,
        which makes the result a lower bound on the true mean (exact when
        the tail is zero).
        """
        k = np.arange(self.probs.size)
        return float(k @ self.probs) + self.probs.size * self.tail_mass

    def second_moment(self) -> float:
        k = np.arange(self.probs.size)
        return float((k * k) @ self.probs) + self.probs.size**2 * self.tail_mass

    def cdf(self) -> np.ndarray:
        """P(X <= j) for j = 0..K."""
        return np.cumsum(self.probs)

    def survival(self) -> np.ndarray:
        """P(X > j) for j = 0..K, including the recorded tail mass.

        Suffix sums are accumulated from the small end so that entries deep
        in the tail keep their relative accuracy.
        """
        suffix = np.cumsum(self.probs[::-1])[::-1]
        return np.concatenate([suffix[1:], [0.0]]) + self.tail_mass

    def shifted(self, by: int) -> "Pmf":
        """The law of X + by for a non-negative integer shift."""
        if by < 0:
            raise ValueError("shift must be non-negative")
        return Pmf(np.concatenate([np.zeros(by), self.probs]), self.tail_mass)

    def to_dict(self) -> dict:
        return {"probs": [float(x) for x in self.probs], "tail_mass": self.tail_mass}

    @classmethod
    def from_dict(cls, obj: dict) -> "Pmf":
        return cls(np.asarray(obj["probs"], dtype=float), float(obj.get("tail_mass", 0.0)))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Pmf":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TvResult:
    """Total variation distance plus a certified truncation error band.

    The true distance lies in [value - slack, value + slack] intersected
    with [0, 1].
    """

    value: float
    slack: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"tv value {self.value} outside [0, 1]")
        if self.slack < 0.0:
            raise ValueError("slack must be non-negative")


def point_mass(k: int) -> Pmf:
    """Pmf of the constant k."""
    if k < 0:
        raise ValueError("support must be non-negative")
    w = np.zeros(k + 1)
    w[k] = 1.0
    return Pmf(w)


def uniform_pmf(lo: int, hi: int) -> Pmf:
    """Uniform law on the integers {lo, ..., hi}."""
    if not 0 <= lo <= hi:
        raise ValueError("need 0 <= lo <= hi")
    w = np.zeros(hi + 1)
    w[lo:] = 1.0 / (hi - lo + 1)
    return Pmf(w)


def geometric_pmf(law: GeometricLaw, horizon: int | None = None,
                  eps_tail: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Truncated geometric pmf with the exact tail recorded.

    With no explicit horizon the support is cut at the smallest K such that
    (1 - p)^(K + 1) <= eps_tail; an explicit horizon simply records the
    resulting tail, which may exceed eps_tail.
    """
    p = law.p
    if horizon is None:
        if p == 1.0:
            horizon = 0
        else:
            horizon = max(0, math.ceil(math.log(eps_tail) / math.log1p(-p)) - 1)
            while (1.0 - p) ** (horizon + 1) > eps_tail:
                horizon += 1
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    k = np.arange(horizon + 1)
    probs = p * np.power(1.0 - p, k)
    tail = (1.0 - p) ** (horizon + 1)
    return Pmf(probs, tail)


def poisson_pmf(rate: float, horizon: int | None = None,
                eps_tail: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Truncated Poisson pmf with the analytic tail recorded."""
    if rate < 0:
        raise ValueError("rate must be non-negative")
    if rate == 0:
        return point_mass(0)
    if horizon is None:
        horizon = int(stats.poisson.isf(eps_tail, rate))
        while stats.poisson.sf(horizon, rate) > eps_tail:
            horizon += 1
    probs = stats.poisson.pmf(np.arange(horizon + 1), rate)
    tail = float(stats.poisson.sf(horizon, rate))
    return Pmf(probs, tail)


def _padded(a: np.ndarray, n: int) -> np.ndarray:
    if a.size >= n:
        return a
    return np.concatenate([a, np.zeros(n - a.size)])


def tv_distance(a: Pmf, b: Pmf) -> TvResult:
    """Total variation distance between two stored laws.

    value is half the l1 distance over the union of the stored supports;
    slack is the conservative tail budget
    (tail_a + tail_b) / 2 + |tail_a - tail_b| / 2, an upper bound on the
    contribution of the truncated region.
    """
    n = max(len(a), len(b))
    diff = _padded(a.probs, n) - _padded(b.probs, n)
    value = min(1.0, 0.5 * float(np.abs(diff).sum()))
    slack = 0.5 * (a.tail_mass + b.tail_mass) + 0.5 * abs(a.tail_mass - b.tail_mass)
    return TvResult(value, slack)


def convolve(a: Pmf, b: Pmf) -> Pmf:
    """Law of the sum of independent draws from a and b."""
    probs = np.convolve(a.probs, b.probs)
    tail = max(0.0, 1.0 - float(probs.sum()))
    return Pmf(probs, tail)


def compound_pmf(n_law: Pmf, x_law: Pmf) -> Pmf:
    """Law of X_1 + ... + X_N for iid positive summands X_i independent of N.

    Computed as the mixture over n of the n-fold convolution powers of the
    summand law.  Requires the summands to put no mass at zero, so the
    result's weight at zero is exactly P(N = 0).
    """
    if x_law.probs[0] != 0.0:
        raise ValueError("summand law must put zero mass at 0")
    n_max = len(n_law) - 1
    out = np.zeros(n_max * (len(x_law) - 1) + 1)
    out[0] = n_law.probs[0]
    power = np.ones(1)
    for n in range(1, n_max + 1):
        power = np.convolve(power, x_law.probs)
        weight = n_law.probs[n]
        if weight > 0.0:
            out[: power.size] += weight * power
    tail = max(0.0, 1.0 - float(out.sum()))
    return Pmf(out, tail)


def hazard_order_vs_geometric(n_law: Pmf, p: float) -> bool:
    """Whether N dominates Geom(p) in the hazard rate order.

    Checks (1 - p) P(N = j) <= p P(N > j) across the stored support, with
    the survival including the recorded tail mass; indices beyond the
    stored support (total mass <= the tail) cannot be inspected.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"geometric parameter must lie in (0, 1), got {p}")
    surv = n_law.survival()
    lhs = (1.0 - p) * n_law.probs
    rhs = p * surv
    return bool(np.all(lhs <= rhs * (1.0 + 1e-10) + 1e-18))


def stochastically_larger(a: Pmf, b: Pmf) -> bool:
    """Whether a dominates b in the usual stochastic order.

    Survival functions include the recorded tails; the comparison allows a
    1e-12 absolute cushion for rounding.
    """
    n = max(len(a), len(b))
    pa, pb = _padded(a.probs, n), _padded(b.probs, n)
    sa = np.cumsum(pa[::-1])[::-1] + a.tail_mass
    sb = np.cumsum(pb[::-1])[::-1] + b.tail_mass
    return bool(np.all(sa[1:] >= sb[1:] - 1e-12))


def shift_tv(x_law: Pmf) -> TvResult:
    """Total variation distance between X and X + 1."""
    return tv_distance(x_law, x_law.shifted(1))
