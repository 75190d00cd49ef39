"""Counts of a homogeneous Poisson process observed over a random horizon.

If events arrive at rate lam and the horizon tau is an independent
non-negative random variable, the number of observed events is close to
geometric with parameter E[exp(-lam tau)].  The error admits a closed-form
bound whose sign is controlled by whether tau ages favourably (NBU) or
unfavourably (NWU); both bounds and the exact count law are provided here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special, stats

from .errors import DegenerateModelError, TagMismatchError, UnsupportedLawError
from .pmf import DEFAULT_TAIL_EPS, GeometricLaw, Pmf, geometric_pmf

_QUAD_ABS_TOL = 1e-13


@dataclass(frozen=True)
class Exponential:
    """Exponential horizon with the given rate (mean 1 / rate)."""

    rate: float

    def __post_init__(self) -> None:
        if self.rate <= 0:
            raise ValueError("rate must be positive")


@dataclass(frozen=True)
class GammaUnitMean:
    """Gamma horizon normalised to unit mean; shape is the free parameter."""

    shape: float

    def __post_init__(self) -> None:
        if self.shape <= 0:
            raise ValueError("shape must be positive")


@dataclass(frozen=True)
class Uniform:
    """Horizon uniform on [a, b] with 0 <= a < b."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not 0 <= self.a < self.b:
            raise ValueError("need 0 <= a < b")


@dataclass(frozen=True)
class Custom:
    """User-defined horizon given by its Laplace transform and mean.

    The aging tag ("nbu", "nwu", "neither" or "unknown") must be supplied by
    the caller; it cannot be certified from point evaluations.  An optional
    survival function enables the residual-horizon utilities.
    """

    laplace: Callable[[float], float]
    mean: float
    aging: str = "unknown"
    survival: Callable[[float], float] | None = None

    def __post_init__(self) -> None:
        if self.mean <= 0:
            raise ValueError("mean must be positive")
        if self.aging not in ("nbu", "nwu", "neither", "unknown"):
            raise ValueError(f"unknown aging tag {self.aging!r}")


HorizonLaw = Exponential | GammaUnitMean | Uniform | Custom


def horizon_mean(h: HorizonLaw) -> float:
    if isinstance(h, Exponential):
        return 1.0 / h.rate
    if isinstance(h, GammaUnitMean):
        return 1.0
    if isinstance(h, Uniform):
        return 0.5 * (h.a + h.b)
    return h.mean


def is_nbu(h: HorizonLaw) -> bool:
    """New-better-than-used: exponential, gamma with shape >= 1, uniform."""
    if isinstance(h, Exponential):
        return True
    if isinstance(h, GammaUnitMean):
        return h.shape >= 1.0
    if isinstance(h, Uniform):
        return True
    return h.aging == "nbu"


def is_nwu(h: HorizonLaw) -> bool:
    """New-worse-than-used: exponential and gamma with shape <= 1."""
    if isinstance(h, Exponential):
        return True
    if isinstance(h, GammaUnitMean):
        return h.shape <= 1.0
    if isinstance(h, Uniform):
        return False
    return h.aging == "nwu"


def geom_param(h: HorizonLaw, lam: float) -> float:
    """E[exp(-lam tau)], the geometric parameter of the count approximation."""
    if lam <= 0:
        raise ValueError("process rate must be positive")
    if isinstance(h, Exponential):
        return h.rate / (h.rate + lam)
    if isinstance(h, GammaUnitMean):
        return (1.0 + lam / h.shape) ** (-h.shape)
    if isinstance(h, Uniform):
        # (exp(-lam a) - exp(-lam b)) / (lam (b - a)), written to avoid
        # cancellation for small lam (b - a).
        return -math.exp(-lam * h.a) * math.expm1(-lam * (h.b - h.a)) / (lam * (h.b - h.a))
    return float(h.laplace(lam))


def _gamma_count_horizon(shape: float, psucc: float, eps_tail: float) -> int:
    k = int(stats.nbinom.isf(eps_tail, shape, psucc))
    while stats.nbinom.sf(k, shape, psucc) > eps_tail:
        k += 1
    return k


def _uniform_count_horizon(h: Uniform, lam: float, eps_tail: float) -> int:
    # The count is stochastically dominated by a Poisson of mean lam * b.
    k = int(stats.poisson.isf(eps_tail, lam * h.b))
    while stats.poisson.sf(k, lam * h.b) > eps_tail:
        k += 1
    return k


def exact_count_pmf(h: HorizonLaw, lam: float, horizon: int | None = None,
                    eps_tail: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Exact law of the number of events seen before the random horizon.

    Exponential horizons give a geometric count, gamma horizons a negative
    binomial (evaluated through log-gamma for non-integer shapes), and
    uniform horizons are integrated entry by entry with adaptive quadrature
    (absolute error <= 1e-13 per entry).  Custom horizons are not supported.
    """
    if lam <= 0:
        raise ValueError("process rate must be positive")
    if isinstance(h, Exponential):
        return geometric_pmf(GeometricLaw(h.rate / (h.rate + lam)), horizon, eps_tail)
    if isinstance(h, GammaUnitMean):
        shape = h.shape
        psucc = shape / (shape + lam)
        if horizon is None:
            horizon = _gamma_count_horizon(shape, psucc, eps_tail)
        k = np.arange(horizon + 1)
        logp = (special.gammaln(k + shape) - special.gammaln(shape) - special.gammaln(k + 1)
                + shape * math.log(psucc) + k * math.log1p(-psucc))
        probs = np.exp(logp)
        tail = float(stats.nbinom.sf(horizon, shape, psucc))
        return Pmf(probs, tail)
    if isinstance(h, Uniform):
        if horizon is None:
            horizon = _uniform_count_horizon(h, lam, eps_tail)
        width = h.b - h.a
        probs = np.empty(horizon + 1)
        for k in range(horizon + 1):
            val, _ = integrate.quad(lambda t: stats.poisson.pmf(k, lam * t),
                                    h.a, h.b, epsabs=_QUAD_ABS_TOL, epsrel=1e-12, limit=200)
            probs[k] = val / width
        tail = max(0.0, 1.0 - float(probs.sum()))
        return Pmf(probs, tail)
    raise UnsupportedLawError("exact count law is not available for custom horizons")


def _survival_fn(h: HorizonLaw) -> Callable[[float], float]:
    if isinstance(h, Exponential):
        return lambda t: math.exp(-h.rate * t)
    if isinstance(h, GammaUnitMean):
        return lambda t: float(special.gammaincc(h.shape, h.shape * t))
    if isinstance(h, Uniform):
        def surv(t: float) -> float:
            if t <= h.a:
                return 1.0
            if t >= h.b:
                return 0.0
            return (h.b - t) / (h.b - h.a)
        return surv
    if isinstance(h, Custom) and h.survival is not None:
        return h.survival
    raise UnsupportedLawError("horizon law does not expose a survival function")


def residual_horizon_survival(h: HorizonLaw, lam: float, u: float) -> float:
    """P(remaining horizon after the first event exceeds u, given one occurs).

    Equals P(tau > u + xi) / P(tau > xi) with xi the exponential first
    inter-event time; evaluated in closed form for exponential horizons and
    by quadrature otherwise.
    """
    if lam <= 0:
        raise ValueError("process rate must be positive")
    if u < 0:
        raise ValueError("u must be non-negative")
    if u == 0:
        return 1.0
    if isinstance(h, Exponential):
        return math.exp(-h.rate * u)
    surv = _survival_fn(h)
    denom = 1.0 - geom_param(h, lam)
    if denom <= 0:
        raise DegenerateModelError("horizon is almost surely zero")
    if isinstance(h, Uniform):
        upper = h.b - u
        if upper <= 0:
            return 0.0
        kink = h.a - u
        points = [kink] if 0 < kink < upper else None
        num, _ = integrate.quad(lambda x: surv(u + x) * lam * math.exp(-lam * x),
                                0.0, upper, points=points,
                                epsabs=_QUAD_ABS_TOL, epsrel=1e-12, limit=200)
    else:
        num, _ = integrate.quad(lambda x: surv(u + x) * lam * math.exp(-lam * x),
                                0.0, np.inf, epsabs=_QUAD_ABS_TOL, epsrel=1e-12, limit=200)
    return min(1.0, max(0.0, num / denom))


def residual_horizon_mean(h: HorizonLaw, lam: float) -> float:
    """Mean of the residual horizon: E[tau] / (1 - p) - 1 / lam."""
    p = geom_param(h, lam)
    if p >= 1.0:
        raise DegenerateModelError("horizon is almost surely zero")
    return horizon_mean(h) / (1.0 - p) - 1.0 / lam


def nbu_bound(h: HorizonLaw, lam: float) -> float:
    """Geometric-approximation error bound for an NBU horizon.

    Returns 1 - E[exp(-lam tau)] (1 + lam E[tau]).  A value below -1e-14
    contradicts the NBU property and raises; values above that threshold
    are clamped at zero.
    """
    if not is_nbu(h):
        raise TagMismatchError("horizon law is not tagged NBU")
    val = 1.0 - geom_param(h, lam) * (1.0 + lam * horizon_mean(h))
    if val < -1e-14:
        raise TagMismatchError(f"bound {val} is negative: the NBU tag looks wrong")
    return max(0.0, val)


def nwu_bound(h: HorizonLaw, lam: float) -> float:
    """Geometric-approximation error bound for an NWU horizon."""
    if not is_nwu(h):
        raise TagMismatchError("horizon law is not tagged NWU")
    val = geom_param(h, lam) * (1.0 + lam * horizon_mean(h)) - 1.0
    if val < -1e-14:
        raise TagMismatchError(f"bound {val} is negative: the NWU tag looks wrong")
    return max(0.0, val)


def gamma_bound_curve(lam: float, shapes: list[float]) -> list[tuple[float, float]]:
    """|1 - (1 + lam) (1 + lam / shape)^(-shape)| over a grid of gamma shapes."""
    out = []
    for shape in shapes:
        if shape <= 0:
            raise ValueError("shape must be positive")
        out.append((shape, abs(1.0 - (1.0 + lam) * (1.0 + lam / shape) ** (-shape))))
    return out
