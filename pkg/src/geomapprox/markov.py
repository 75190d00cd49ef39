"""Hitting times of finite ergodic Markov chains and their geometric bounds.

The hitting time of a target set from a stationary start is close to
geometric with parameter pi(A); for a general start coupled with a
stationary time the approximating law is a translated geometric.  The bound
is driven by how fast the n-step transition probabilities approach
stationarity inside the target set, certified through the Dobrushin
contraction coefficient.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NoContractionError
from .pmf import DEFAULT_TAIL_EPS, GeometricLaw, Pmf, TvResult, convolve, geometric_pmf, point_mass, tv_distance

_ROW_TOL = 1e-12


def _chain_period(adj: np.ndarray) -> int:
    """Period of a strongly connected directed graph (gcd of cycle lengths)."""
    n = adj.shape[0]
    level = np.full(n, -1)
    level[0] = 0
    queue = [0]
    g = 0
    while queue:
        u = queue.pop()
        for v in np.flatnonzero(adj[u]):
            if level[v] < 0:
                level[v] = level[u] + 1
                queue.append(int(v))
            else:
                g = math.gcd(g, level[u] + 1 - level[v])
    return abs(g) if g != 0 else 0


@dataclass(frozen=True)
class MarkovModel:
    """Ergodic chain with a hitting target and an optional translated start.

    transition is a row-stochastic matrix, target a non-empty proper subset
    of the states.  Either both start_dist and stationary_time are given (a
    start law F plus the pmf of an independent stationary time for F) or
    neither, in which case the chain is started from its stationary law.
    Ergodicity (irreducible and aperiodic) is validated at construction.
    """

    transition: np.ndarray
    target: tuple[int, ...]
    start_dist: np.ndarray | None = None
    stationary_time: Pmf | None = None

    def __post_init__(self) -> None:
        p = np.array(self.transition, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
            raise ValueError("transition matrix must be square with at least 2 states")
        if np.any(p < 0.0):
            raise ValueError("transition probabilities must be non-negative")
        if np.any(np.abs(p.sum(axis=1) - 1.0) > _ROW_TOL):
            raise ValueError(f"rows must sum to 1 within {_ROW_TOL}")
        n = p.shape[0]
        adj = p > 0.0
        ncomp, _ = connected_components(csr_matrix(adj), directed=True, connection="strong")
        if ncomp != 1:
            raise ValueError("chain is not irreducible")
        if _chain_period(adj) != 1:
            raise ValueError("chain is not aperiodic")
        tgt = tuple(sorted(set(int(i) for i in self.target)))
        if not tgt or len(tgt) >= n or any(i < 0 or i >= n for i in tgt):
            raise ValueError("target must be a non-empty proper subset of the states")
        if (self.start_dist is None) != (self.stationary_time is None):
            raise ValueError("start_dist and stationary_time must be supplied together")
        start = self.start_dist
        if start is not None:
            start = np.array(start, dtype=float)
            if start.shape != (n,) or np.any(start < 0.0) or abs(start.sum() - 1.0) > _ROW_TOL:
                raise ValueError("start_dist must be a distribution over the states")
            start.flags.writeable = False
        p.flags.writeable = False
        object.__setattr__(self, "transition", p)
        object.__setattr__(self, "target", tgt)
        object.__setattr__(self, "start_dist", start)

    @property
    def n_states(self) -> int:
        return int(self.transition.shape[0])

    @property
    def complement(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n_states) if i not in self.target)

    def to_dict(self) -> dict:
        obj: dict = {"P": self.transition.tolist(), "A": list(self.target)}
        if self.start_dist is not None:
            obj["F"] = self.start_dist.tolist()
            obj["T"] = self.stationary_time.to_dict()
        return obj

    @classmethod
    def from_dict(cls, obj: dict) -> "MarkovModel":
        start = obj.get("F")
        t = obj.get("T")
        return cls(np.asarray(obj["P"], dtype=float), tuple(obj["A"]),
                   None if start is None else np.asarray(start, dtype=float),
                   None if t is None else Pmf.from_dict(t))

    @classmethod
    def from_json(cls, text: str) -> "MarkovModel":
        return cls.from_dict(json.loads(text))


def stationary(model: MarkovModel | np.ndarray) -> np.ndarray:
    """Stationary distribution via a direct linear solve.

    Raises if the system is singular or the residual ||pi P - pi||_1
    exceeds 1e-12.
    """
    p = model.transition if isinstance(model, MarkovModel) else np.asarray(model, dtype=float)
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise ValueError("stationary system is singular (chain not ergodic?)") from exc
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.abs(pi @ p - pi).sum())
    if residual > 1e-12:
        raise ValueError(f"stationary residual {residual} exceeds 1e-12")
    return pi


def dobrushin_coefficient(p: np.ndarray) -> float:
    """Maximal total variation distance between rows."""
    return 0.5 * float(np.abs(p[:, None, :] - p[None, :, :]).sum(axis=2).max())


def contraction_certificate(p: np.ndarray, power_limit: int = 64) -> tuple[float, float, int]:
    """(C, gamma, m) with |P^n_ij - pi_j| <= C gamma^n, via Dobrushin contraction.

    Uses the one-step coefficient when it contracts, otherwise the smallest
    matrix power that does.
    """
    m_power = np.array(p, dtype=float)
    for m in range(1, power_limit + 1):
        delta = dobrushin_coefficient(m_power)
        if delta < 1.0:
            if m == 1:
                return 2.0, delta, 1
            return 2.0 / delta, delta ** (1.0 / m), m
        m_power = m_power @ p
    raise NoContractionError(f"no power of the matrix up to {power_limit} contracts")


@dataclass(frozen=True)
class MixingSeries:
    """Partial sum of the within-target stationarity gap plus a certified tail."""

    value: float
    tail_bound: float
    n_max: int

    @property
    def total(self) -> float:
        return self.value + self.tail_bound


def mixing_deviation_series(model: MarkovModel, n_max: int | None = None,
                            tail_target: float = 1e-12,
                            power_limit: int = 64,
                            n_cap: int = 200_000) -> MixingSeries:
    """sum_{n>=1} sum_{i,j in A} pi_i |P^n_ij - pi_j|, truncated with a tail bound.

    The tail is bounded by pi(A) |A| C gamma^(n_max + 1) / (1 - gamma) using
    the contraction certificate, so value + tail_bound is a valid upper
    bound on the infinite series for every n_max.
    """
    p = model.transition
    pi = stationary(model)
    a = list(model.target)
    c, gamma, _ = contraction_certificate(p, power_limit)
    prefactor = float(pi[a].sum()) * len(a) * c
    if n_max is None:
        if gamma == 0.0 or prefactor == 0.0:
            n_max = 1
        else:
            needed = (math.log(tail_target * (1.0 - gamma)) - math.log(prefactor)) / math.log(gamma) - 1.0
            n_max = min(n_cap, max(1, math.ceil(needed)))
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    value = 0.0
    power = np.array(p)
    pi_a = pi[a]
    for n in range(1, n_max + 1):
        if n > 1:
            power = power @ p
        dev = np.abs(power[np.ix_(a, a)] - pi[a][None, :]).sum(axis=1)
        value += float(pi_a @ dev)
    tail = prefactor * gamma ** (n_max + 1) / (1.0 - gamma) if gamma > 0.0 else 0.0
    return MixingSeries(value, tail, n_max)


def hitting_time_pmf(model: MarkovModel, start: np.ndarray | None = None,
                     horizon: int | None = None,
                     eps_tail: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Exact law of the first time the chain sits in the target set.

    Computed by propagating the start mass through the chain restricted to
    the complement of the target; the remaining mass after the last step is
    recorded as the (exact) tail.  With no explicit horizon the support is
    extended until the tail drops below eps_tail.
    """
    p = model.transition
    a = list(model.target)
    ac = list(model.complement)
    if start is None:
        start = model.start_dist if model.start_dist is not None else stationary(model)
    start = np.asarray(start, dtype=float)
    exit_mass = p[np.ix_(ac, a)].sum(axis=1)
    q = p[np.ix_(ac, ac)]
    probs = [float(start[a].sum())]
    u = start[ac].copy()
    if horizon is not None:
        for _ in range(horizon):
            probs.append(float(u @ exit_mass))
            u = u @ q
    else:
        rho = max(np.abs(np.linalg.eigvals(q))) if q.size else 0.0
        if rho >= 1.0 - 1e-13:
            cap = 10_000_000
        else:
            cap = int(math.log(max(eps_tail, 1e-300)) / math.log(max(rho, 1e-300))) * 2 + 1000
        k = 0
        while u.sum() > eps_tail and k < cap:
            probs.append(float(u @ exit_mass))
            u = u @ q
            k += 1
    return Pmf(np.asarray(probs), float(u.sum()))


def _translation_terms(w: Pmf, t: Pmf) -> tuple[float, float]:
    """(P(W < T) upper estimate, P(W <= T) lower estimate) for independent W, T.

    Tail mass of T is charged fully to the shortfall probability and not at
    all to p, so the bound built from these is conservative.
    """
    cdf = w.cdf()
    nw = len(w)
    p_lt = t.tail_mass
    p_le = 0.0
    for tv_, weight in enumerate(t.probs):
        if weight == 0.0:
            continue
        below = 0.0 if tv_ == 0 else (cdf[tv_ - 1] if tv_ - 1 < nw else 1.0)
        at_or_below = cdf[tv_] if tv_ < nw else 1.0 - w.tail_mass
        p_lt += weight * below
        p_le += weight * at_or_below
    return min(1.0, p_lt), min(1.0, p_le)


@dataclass(frozen=True)
class HittingReport:
    """Bound and oracle output for one hitting-time model."""

    bound: float
    p: float
    prob_w_lt_t: float
    series: MixingSeries
    exact: TvResult | None


def hitting_time_bound(model: MarkovModel, n_max: int | None = None) -> float:
    """Upper bound on tv(L(W), L(Geom(p) + T)), clamped to [0, 1].

    For the stationary start (T = 0) the mixing-series step is guaranteed and
    the value is a certified bound.  For a supplied translation time the same
    formula is evaluated, but an independent translation time does not in
    general admit the series step; validate such models against the exact
    oracle (hitting_report.exact) before trusting the number.
    """
    return hitting_report(model, n_max=n_max, with_exact=False).bound


def hitting_report(model: MarkovModel, n_max: int | None = None,
                   eps_tail: float = DEFAULT_TAIL_EPS,
                   with_exact: bool = True) -> HittingReport:
    pi = stationary(model)
    a = list(model.target)
    pi_a = float(pi[a].sum())
    pi_ac = 1.0 - pi_a
    series = mixing_deviation_series(model, n_max=n_max)
    if model.start_dist is None:
        p = pi_a
        p_lt = 0.0
        w = hitting_time_pmf(model, eps_tail=eps_tail) if with_exact else None
        t = point_mass(0)
    else:
        w = hitting_time_pmf(model, eps_tail=eps_tail)
        t = model.stationary_time
        p_lt, p = _translation_terms(w, t)
    if p <= 0.0:
        bound = 1.0
    else:
        bound = p_lt + (1.0 - p) / (p * pi_ac) * series.total
        bound = min(1.0, max(0.0, bound))
    exact = None
    if with_exact and p > 0.0:
        approx = convolve(geometric_pmf(GeometricLaw(p), eps_tail=eps_tail), t)
        exact = tv_distance(w, approx)
    return HittingReport(bound, p, p_lt, series, exact)
