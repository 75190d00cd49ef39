"""Bounds for approximating a law by a geometric plus an independent translation.

The two combiners take precomputed ingredients (a shortfall probability, the
geometric parameter, and a coupling term) and return a certified upper bound
on the total variation distance to the translated geometric.  The exact
distance itself is available as an oracle for verification.
"""

from __future__ import annotations

from dataclasses import dataclass

from .pmf import DEFAULT_TAIL_EPS, GeometricLaw, Pmf, TvResult, convolve, geometric_pmf, tv_distance


@dataclass(frozen=True)
class TranslatedBoundInputs:
    """Ingredients for the translated-geometric combiners.

    prob_w_lt_t is P(W < T), p is P(W <= T) (the geometric parameter), and
    coupling_term is either a mean coupling distance E|W - T - V| or the
    total variation distance between W - T and V, depending on the combiner.
    """

    prob_w_lt_t: float
    p: float
    coupling_term: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.prob_w_lt_t <= 1.0:
            raise ValueError(f"shortfall probability {self.prob_w_lt_t} outside [0, 1]")
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"geometric parameter must lie in (0, 1], got {self.p}")
        if self.coupling_term < 0.0:
            raise ValueError("coupling term must be non-negative")


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def bound_via_mean_coupling(inputs: TranslatedBoundInputs) -> float:
    """P(W < T) + (1 - p) E|W - T - V|, clamped to [0, 1]."""
    return _clamp(inputs.prob_w_lt_t + (1.0 - inputs.p) * inputs.coupling_term)


def bound_via_tv_coupling(inputs: TranslatedBoundInputs) -> float:
    """P(W < T) + ((1 - p) / p) tv(W - T, V), clamped to [0, 1]."""
    return _clamp(inputs.prob_w_lt_t + (1.0 - inputs.p) / inputs.p * inputs.coupling_term)


def exact_translated_tv(w: Pmf, t: Pmf, p: float,
                        eps_tail: float = DEFAULT_TAIL_EPS) -> TvResult:
    """Exact tv distance between W and Geom(p) + T, for verification."""
    approx = convolve(geometric_pmf(GeometricLaw(p), eps_tail=eps_tail), t)
    return tv_distance(w, approx)
