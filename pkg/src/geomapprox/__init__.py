"""Geometric approximation of discrete laws with certified error bounds.

The package pairs every closed-form approximation bound with an exact,
truncation-certified oracle so the two can be compared mechanically:

- pmf: exact arithmetic on integer-supported laws (convolution, compounds,
  total variation with certified slack, stochastic-order checks);
- translated: bounds against a geometric convolved with a translation;
- horizon: Poisson-process counts over random horizons;
- markov: hitting times of finite ergodic chains;
- random_sums: sums of a random number of positive summands;
- ruin: compound binomial risk process and its ruin probability;
- verify: the bound-vs-oracle check ensembles behind the CLI.
"""

__version__ = "0.1.0"

from .errors import DegenerateModelError, NoContractionError, TagMismatchError, UnsupportedLawError
from .pmf import (DEFAULT_TAIL_EPS, GeometricLaw, Pmf, TvResult, compound_pmf, convolve,
                  geometric_pmf, hazard_order_vs_geometric, point_mass, poisson_pmf, shift_tv,
                  stochastically_larger, tv_distance, uniform_pmf)
from .translated import (TranslatedBoundInputs, bound_via_mean_coupling, bound_via_tv_coupling,
                         exact_translated_tv)

__all__ = [
    "DEFAULT_TAIL_EPS",
    "DegenerateModelError",
    "GeometricLaw",
    "NoContractionError",
    "Pmf",
    "TagMismatchError",
    "TranslatedBoundInputs",
    "TvResult",
    "UnsupportedLawError",
    "bound_via_mean_coupling",
    "bound_via_tv_coupling",
    "compound_pmf",
    "convolve",
    "exact_translated_tv",
    "geometric_pmf",
    "hazard_order_vs_geometric",
    "point_mass",
    "poisson_pmf",
    "shift_tv",
    "stochastically_larger",
    "tv_distance",
    "uniform_pmf",
]
