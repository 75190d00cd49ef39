"""End-to-end inequality checks pairing every bound with its exact oracle.

Each check compares a theorem-style upper bound against an exactly computed
total variation distance (or a closed form / independent simulation) and
reports a named pass/fail record.  The default ensemble covers all the
bound families in the package; a JSON ensemble file can replace it, and a
case may carry a ``bound_scale`` factor to deliberately corrupt the bound
(used to self-test the harness).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import horizon, markov, random_sums, ruin
from .pmf import (DEFAULT_TAIL_EPS, GeometricLaw, Pmf, convolve, geometric_pmf, point_mass,
                  poisson_pmf, tv_distance, uniform_pmf)

_GUARD = 1e-12


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    lhs: float
    rhs: float
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: {self.lhs:.6g} <= {self.rhs:.6g}{extra}"


def _dominates(name: str, value: float, bound: float, slack: float, detail: str = "") -> CheckResult:
    rhs = bound + slack + _GUARD
    return CheckResult(name, value <= rhs, value, rhs, detail)


def check_gamma_horizon(beta: float, lam: float, bound_scale: float = 1.0,
                        eps_tail: float = DEFAULT_TAIL_EPS) -> CheckResult:
    h = horizon.GammaUnitMean(beta)
    p = horizon.geom_param(h, lam)
    bound = horizon.gamma_bound_curve(lam, [beta])[0][1] * bound_scale
    exact = tv_distance(horizon.exact_count_pmf(h, lam, eps_tail=eps_tail),
                        geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
    return _dominates(f"gamma-horizon beta={beta} lam={lam}", exact.value, bound, exact.slack)


def check_uniform_horizon(a: float, b: float, lam: float, bound_scale: float = 1.0,
                          eps_tail: float = DEFAULT_TAIL_EPS) -> CheckResult:
    h = horizon.Uniform(a, b)
    p = horizon.geom_param(h, lam)
    bound = horizon.nbu_bound(h, lam) * bound_scale
    exact = tv_distance(horizon.exact_count_pmf(h, lam, eps_tail=eps_tail),
                        geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
    # quadrature error per entry is 1e-13; budget it alongside the tail slack
    return _dominates(f"uniform-horizon a={a} b={b} lam={lam}", exact.value, bound,
                      exact.slack + 1e-10)


def check_markov_model(model: markov.MarkovModel, name: str,
                       bound_scale: float = 1.0) -> CheckResult:
    report = markov.hitting_report(model)
    return _dominates(name, report.exact.value, report.bound * bound_scale, report.exact.slack,
                      detail=f"p={report.p:.4g}")


def random_markov_model(rng: np.random.Generator, n_states: int | None = None,
                        translated: bool = False) -> markov.MarkovModel:
    """Random ergodic chain (strictly positive rows) with a random proper target."""
    n = int(n_states if n_states is not None else rng.integers(3, 7))
    p = rng.dirichlet(np.ones(n) * rng.uniform(0.5, 3.0), size=n)
    k = int(rng.integers(1, n))
    target = tuple(rng.choice(n, size=k, replace=False))
    if not translated:
        return markov.MarkovModel(p, target)
    # started from the stationary law, any independent time is a stationary time
    pi = markov.stationary(p)
    t_len = int(rng.integers(1, 4))
    weights = rng.dirichlet(np.ones(t_len + 1))
    return markov.MarkovModel(p, target, pi, Pmf(weights))


def check_markov_ensemble(n_chains: int, seed: int) -> list[CheckResult]:
    """Stationary-start chains only: that is the regime where the mixing-series
    bound is established (a translated time in general is not covered by it;
    see the markov module notes)."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_chains):
        model = random_markov_model(rng)
        out.append(check_markov_model(model, f"markov[{i}] stationary n={model.n_states}"))
    return out


def default_random_sum_models() -> list[tuple[str, random_sums.RandomSumModel]]:
    n_laws = [
        ("geom(0.2)", geometric_pmf(GeometricLaw(0.2))),
        ("geom(0.5)", geometric_pmf(GeometricLaw(0.5))),
        ("geom(0.8)", geometric_pmf(GeometricLaw(0.8))),
        ("poisson(0.5)", poisson_pmf(0.5)),
        ("poisson(2)", poisson_pmf(2.0)),
        ("fixed{0..3}", Pmf(np.asarray([0.4, 0.3, 0.2, 0.1]))),
    ]
    x_laws = [
        ("const1", point_mass(1)),
        ("const2", point_mass(2)),
        ("unif{1,2}", uniform_pmf(1, 2)),
        ("unif{1..4}", uniform_pmf(1, 4)),
        ("1+geom(0.4)", geometric_pmf(GeometricLaw(0.4)).shifted(1)),
    ]
    out = []
    for n_name, n_law in n_laws:
        for x_name, x_law in x_laws:
            out.append((f"N={n_name} X={x_name}", random_sums.RandomSumModel(n_law, x_law)))
    return out


def check_random_sum(model: random_sums.RandomSumModel, name: str,
                     bound_scale: float = 1.0) -> CheckResult:
    res = random_sums.random_sum_bound(model)
    exact = random_sums.exact_sum_tv(model)
    return _dominates(f"random-sum {name}", exact.value, res.bound * bound_scale,
                      exact.slack + res.slack, detail=res.path)


def default_claim_laws() -> list[tuple[str, ruin.ClaimLaw]]:
    return [
        ("two-point{0,2}", ruin.claims_from_probs([0.7, 0.0, 0.3])),
        ("support{0,1,2}(0.5,0.25)", ruin.claims_from_probs([0.5, 0.25, 0.25])),
        ("support{0,1,2}(0.6,0.2)", ruin.claims_from_probs([0.6, 0.2, 0.2])),
        ("geom(0.6)", ruin.geometric_claims(0.6)),
        ("geom(0.75)", ruin.geometric_claims(0.75)),
        ("geom(0.9)", ruin.geometric_claims(0.9)),
        ("poisson(0.1)", ruin.poisson_claims(0.1)),
        ("poisson(0.3)", ruin.poisson_claims(0.3)),
        ("poisson(0.5)", ruin.poisson_claims(0.5)),
        ("negbin(0.5,1)", ruin.negbin_claims(0.5, 1.0)),
        ("negbin(1,2)", ruin.negbin_claims(1.0, 2.0)),
        ("negbin(2,4)", ruin.negbin_claims(2.0, 4.0)),
        ("negbin(9,10)", ruin.negbin_claims(9.0, 10.0)),
    ]


def geometric_compound_via_mixture(rate: float, part_law: Pmf,
                                   eps_tail: float = DEFAULT_TAIL_EPS) -> Pmf:
    """Mixture-of-convolution-powers compound of Geom(rate) over an arbitrary law.

    Unlike compound_pmf this accepts summands with mass at zero; used as the
    independent route when checking the two compound representations agree.
    """
    counts = geometric_pmf(GeometricLaw(rate), eps_tail=eps_tail)
    out = np.zeros((len(counts) - 1) * max(1, len(part_law) - 1) + 1)
    power = np.ones(1)
    out[0] = counts.probs[0]
    for n in range(1, len(counts)):
        power = np.convolve(power, part_law.probs)
        out[: power.size] += counts.probs[n] * power
    return Pmf(out, max(0.0, 1.0 - float(out.sum())))


def check_compound_identity(claims: ruin.ClaimLaw, name: str,
                            tol: float = 1e-12) -> CheckResult:
    """The Geom(1-q)-over-ladder and Geom(r)-over-positive-ladder compounds agree."""
    via_ladder = geometric_compound_via_mixture(1.0 - claims.mean, ruin.ladder_pmf(claims),
                                                eps_tail=1e-15)
    r = ruin.pk_geometric_rate(claims)
    x = ruin.conditioned_claim_pmf(claims)
    via_positive = geometric_compound_via_mixture(r, x, eps_tail=1e-15)
    n = min(len(via_ladder), len(via_positive))
    diff = float(np.max(np.abs(via_ladder.probs[:n] - via_positive.probs[:n])))
    return CheckResult(f"compound-identity {name}", diff <= tol, diff, tol)


def check_ruin_brackets(claims: ruin.ClaimLaw, name: str, m_max: int = 30,
                        slack: float = 1e-9, bound_scale: float = 1.0) -> list[CheckResult]:
    psi = ruin.exact_ruin_probabilities(claims, m_max)
    out = []
    worst_low = worst_high = worst_center = 0.0
    for m in range(1, m_max + 1):
        lower, upper = ruin.ruin_bound_1(claims, m)
        center, err = ruin.ruin_bound_2(claims, m)
        worst_low = max(worst_low, lower * bound_scale - psi[m])
        worst_high = max(worst_high, psi[m] - upper * bound_scale)
        worst_center = max(worst_center, abs(psi[m] - center) - err * bound_scale)
    out.append(CheckResult(f"ruin-lower {name}", worst_low <= slack, worst_low, slack))
    out.append(CheckResult(f"ruin-upper {name}", worst_high <= slack, worst_high, slack))
    out.append(CheckResult(f"ruin-center {name}", worst_center <= slack, worst_center, slack))
    return out


def check_ruin_monte_carlo(claims: ruin.ClaimLaw, name: str, levels: tuple[int, ...],
                           n_paths: int, seed: int) -> list[CheckResult]:
    psi = ruin.exact_ruin_probabilities(claims, max(levels))
    out = []
    for m in levels:
        mc = ruin.monte_carlo_ruin(claims, m, n_paths=n_paths, seed=seed)
        gap = abs(mc.estimate - psi[m])
        budget = 3.0 * mc.stderr + mc.residual_bound
        out.append(CheckResult(f"ruin-mc {name} m={m}", gap <= budget, gap, budget,
                               detail=f"mc={mc.estimate:.6g} exact={psi[m]:.6g}"))
    return out


def run_default_checks(seed: int = 0, markov_chains: int = 100,
                       mc_paths: int = 100_000) -> list[CheckResult]:
    out: list[CheckResult] = []
    for beta in (0.25, 0.5, 1.0, 2.0, 4.0):
        for lam in (0.5, 1.0, 2.0):
            out.append(check_gamma_horizon(beta, lam))
    for (a, b) in ((0.0, 1.0), (0.5, 1.5), (1.0, 3.0)):
        for lam in (0.5, 1.0):
            out.append(check_uniform_horizon(a, b, lam))
    out.extend(check_markov_ensemble(markov_chains, seed))
    for name, model in default_random_sum_models():
        out.append(check_random_sum(model, name))
    for name, claims in default_claim_laws():
        out.extend(check_ruin_brackets(claims, name))
        if not claims.is_degenerate():
            out.append(check_compound_identity(claims, name))
    if mc_paths > 0:
        out.extend(check_ruin_monte_carlo(ruin.poisson_claims(0.5), "poisson(0.5)",
                                          (1, 3, 5), mc_paths, seed))
    return out


def _claims_from_spec(spec: str | dict) -> ruin.ClaimLaw:
    if isinstance(spec, dict):
        return ruin.claims_from_probs(spec["probs"], float(spec.get("tail_mass", 0.0)))
    family, _, args = spec.partition(":")
    values = [float(x) for x in args.split(",")] if args else []
    if family == "poisson":
        return ruin.poisson_claims(values[0])
    if family == "geom":
        return ruin.geometric_claims(values[0])
    if family == "negbin":
        return ruin.negbin_claims(values[0], values[1])
    if family == "support":
        return ruin.claims_from_probs(values)
    raise ValueError(f"unknown claim family {family!r}")


def run_ensemble_cases(cases: list[dict]) -> list[CheckResult]:
    """Run checks described by a JSON ensemble (see README for the schema)."""
    if not cases:
        raise ValueError("ensemble is empty: nothing to verify")
    out: list[CheckResult] = []
    for idx, case in enumerate(cases):
        kind = case.get("kind")
        scale = float(case.get("bound_scale", 1.0))
        if kind == "gamma_horizon":
            out.append(check_gamma_horizon(float(case["beta"]), float(case["lambda"]), scale))
        elif kind == "uniform_horizon":
            out.append(check_uniform_horizon(float(case["a"]), float(case["b"]),
                                             float(case["lambda"]), scale))
        elif kind == "markov":
            model = markov.MarkovModel.from_dict(case["model"])
            out.append(check_markov_model(model, f"markov[case {idx}]", scale))
        elif kind == "random_sum":
            model = random_sums.RandomSumModel(Pmf.from_dict(case["n_law"]),
                                               Pmf.from_dict(case["x_law"]))
            out.append(check_random_sum(model, f"[case {idx}]", scale))
        elif kind == "ruin":
            claims = _claims_from_spec(case["eta"])
            out.extend(check_ruin_brackets(claims, f"[case {idx}]",
                                           int(case.get("m_max", 20)), bound_scale=scale))
        else:
            raise ValueError(f"unknown ensemble kind {kind!r} in case {idx}")
    return out


def load_ensemble(path: str) -> list[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        cases = json.load(fh)
    if not isinstance(cases, list):
        raise ValueError("ensemble file must hold a JSON list of cases")
    return cases
