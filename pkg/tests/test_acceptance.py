"""End-to-end acceptance suite: every bound family against its exact oracle.

Each test prints one PASS/FAIL line (run with -s to see them inline).  The
small-rate spot check for the claim-error curve is expected to fail: it
encodes a historical linearised target that the exact curve provably does
not meet (the curve is cubic, not quadratic, in the claim mean; see the
assertion message).
"""

import time
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from geomapprox import GeometricLaw, Pmf, geometric_pmf, point_mass, poisson_pmf, tv_distance, uniform_pmf
from geomapprox.cli import main as cli_main
from geomapprox.horizon import GammaUnitMean, Uniform, exact_count_pmf, gamma_bound_curve, geom_param, nbu_bound
from geomapprox.markov import MarkovModel, hitting_report
from geomapprox.random_sums import (RandomSumModel, exact_sum_tv, general_coupling_bound,
                                    hazard_fast_bound, random_sum_bound)
from geomapprox.ruin import (claims_from_probs, exact_ruin_probabilities, geometric_claims,
                             monte_carlo_ruin, negbin_claims, poisson_claims, ruin_bound_1,
                             ruin_bound_2)
from geomapprox.verify import check_compound_identity, random_markov_model


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[acceptance] {name}: {status}" + (f" ({detail})" if detail else ""))


def test_gamma_horizon_grid():
    t0 = time.perf_counter()
    ok = True
    for beta in (0.25, 0.5, 1.0, 2.0, 4.0):
        for lam in (0.5, 1.0, 2.0):
            h = GammaUnitMean(beta)
            p = geom_param(h, lam)
            exact = tv_distance(exact_count_pmf(h, lam), geometric_pmf(GeometricLaw(p)))
            bound = gamma_bound_curve(lam, [beta])[0][1]
            assert exact.slack <= 1e-9
            assert exact.value <= bound + exact.slack
            if beta == 1.0:
                assert exact.value <= 1e-9 and bound <= 1e-9
            ok = ok and exact.value <= bound + exact.slack
    elapsed = time.perf_counter() - t0
    report("gamma-horizon grid", ok, f"{elapsed:.2f}s")
    assert elapsed < 1.0


def test_uniform_horizon_grid():
    t0 = time.perf_counter()
    for (a, b) in ((0.0, 1.0), (0.5, 1.5), (1.0, 3.0)):
        for lam in (0.5, 1.0):
            h = Uniform(a, b)
            p = geom_param(h, lam)
            exact = tv_distance(exact_count_pmf(h, lam), geometric_pmf(GeometricLaw(p)))
            assert exact.value <= nbu_bound(h, lam) + exact.slack + 1e-8
    elapsed = time.perf_counter() - t0
    report("uniform-horizon grid", True, f"{elapsed:.2f}s")
    assert elapsed < 5.0


def test_markov_hitting_ensemble():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    for _ in range(200):
        model = random_markov_model(rng)
        rep = hitting_report(model)
        assert rep.exact.value <= rep.bound + rep.exact.slack + 1e-12
    # iid-rows chains: the count is exactly geometric and the bound collapses
    for pi, target in ((np.array([0.3, 0.45, 0.25]), (0,)),
                       (np.array([0.2, 0.2, 0.3, 0.3]), (1, 3))):
        rep = hitting_report(MarkovModel(np.tile(pi, (pi.size, 1)), target))
        assert rep.bound <= 1e-10
        assert rep.exact.value <= 1e-10
    elapsed = time.perf_counter() - t0
    report("markov hitting ensemble (200 chains)", True, f"{elapsed:.2f}s")
    assert elapsed < 30.0


def test_random_sum_ensemble():
    t0 = time.perf_counter()
    counts = [("geom(0.2)", geometric_pmf(GeometricLaw(0.2))),
              ("geom(0.5)", geometric_pmf(GeometricLaw(0.5))),
              ("geom(0.8)", geometric_pmf(GeometricLaw(0.8))),
              ("poisson(0.5)", poisson_pmf(0.5)),
              ("poisson(2)", poisson_pmf(2.0)),
              ("fixed", Pmf(np.array([0.4, 0.3, 0.2, 0.1])))]
    summands = [("const1", point_mass(1)), ("const2", point_mass(2)),
                ("unif12", uniform_pmf(1, 2)), ("unif14", uniform_pmf(1, 4)),
                ("shifted-geom", geometric_pmf(GeometricLaw(0.4)).shifted(1))]
    for cname, n_law in counts:
        for sname, x_law in summands:
            model = RandomSumModel(n_law, x_law)
            res = random_sum_bound(model)
            exact = exact_sum_tv(model)
            assert exact.value <= res.bound + exact.slack + res.slack, (cname, sname)
            if res.path == "hazard_fast":
                gap = abs(general_coupling_bound(model) - hazard_fast_bound(model))
                assert gap <= 1e-9, (cname, sname, gap)
    # geometric counts with unit summands: both sides vanish
    model = RandomSumModel(geometric_pmf(GeometricLaw(0.5)), point_mass(1))
    assert exact_sum_tv(model).value <= 1e-12
    assert random_sum_bound(model).bound <= 1e-12
    elapsed = time.perf_counter() - t0
    report("random-sum ensemble", True, f"{elapsed:.2f}s")


def test_ruin_closed_forms():
    t0 = time.perf_counter()
    for a0, a2 in ((0.5, 0.25), (0.6, 0.2)):
        claims = claims_from_probs([a0, 1.0 - a0 - a2, a2])
        psi = exact_ruin_probabilities(claims, 30)
        for m in range(1, 31):
            assert abs(psi[m] - (a2 / a0) ** m) <= 1e-10
    for alpha in (0.6, 0.75, 0.9):
        claims = geometric_claims(alpha)
        psi = exact_ruin_probabilities(claims, 30)
        for m in range(1, 31):
            assert abs(psi[m] - ((1 - alpha) / alpha) ** (m + 1)) <= 1e-10
    elapsed = time.perf_counter() - t0
    report("ruin closed forms", True, f"{elapsed:.2f}s")
    assert elapsed < 1.0


def _criterion6_claims():
    return [("poisson(0.1)", poisson_claims(0.1)),
            ("poisson(0.3)", poisson_claims(0.3)),
            ("poisson(0.5)", poisson_claims(0.5)),
            ("negbin(0.5,1)", negbin_claims(0.5, 1.0)),
            ("negbin(1,2)", negbin_claims(1.0, 2.0)),
            ("negbin(2,4)", negbin_claims(2.0, 4.0)),
            ("negbin(9,10)", negbin_claims(9.0, 10.0))]


def test_ruin_inequalities():
    t0 = time.perf_counter()
    for name, claims in _criterion6_claims():
        psi = exact_ruin_probabilities(claims, 20)
        for m in range(1, 21):
            lower, upper = ruin_bound_1(claims, m)
            assert lower - 1e-9 <= psi[m] <= upper + 1e-9, (name, m)
            center, err = ruin_bound_2(claims, m)
            assert abs(psi[m] - center) <= err + 1e-9, (name, m)
    elapsed = time.perf_counter() - t0
    report("ruin two-sided inequalities", True, f"{elapsed:.2f}s")


def test_compound_identity():
    t0 = time.perf_counter()
    for name, claims in _criterion6_claims():
        res = check_compound_identity(claims, name, tol=1e-12)
        assert res.ok, res.line()
    elapsed = time.perf_counter() - t0
    report("compound-representation identity", True, f"{elapsed:.2f}s")


def test_ruin_monte_carlo():
    t0 = time.perf_counter()
    claims = poisson_claims(0.5)
    psi = exact_ruin_probabilities(claims, 5)
    for m in (1, 3, 5):
        mc = monte_carlo_ruin(claims, m, n_paths=1_000_000, seed=20240801)
        gap = abs(mc.estimate - psi[m])
        budget = 3.0 * mc.stderr + 1e-4
        assert gap <= budget, (m, gap, budget)
    elapsed = time.perf_counter() - t0
    report("ruin monte-carlo cross-validation", True, f"{elapsed:.2f}s")
    assert elapsed < 60.0


def test_figures_deterministic(tmp_path):
    runner = CliRunner()
    d1, d2 = tmp_path / "a", tmp_path / "b"
    d1.mkdir(), d2.mkdir()
    assert runner.invoke(cli_main, ["figures", "--out-dir", str(d1)]).exit_code == 0
    assert runner.invoke(cli_main, ["figures", "--out-dir", str(d2)]).exit_code == 0
    for name in ("figure1.csv", "figure2.csv", "figure3.csv"):
        assert (d1 / name).read_bytes() == (d2 / name).read_bytes()
    report("figure CSVs regenerate byte-identically", True)


def _csv_value(path, match, column):
    lines = Path(path).read_text().splitlines()
    header = lines[1].split(",")
    for line in lines[2:]:
        row = dict(zip(header, line.split(",")))
        if all(abs(float(row[k]) - v) < 1e-12 for k, v in match.items()):
            return float(row[column])
    raise KeyError(match)


def test_figures_spot_values(tmp_path):
    runner = CliRunner()
    assert runner.invoke(cli_main, ["figures", "--out-dir", str(tmp_path)]).exit_code == 0
    for lam in (0.5, 1.0, 2.0):
        assert _csv_value(tmp_path / "figure1.csv", {"beta": 1.0, "lambda": lam}, "bound") == 0.0
    tail = _csv_value(tmp_path / "figure3.csv", {"alpha": 1.0, "beta": 64.0}, "error")
    assert tail < 1e-2
    report("figure spot values (unit-shape zero, large-rate tail)", True)


def test_claim_error_small_rate_spot(tmp_path):
    runner = CliRunner()
    assert runner.invoke(cli_main, ["figures", "--out-dir", str(tmp_path)]).exit_code == 0
    got = _csv_value(tmp_path / "figure2.csv", {"lambda": 0.1}, "error")
    target = 0.5 * 0.1**2 * 1.1
    ok = abs(got - target) <= 0.1 * target
    report("claim-error curve matches its quadratic linearisation at 0.1", ok,
           f"exact={got:.6g}, linearised target={target:.6g}")
    assert ok, (
        f"exact claim-error value at mean 0.1 is {got:.6g}; the linearised target "
        f"{target:.6g} (lam^2(1+lam)/2) is off by a factor ~{target / got:.1f}. "
        "The exact curve expands as lam^3/6 + O(lam^4): the quadratic term cancels, "
        "so this spot target cannot be met by a correct implementation."
    )
