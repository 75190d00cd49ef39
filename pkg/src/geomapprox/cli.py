"""Command-line front end emitting reproducible CSV artifacts.

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 I/O error.  All CSVs are RFC-4180 with LF line endings, 17 significant
digits, a header row, and a leading comment row recording the truncation
budget and package version.  The default output directory is taken from
GEOMAPPROX_OUT when set.
"""

from __future__ import annotations

import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, horizon, markov, random_sums, ruin, verify
from .pmf import DEFAULT_TAIL_EPS, GeometricLaw, Pmf, geometric_pmf, tv_distance


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: Path, header: list[str], rows: list[list], eps_tail: float) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# eps_tail={eps_tail:g}, version={__version__}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _out_dir(value: str | None) -> Path:
    base = value or os.environ.get("GEOMAPPROX_OUT") or "."
    return Path(base)


def _load_pmf(path: str) -> Pmf:
    with open(path, "r", encoding="utf-8") as fh:
        return Pmf.from_dict(json.load(fh))


def handled(fn):
    """Map domain and I/O errors onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except OSError as exc:
            click.echo(f"i/o error: {exc}", err=True)
            sys.exit(3)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Geometric approximation bounds with certified exact oracles."""


@main.command("poisson-horizon")
@click.option("--family", type=click.Choice(["gamma", "uniform", "exponential"]), required=True)
@click.option("--beta", "betas", type=float, multiple=True, help="gamma shapes (unit mean)")
@click.option("--a", "a_values", type=float, multiple=True, help="uniform lower endpoints")
@click.option("--b", "b_values", type=float, multiple=True, help="uniform upper endpoints")
@click.option("--rate", "rates", type=float, multiple=True, help="exponential rates")
@click.option("--lambda", "lams", type=float, multiple=True, required=True, help="process rates")
@click.option("--eps-tail", type=float, default=DEFAULT_TAIL_EPS, show_default=True)
@click.option("--output", type=str, default=None, help="output CSV (default <out-dir>/poisson_horizon.csv)")
@click.option("--out-dir", type=str, default=None)
@handled
def cmd_poisson_horizon(family, betas, a_values, b_values, rates, lams, eps_tail, output, out_dir):
    """Geometric-approximation bound and exact tv for counts over a random horizon."""
    rows = []
    if family == "gamma":
        if not betas:
            raise click.UsageError("--beta is required for the gamma family")
        header = ["beta", "lambda", "p", "bound", "exact_tv", "slack"]
        for beta in betas:
            for lam in lams:
                h = horizon.GammaUnitMean(beta)
                p = horizon.geom_param(h, lam)
                bound = horizon.gamma_bound_curve(lam, [beta])[0][1]
                exact = tv_distance(horizon.exact_count_pmf(h, lam, eps_tail=eps_tail),
                                    geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
                rows.append([beta, lam, p, bound, exact.value, exact.slack])
    elif family == "uniform":
        if not a_values or len(a_values) != len(b_values):
            raise click.UsageError("--a and --b must be given in matching pairs")
        header = ["a", "b", "lambda", "p", "bound", "exact_tv", "slack"]
        for a, b in zip(a_values, b_values):
            for lam in lams:
                h = horizon.Uniform(a, b)
                p = horizon.geom_param(h, lam)
                bound = horizon.nbu_bound(h, lam)
                exact = tv_distance(horizon.exact_count_pmf(h, lam, eps_tail=eps_tail),
                                    geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
                rows.append([a, b, lam, p, bound, exact.value, exact.slack])
    else:
        if not rates:
            raise click.UsageError("--rate is required for the exponential family")
        header = ["rate", "lambda", "p", "bound", "exact_tv", "slack"]
        for rate in rates:
            for lam in lams:
                h = horizon.Exponential(rate)
                p = horizon.geom_param(h, lam)
                bound = horizon.nbu_bound(h, lam)
                exact = tv_distance(horizon.exact_count_pmf(h, lam, eps_tail=eps_tail),
                                    geometric_pmf(GeometricLaw(p), eps_tail=eps_tail))
                rows.append([rate, lam, p, bound, exact.value, exact.slack])
    path = Path(output) if output else _out_dir(out_dir) / "poisson_horizon.csv"
    _write_csv(path, header, rows, eps_tail)
    click.echo(f"wrote {path}")


@main.command("markov")
@click.option("--model", "model_path", type=str, required=True,
              help='JSON file {"P": [[...]], "A": [...], "F": optional, "T": optional pmf}')
@click.option("--n-max", type=int, default=None, help="series truncation (default: auto)")
@click.option("--eps-tail", type=float, default=DEFAULT_TAIL_EPS, show_default=True)
@click.option("--output", type=str, default=None)
@click.option("--out-dir", type=str, default=None)
@handled
def cmd_markov(model_path, n_max, eps_tail, output, out_dir):
    """Hitting-time bound and exact tv for a chain model file."""
    with open(model_path, "r", encoding="utf-8") as fh:
        model = markov.MarkovModel.from_dict(json.load(fh))
    report = markov.hitting_report(model, n_max=n_max, eps_tail=eps_tail)
    header = ["bound", "exact_tv", "slack", "p"]
    rows = [[report.bound, report.exact.value, report.exact.slack, report.p]]
    path = Path(output) if output else _out_dir(out_dir) / "markov.csv"
    _write_csv(path, header, rows, eps_tail)
    click.echo(f"wrote {path}")


@main.command("random-sum")
@click.option("--n-law", "n_path", type=str, required=True, help="count-law pmf JSON file")
@click.option("--x-law", "x_path", type=str, required=True, help="summand-law pmf JSON file")
@click.option("--geom-r", type=float, default=None,
              help="declare N geometric with this rate to add the mean-matched comparison")
@click.option("--eps-tail", type=float, default=DEFAULT_TAIL_EPS, show_default=True)
@click.option("--output", type=str, default=None)
@click.option("--out-dir", type=str, default=None)
@handled
def cmd_random_sum(n_path, x_path, geom_r, eps_tail, output, out_dir):
    """Geometric-approximation bound and exact tv for a random sum."""
    model = random_sums.RandomSumModel(_load_pmf(n_path), _load_pmf(x_path))
    res = random_sums.random_sum_bound(model)
    exact = random_sums.exact_sum_tv(model, eps_tail=eps_tail)
    header = ["p", "bound", "path", "exact_tv", "slack"]
    row: list = [model.p, res.bound, res.path, exact.value, exact.slack + res.slack]
    if geom_r is not None:
        if abs(model.p - geom_r) > 1e-9:
            raise ValueError(f"declared geometric rate {geom_r} does not match P(N=0) = {model.p}")
        p_prime, mm_bound = random_sums.mean_matched_geom_bound(geom_r, model.x_law)
        header += ["mean_matched_p", "mean_matched_bound"]
        row += [p_prime, mm_bound]
    path = Path(output) if output else _out_dir(out_dir) / "random_sum.csv"
    _write_csv(path, header, [row], eps_tail)
    click.echo(f"wrote {path}")


def _claims_from_options(eta_path: str | None, eta_family: str | None,
                         eps_tail: float) -> ruin.ClaimLaw:
    if (eta_path is None) == (eta_family is None):
        raise click.UsageError("give exactly one of --eta or --eta-family")
    if eta_path is not None:
        return ruin.ClaimLaw(_load_pmf(eta_path))
    family, _, args = eta_family.partition(":")
    values = [float(x) for x in args.split(",")] if args else []
    if family == "poisson":
        return ruin.poisson_claims(values[0], eps_tail)
    if family == "geom":
        return ruin.geometric_claims(values[0], eps_tail)
    if family == "negbin":
        return ruin.negbin_claims(values[0], values[1], eps_tail)
    if family == "support":
        return ruin.claims_from_probs(values)
    raise ValueError(f"unknown claim family {family!r}")


@main.command("ruin")
@click.option("--eta", "eta_path", type=str, default=None, help="claim pmf JSON file")
@click.option("--eta-family", type=str, default=None,
              help="poisson:L | geom:A | negbin:A,B | support:p0,p1,p2[,...]")
@click.option("--m-max", type=int, default=20, show_default=True)
@click.option("--mc-paths", type=int, default=0, show_default=True,
              help="add a Monte Carlo column with this many surplus paths")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--eps-tail", type=float, default=DEFAULT_TAIL_EPS, show_default=True)
@click.option("--output", type=str, default=None)
@click.option("--out-dir", type=str, default=None)
@handled
def cmd_ruin(eta_path, eta_family, m_max, mc_paths, seed, eps_tail, output, out_dir):
    """Exact ruin probabilities with both approximation brackets."""
    claims = _claims_from_options(eta_path, eta_family, eps_tail)
    reports = ruin.ruin_reports(claims, m_max)
    header = ["m", "psi_exact", "approx1", "err1", "approx2", "err2"]
    if mc_paths > 0:
        header += ["mc_estimate", "mc_stderr"]
    rows = []
    for rep in reports:
        row: list = [rep.m, rep.psi_exact, rep.approx1, rep.err1, rep.approx2, rep.err2]
        if mc_paths > 0:
            mc = ruin.monte_carlo_ruin(claims, rep.m, n_paths=mc_paths, seed=seed)
            row += [mc.estimate, mc.stderr]
        rows.append(row)
    path = Path(output) if output else _out_dir(out_dir) / "ruin.csv"
    _write_csv(path, header, rows, eps_tail)
    click.echo(f"wrote {path}")


_FIG1_SHAPES = [round(0.1 * i, 10) for i in range(1, 41)]
_FIG2_MEANS = [round(0.05 * i, 10) for i in range(0, 20)]
_FIG3_SHAPES = (0.5, 1.0, 1.5)
_FIG3_RATES = (0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0)


@main.command("figures")
@click.option("--eps-tail", type=float, default=DEFAULT_TAIL_EPS, show_default=True)
@click.option("--out-dir", type=str, default=None)
@handled
def cmd_figures(eps_tail, out_dir):
    """Deterministic CSV data for the three bound curves.

    figure1: gamma-horizon bound over shapes for lambda in {0.5, 1, 2};
    figure2: Poisson-claim bracket width over the claim mean;
    figure3: gamma-mixed claim bracket width over the mixing rate.
    """
    base = _out_dir(out_dir)
    rows1 = []
    for lam in (0.5, 1.0, 2.0):
        for beta, bound in horizon.gamma_bound_curve(lam, _FIG1_SHAPES):
            rows1.append([beta, lam, bound])
    _write_csv(base / "figure1.csv", ["beta", "lambda", "bound"], rows1, eps_tail)
    rows2 = [[lam, ruin.poisson_claim_error(lam)] for lam in _FIG2_MEANS]
    _write_csv(base / "figure2.csv", ["lambda", "error"], rows2, eps_tail)
    rows3 = []
    for alpha in _FIG3_SHAPES:
        for beta in _FIG3_RATES:
            if alpha / beta >= 1.0:
                continue
            rows3.append([alpha, beta, ruin.gamma_mixed_claim_error(alpha, beta)])
    _write_csv(base / "figure3.csv", ["alpha", "beta", "error"], rows3, eps_tail)
    click.echo(f"wrote {base / 'figure1.csv'}, {base / 'figure2.csv'}, {base / 'figure3.csv'}")


@main.command("verify")
@click.option("--ensemble", "ensemble_path", type=str, default=None,
              help="JSON list of check cases (default: built-in ensemble)")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--markov-chains", type=int, default=100, show_default=True)
@click.option("--mc-paths", type=int, default=100_000, show_default=True)
@click.option("--quiet", is_flag=True, default=False, help="print only failures and the summary")
@handled
def cmd_verify(ensemble_path, seed, markov_chains, mc_paths, quiet):
    """Run every bound-vs-oracle inequality; exit 1 on the first violation."""
    if ensemble_path is None:
        results = verify.run_default_checks(seed=seed, markov_chains=markov_chains,
                                            mc_paths=mc_paths)
    else:
        results = verify.run_ensemble_cases(verify.load_ensemble(ensemble_path))
    failures = [r for r in results if not r.ok]
    for r in results:
        if not r.ok or not quiet:
            click.echo(r.line())
    click.echo(f"{len(results) - len(failures)}/{len(results)} checks passed")
    if failures:
        click.echo(f"first violation: {failures[0].line()}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    main()
