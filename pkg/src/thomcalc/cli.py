"""Command-line surface.

Every command honors --format text|json and --seed.  Text mode prints
closed classes with the background symbol c_0 suppressed; JSON keeps it so
the structural invariants stay machine-checkable.  Exit codes: 0 success,
1 computation failure, 2 usage error.
"""

import functools
import json
import random
import sys

import click

from .errors import CalcError
from .multidegree import PolynomialIdeal, WeightedRing, multidegree, toric_localization_example
from .partitions import deg_qhat, dim_normal_model, dim_orbit, enumerate_admissible
from .poly import LinearForm, Polynomial, cvar, yvar
from .residue import ResidueProblem, TruncationPolicy, iterated_residue
from .thom import (
    DEFAULT_SEED,
    QhatRegistry,
    positivity_expansion,
    thom_polynomial,
    thom_series_view,
)
from .verify import SUITES, run_suite


def _common(fn):
    fn = click.option(
        "--seed",
        type=int,
        default=DEFAULT_SEED,
        show_default=True,
        help="Seed for randomized checks; 0 draws fresh entropy.",
    )(fn)
    fn = click.option(
        "--format",
        "fmt",
        type=click.Choice(["text", "json"]),
        default="text",
        show_default=True,
        help="Output format.",
    )(fn)
    return fn


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except CalcError as err:
            raise click.ClickException(str(err))

    return wrapper


def _resolve_seed(seed: int) -> int:
    if seed == 0:
        return random.SystemRandom().randrange(1, 2**31)
    return seed


def _echo_json(obj):
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


def _fraction_text(q) -> str:
    return f"{q.numerator}/{q.denominator}"


@click.group()
def main():
    """Exact calculator for closed classes of higher-order contact loci."""


@main.command("tp")
@click.option("--d", "order", type=int, required=True, help="Singularity order.")
@click.option("--codim", type=int, required=True, help="Codimension shift parameter.")
@click.option(
    "--basis",
    type=click.Choice(["chern", "thom-series"]),
    default="chern",
    show_default=True,
    help="Chern symbols, or the recentered series view.",
)
@click.option(
    "--qhat-file",
    type=str,
    default=None,
    help="Register a numerator plugin from a JSON file before computing.",
)
@_common
@_guard
def tp_command(order, codim, basis, qhat_file, fmt, seed):
    """Compute one closed class."""
    if order < 1:
        raise click.BadParameter("--d must be at least 1")
    if codim < 0:
        raise click.BadParameter("--codim must be nonnegative")
    registry = None
    if qhat_file:
        registry = QhatRegistry()
        registry.load_file(qhat_file)
    result = thom_polynomial(order, codim, registry)
    if basis == "thom-series":
        body = thom_series_view(result)
        if fmt == "text":
            click.echo(body.to_text())
        else:
            _echo_json(
                {
                    "d": order,
                    "codim": codim,
                    "basis": "thom-series",
                    "polynomial": body.to_json_dict(),
                }
            )
    else:
        if fmt == "text":
            click.echo(result.to_text())
        else:
            _echo_json(dict(result.to_json_dict(), basis="chern"))


@main.command("residue")
@click.option(
    "--problem",
    "problem_path",
    type=str,
    required=True,
    help="JSON file describing the integrand.",
)
@click.option(
    "--order",
    type=int,
    default=None,
    help="Truncation order override; omitted means the built-in heuristic.",
)
@_common
@_guard
def residue_command(problem_path, order, fmt, seed):
    """Iterated residue at infinity of a stored integrand."""
    try:
        with open(problem_path) as handle:
            obj = json.load(handle)
        problem = ResidueProblem.from_json_dict(obj)
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise click.ClickException(f"cannot read problem file {problem_path}: {err}")
    policy = TruncationPolicy(base_order=order) if order is not None else None
    result = iterated_residue(problem, policy)
    if fmt == "text":
        # same display rule as closed classes: background symbol suppressed
        shown = result.substitute({cvar(0): Polynomial.one()})
        click.echo(shown.to_text())
    else:
        _echo_json({"residue": result.to_json_dict()})


@main.command("mdeg")
@click.option(
    "--ideal-file",
    type=str,
    default=None,
    help="JSON file with generators, weights, and an optional variable order.",
)
@click.option(
    "--example",
    type=click.Choice(["toric"]),
    default=None,
    help="Run a stored worked example instead of reading a file.",
)
@_common
@_guard
def mdeg_command(ideal_file, example, fmt, seed):
    """Multidegree of a weighted polynomial ideal."""
    if (ideal_file is None) == (example is None):
        raise click.UsageError("provide exactly one of --ideal-file or --example")
    if example == "toric":
        report = toric_localization_example()
        if fmt == "text":
            click.echo(f"localization: {report.localization_sum.to_text()}")
            click.echo(f"two-term: {report.two_term_sum.to_text()}")
            click.echo(f"groebner: {report.groebner_route.to_text()}")
            click.echo(f"expected: {report.expected.to_text()}")
            click.echo(f"agree: {str(report.agree).lower()}")
        else:
            _echo_json(
                {
                    "localization": report.localization_sum.to_text(),
                    "two_term": report.two_term_sum.to_text(),
                    "groebner": report.groebner_route.to_text(),
                    "expected": report.expected.to_text(),
                    "agree": report.agree,
                }
            )
        return
    try:
        with open(ideal_file) as handle:
            obj = json.load(handle)
        generators = [Polynomial.from_json_dict(g) for g in obj["generators"]]
        weights = tuple(LinearForm.from_json_dict(w) for w in obj["weights"])
        order = None
        if obj.get("order"):
            order = tuple(yvar(i) for i in obj["order"])
    except (OSError, ValueError, KeyError, TypeError) as err:
        raise click.ClickException(f"cannot read ideal file {ideal_file}: {err}")
    ideal = PolynomialIdeal.of(generators, order=order)
    ring = WeightedRing(weights=weights)
    result = multidegree(ideal, ring)
    if fmt == "text":
        click.echo(result.to_text())
    else:
        _echo_json({"multidegree": result.to_json_dict()})


@main.command("partitions")
@click.option("--d", "depth", type=int, required=True, help="Sequence depth.")
@click.option(
    "--complete-only",
    is_flag=True,
    help="Keep only sequences closed under taking sub-multisets.",
)
@_common
@_guard
def partitions_command(depth, complete_only, fmt, seed):
    """Admissible partition sequences and dimension bookkeeping."""
    if depth < 1:
        raise click.BadParameter("--d must be at least 1")
    sequences = enumerate_admissible(depth, complete_only=complete_only)
    if fmt == "text":
        label = "complete" if complete_only else "admissible"
        click.echo(f"depth {depth}: {len(sequences)} {label} sequences")
        for seq in sequences:
            click.echo(f"  {seq.to_text()}")
        click.echo(
            f"orbit dimension {dim_orbit(depth)}, "
            f"model dimension {dim_normal_model(depth)}, "
            f"numerator degree {deg_qhat(depth)}"
        )
    else:
        _echo_json(
            {
                "d": depth,
                "complete_only": complete_only,
                "count": len(sequences),
                "sequences": [seq.to_text() for seq in sequences],
                "orbit_dimension": dim_orbit(depth),
                "model_dimension": dim_normal_model(depth),
                "numerator_degree": deg_qhat(depth),
            }
        )


@main.command("verify")
@click.option(
    "--suite",
    type=click.Choice(list(SUITES) + ["all"]),
    default="all",
    show_default=True,
)
@_common
@_guard
def verify_command(suite, fmt, seed):
    """Run a named check suite; exits 0 only when every check passes."""
    report = run_suite(suite, _resolve_seed(seed))
    if fmt == "text":
        click.echo(report.to_text())
    else:
        _echo_json(report.to_json_dict())
    if not report.all_passed:
        sys.exit(1)


@main.command("positivity")
@click.option("--d", "order", type=int, required=True, help="Singularity order.")
@click.option(
    "--order",
    "total_order",
    type=int,
    default=12,
    show_default=True,
    help="Total degree bound for the ratio expansion.",
)
@_common
@_guard
def positivity_command(order, total_order, fmt, seed):
    """Laurent expansion of the residue fraction in ratio coordinates."""
    if order < 1:
        raise click.BadParameter("--d must be at least 1")
    if total_order < 0:
        raise click.BadParameter("--order must be nonnegative")
    report = positivity_expansion(order, total_order)
    if fmt == "text":
        click.echo(f"order-{report.d} expansion to total degree {report.order}")
        witness = f" (witness {report.witness})" if report.witness else ""
        click.echo(f"minimum coefficient: {report.minimum}{witness}")
        click.echo(f"terms: {report.term_count}")
        click.echo(f"nonnegative: {str(report.nonnegative).lower()}")
    else:
        _echo_json(
            {
                "d": report.d,
                "order": report.order,
                "minimum": _fraction_text(report.minimum),
                "witness": report.witness,
                "term_count": report.term_count,
                "nonnegative": report.nonnegative,
            }
        )


if __name__ == "__main__":
    main()
