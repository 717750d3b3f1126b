"""Command-line surface: build, sample, verify, measure, simulate, compare.

Outputs are byte-identical across identical invocations: fixed seeds,
sorted JSON keys, and 17-significant-digit CSV numbers. The default
output directory is ``$LOCPERTURB_OUTPUT_DIR`` (falling back to the
current directory).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import io as lio
from .distributions import (
    KIND_GEOMETRIC,
    build_geometric_pmf,
    build_query1_pmf,
    build_query2_pmf,
    sample,
)
from .errors import LocPerturbError, ParameterError
from .harness import Scenario, compare_mechanisms, report_to_json, run_scenario
from .metrics import (
    compute_tolerance_limits,
    directional_mass_ratio,
    expected_displacement,
    expected_distance_error,
    ranking_preservation_mass,
)
from .params import MAX_TAIL_MASS, GridSpec, PoiPrior, PrivacyParams
from .verify import measure_empirical_epsilon, verify_pmf

OUTPUT_DIR_ENV = "LOCPERTURB_OUTPUT_DIR"

QUERY_CHOICES = {"q1": "query1", "q2": "query2", "geometric": KIND_GEOMETRIC}


class CliError(Exception):
    """Flag validation failure; message names the offending flag."""


def _out_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _resolve_out(arg_out: str | None, default_name: str) -> Path:
    if arg_out:
        return Path(arg_out)
    return _out_dir() / default_name


def _add_mechanism_flags(p: argparse.ArgumentParser, query_required: bool = True) -> None:
    p.add_argument("--query", choices=sorted(QUERY_CHOICES), required=query_required,
                   default=None, help="mechanism family")
    p.add_argument("--rho", type=float, default=None, help="privacy level in nats per grid step")
    p.add_argument("--epsilon", type=float, default=None,
                   help="privacy level per meter of radius; rho = epsilon * radius")
    p.add_argument("--radius", type=float, default=None, help="privacy radius in grid steps")
    p.add_argument("--alpha", type=float, default=0.0, help="anti-prior suppression knob")
    p.add_argument("--rho0", type=float, default=0.0,
                   help="privacy level outside the radius (carried, unused)")
    p.add_argument("--delta", type=float, default=1.0, help="meters per grid step")
    p.add_argument("--tail-mass", type=float, default=1e-9, help="stored-support truncation budget")
    p.add_argument("--target", type=int, default=None, help="target PoI offset in grid steps")


def _validate_params(args) -> PrivacyParams:
    radius = args.radius if args.radius is not None else 1.0
    if radius <= 0 or not math.isfinite(radius):
        raise CliError("--radius must be > 0")
    if args.rho is not None and args.epsilon is not None:
        if not math.isclose(args.rho, args.epsilon * radius, rel_tol=1e-9, abs_tol=1e-12):
            raise CliError("--rho and --epsilon/--radius disagree (rho must equal epsilon * radius)")
    if args.rho is not None:
        rho = args.rho
    elif args.epsilon is not None:
        if args.epsilon <= 0 or not math.isfinite(args.epsilon):
            raise CliError("--epsilon must be > 0")
        rho = args.epsilon * radius
    else:
        raise CliError("--rho (or --epsilon with --radius) is required")
    if rho <= 0 or not math.isfinite(rho):
        raise CliError("--rho must be > 0")
    if args.alpha < 0 or not math.isfinite(args.alpha):
        raise CliError("--alpha must be >= 0")
    if args.rho0 < 0:
        raise CliError("--rho0 must be >= 0")
    return PrivacyParams(rho=rho, alpha=args.alpha, r=radius, rho0=args.rho0)


def _validate_grid(args) -> GridSpec:
    if args.delta <= 0:
        raise CliError("--delta must be > 0")
    if not (0.0 < args.tail_mass <= MAX_TAIL_MASS):
        raise CliError(f"--tail-mass must lie in (0, {MAX_TAIL_MASS:g}]")
    return GridSpec(delta=args.delta, tail_mass=args.tail_mass)


def _build_from_args(args):
    if args.query is None:
        raise CliError("--query is required when --dist is not given")
    params = _validate_params(args)
    grid = _validate_grid(args)
    query = QUERY_CHOICES[args.query]
    if query == KIND_GEOMETRIC:
        return build_geometric_pmf(params, grid)
    if args.target is None:
        raise CliError(f"--target is required for --query {args.query}")
    if query == "query1" and args.target == 0:
        raise CliError("--target must be nonzero for --query q1")
    prior = PoiPrior(pois=(args.target,))
    if query == "query1":
        return build_query1_pmf(params, grid, prior)
    return build_query2_pmf(params, grid, prior)


def _emit(text: str, out: str | None) -> None:
    if out:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    else:
        sys.stdout.write(text)


def cmd_build(args) -> int:
    pmf = _build_from_args(args)
    out = _resolve_out(args.out, f"{pmf.kind}.csv")
    csv_path, meta_path = lio.write_distribution(pmf, out)
    print(csv_path)
    print(meta_path)
    return 0


def cmd_sample(args) -> int:
    pmf = lio.read_distribution(args.dist) if args.dist else _build_from_args(args)
    if args.n < 1:
        raise CliError("--n must be >= 1")
    offsets = sample(pmf, args.seed, args.n)
    if args.out:
        print(lio.write_samples_csv(offsets, args.out))
    else:
        print("offset")
        for x in offsets:
            print(int(x))
    return 0


def cmd_verify(args) -> int:
    pmf = lio.read_distribution(args.dist) if args.dist else _build_from_args(args)
    report = verify_pmf(pmf)
    _emit(report.to_json() + "\n", args.out)
    return 0 if report.all_passed else 1


def cmd_epsilon(args) -> int:
    params = _validate_params(args)
    grid = _validate_grid(args)
    kind = QUERY_CHOICES[args.query]
    target = args.target if args.target is not None else 10
    input_range = (args.input_lo, args.input_hi)
    eps = measure_empirical_epsilon(kind, params, grid, target, input_range)
    payload = {
        "kind": kind,
        "rho": params.rho,
        "alpha": params.alpha,
        "target": target,
        "input_range": list(input_range),
        "empirical_epsilon": eps,
        "nominal_rho": params.rho,
    }
    _emit(report_to_json(payload) + "\n", args.out)
    return 0


def _parse_pois(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise CliError(f"--pois must be comma-separated integers, got {text!r}") from exc


def cmd_metrics(args) -> int:
    pmf = _build_from_args(args)
    payload: dict = {
        "kind": pmf.kind,
        "rho": pmf.params.rho,
        "alpha": pmf.params.alpha,
        "target": pmf.target,
        "expected_displacement": expected_displacement(pmf),
    }
    if pmf.kind == "query1":
        payload["directional_mass_ratio"] = directional_mass_ratio(pmf)
    if pmf.target is not None:
        payload["expected_distance_error"] = expected_distance_error(pmf, pmf.target)
    if args.pois:
        prior = PoiPrior(pois=_parse_pois(args.pois))
        region = compute_tolerance_limits(prior)
        payload["tolerance_limits"] = {
            "m_minus": region.m_minus if math.isfinite(region.m_minus) else None,
            "m_plus": region.m_plus if math.isfinite(region.m_plus) else None,
        }
        payload["ranking_preservation_mass"] = ranking_preservation_mass(pmf, prior)
    _emit(report_to_json(payload) + "\n", args.out)
    return 0


def _load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        return Scenario.from_dict(json.load(fh))


def cmd_simulate(args) -> int:
    report = run_scenario(_load_scenario(args.scenario))
    _emit(report_to_json(report.to_dict()) + "\n", args.out)
    return 0


def cmd_compare(args) -> int:
    payload = compare_mechanisms(_load_scenario(args.scenario))
    _emit(report_to_json(payload) + "\n", args.out)
    return 0


def cmd_figure(args) -> int:
    params = PrivacyParams(rho=args.rho, alpha=args.alpha)
    grid = GridSpec(delta=1.0, tail_mass=args.tail_mass)
    prior = PoiPrior(pois=(args.target,))
    if args.which == 2:
        pmf = build_query1_pmf(params, grid, prior)
    else:
        pmf = build_query2_pmf(params, grid, prior)
    lines = ["offset,probability"]
    lines += [f"{int(x)},{lio.format_probability(m)}" for x, m in zip(pmf.offsets, pmf.probs)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="locperturb",
        description="Prior-aware differentially private perturbation of 1D locations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a distribution and write CSV + metadata")
    _add_mechanism_flags(p)
    p.add_argument("--out", default=None, help="output CSV path")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sample", help="draw offsets from a distribution")
    _add_mechanism_flags(p, query_required=False)
    p.add_argument("--dist", default=None, help="read a written distribution instead of building")
    p.add_argument("--n", type=int, default=10, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="RNG seed")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", help="check a distribution against its construction contract")
    _add_mechanism_flags(p, query_required=False)
    p.add_argument("--dist", default=None, help="read a written distribution instead of building")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("epsilon", help="measure the worst adjacent-input log-likelihood ratio")
    _add_mechanism_flags(p)
    p.add_argument("--input-lo", type=int, default=0, help="first input location (grid steps)")
    p.add_argument("--input-hi", type=int, default=5, help="last input location (grid steps)")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_epsilon)

    p = sub.add_parser("metrics", help="analytic utility metrics for a distribution")
    _add_mechanism_flags(p)
    p.add_argument("--pois", default=None, help="comma-separated PoI offsets for ranking metrics")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("simulate", help="run one scenario end to end")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compare", help="scenario mechanism vs geometric baseline, same seed")
    p.add_argument("--scenario", required=True, help="scenario JSON file")
    p.add_argument("--out", default=None, help="report path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("figure", help="emit distribution data for the shipped figures")
    p.add_argument("--which", type=int, required=True, choices=[2, 3],
                   help="2: single-peak distribution; 3: twin-peak distribution")
    p.add_argument("--rho", type=float, default=math.log(2.0))
    p.add_argument("--alpha", type=float, default=4.0)
    p.add_argument("--target", type=int, default=10)
    p.add_argument("--tail-mass", type=float, default=1e-9)
    p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_figure)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, LocPerturbError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
