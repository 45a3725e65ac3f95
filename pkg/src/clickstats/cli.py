"""Command-line surface: dist, qb, simulate, analyze, sweep.

Exit codes: 0 on success, 1 for domain errors (the message names the error,
e.g. DegenerateMean), 2 for usage and parse errors. Randomized verbs demand
an explicit --seed; reproducibility is part of the contract, so there is no
wall-clock default.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

import numpy as np

from . import records
from .click_kernel import (
    DetectorConfig,
    click_distribution,
    click_moments,
    mandel_q,
    nonclassicality_report,
    qb_parameter,
)
from .errors import DomainError, ParseError, ValidationError
from .estimators import mandel_q_estimate, qb_estimate
from .simulator import simulate
from .states import StateSpec, state_from_dict

SWEEP_AXES = ("eta", "nu", "N", "mean_photons", "r")
METHOD_ALIASES = {"gf": "generating_function", "dp": "occupancy_dp", "auto": "auto"}


def parse_state_spec(text: str) -> StateSpec:
    """Parse the JSON state-spec schema into a validated StateSpec."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"state spec is not valid JSON: {exc}")
    return state_from_dict(data)


def _load_state(arg: str) -> StateSpec:
    """Accept an inline JSON object or a path to a file holding one."""
    text = arg.strip()
    if not text.startswith("{"):
        try:
            with open(arg) as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(f"cannot read state file {arg!r}: {exc}")
    return parse_state_spec(text)


def _add_state_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--state", required=True,
        help="state spec: inline JSON or a path to a JSON file",
    )
    parser.add_argument(
        "--detectors", type=int, required=True, metavar="N",
        help="number of on-off detectors",
    )
    parser.add_argument("--eta", type=float, default=1.0, help="quantum efficiency")
    parser.add_argument("--nu", type=float, default=0.0, help="dark-count parameter")


def _add_output_args(parser: argparse.ArgumentParser, formats: bool = True) -> None:
    parser.add_argument("--out", help="output path (stdout when omitted)")
    if formats:
        parser.add_argument(
            "--format", choices=("table", "structured"), default="table",
            help="table (CSV) or structured (JSON) output",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clickstats",
        description=(
            "Exact click statistics of N on-off detectors, the sub-binomial "
            "Q_B parameter, Monte Carlo simulation and estimation from data."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_dist = sub.add_parser("dist", help="exact click-count distribution")
    _add_state_config_args(p_dist)
    p_dist.add_argument(
        "--method", choices=tuple(METHOD_ALIASES), default="auto",
        help="gf (inclusion-exclusion), dp (occupancy recurrence), or auto",
    )
    _add_output_args(p_dist)

    p_qb = sub.add_parser("qb", help="Q_B / Q_M nonclassicality report")
    _add_state_config_args(p_qb)
    p_qb.add_argument("--method", choices=tuple(METHOD_ALIASES), default="auto")
    _add_output_args(p_qb)

    p_sim = sub.add_parser("simulate", help="Monte Carlo click record")
    _add_state_config_args(p_sim)
    p_sim.add_argument("--trials", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--workers", type=int, default=1)
    _add_output_args(p_sim, formats=False)

    p_an = sub.add_parser("analyze", help="estimate Q_B and Q_M from a sample file")
    p_an.add_argument("--in", dest="input", required=True, metavar="PATH")
    p_an.add_argument(
        "--bootstrap", type=int, default=0, metavar="B",
        help="bootstrap replicates (0 disables the interval)",
    )
    p_an.add_argument("--level", type=float, default=0.95)
    p_an.add_argument("--seed", type=int, default=None)
    p_an.add_argument("--workers", type=int, default=1)
    _add_output_args(p_an)

    p_sw = sub.add_parser("sweep", help="scan one axis and tabulate Q_B / Q_M")
    _add_state_config_args(p_sw)
    p_sw.add_argument("--method", choices=tuple(METHOD_ALIASES), default="auto")
    p_sw.add_argument("--sweep-axis", choices=SWEEP_AXES, required=True)
    p_sw.add_argument("--from", dest="sweep_from", type=float, required=True)
    p_sw.add_argument("--to", dest="sweep_to", type=float, required=True)
    p_sw.add_argument("--steps", type=int, required=True)
    _add_output_args(p_sw)

    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _sweep_grid(args) -> np.ndarray:
    if args.steps < 1:
        raise ValidationError("--steps must be a positive integer")
    if args.steps == 1:
        if args.sweep_from != args.sweep_to:
            raise ValidationError("--steps 1 requires --from and --to to coincide")
        return np.array([args.sweep_from])
    return np.linspace(args.sweep_from, args.sweep_to, args.steps)


def _sweep_point(
    spec: StateSpec, config: DetectorConfig, axis: str, value: float
) -> tuple[StateSpec, DetectorConfig]:
    if axis == "eta":
        return spec, dataclasses.replace(config, eta=float(value))
    if axis == "nu":
        return spec, dataclasses.replace(config, nu=float(value))
    if axis == "N":
        if abs(value - round(value)) > 1e-9:
            raise ValidationError(f"sweep over N hit a non-integer grid point {value!r}")
        return spec, dataclasses.replace(config, N=int(round(value)))
    if axis == "mean_photons":
        if spec.kind not in ("coherent", "thermal"):
            raise ValidationError(
                f"axis mean_photons requires a coherent or thermal state, "
                f"got {spec.kind!r}"
            )
        return dataclasses.replace(spec, mean_photons=float(value)), config
    if spec.kind != "squeezed_vacuum":
        raise ValidationError(
            f"axis r requires a squeezed_vacuum state, got {spec.kind!r}"
        )
    return dataclasses.replace(spec, r=float(value)), config


def run_sweep(
    spec: StateSpec,
    config: DetectorConfig,
    axis: str,
    grid: np.ndarray,
    method: str = "auto",
) -> list[tuple[float, float, float, float, float]]:
    """One row per grid point: (axis value, Q_B, Q_M on clicks, mean, variance)."""
    rows = []
    for value in grid:
        pt_spec, pt_config = _sweep_point(spec, config, axis, float(value))
        dist = click_distribution(pt_spec, pt_config, method)
        mean, variance = click_moments(dist)
        rows.append(
            (float(value), qb_parameter(dist), mandel_q(dist), mean, variance)
        )
    return rows


def _run(args) -> int:
    if args.verb == "dist":
        spec = _load_state(args.state)
        config = DetectorConfig(N=args.detectors, eta=args.eta, nu=args.nu)
        dist = click_distribution(spec, config, METHOD_ALIASES[args.method])
        _emit(records.emit_distribution(dist, args.format), args.out)
        return 0

    if args.verb == "qb":
        spec = _load_state(args.state)
        config = DetectorConfig(N=args.detectors, eta=args.eta, nu=args.nu)
        report = nonclassicality_report(spec, config, METHOD_ALIASES[args.method])
        _emit(records.emit_nonclassicality(report, args.format), args.out)
        return 0

    if args.verb == "simulate":
        spec = _load_state(args.state)
        config = DetectorConfig(N=args.detectors, eta=args.eta, nu=args.nu)
        samples = simulate(
            spec, config, trials=args.trials, seed=args.seed, workers=args.workers
        )
        _emit(records.samples_to_text(samples), args.out)
        return 0

    if args.verb == "analyze":
        if args.bootstrap > 0 and args.seed is None:
            raise ValidationError("--seed is required when --bootstrap is requested")
        samples = records.read_samples(args.input)
        kwargs = dict(
            bootstrap_replicates=args.bootstrap,
            level=args.level,
            seed=args.seed,
            workers=args.workers,
        )
        reports = [
            qb_estimate(samples, **kwargs),
            mandel_q_estimate(samples, **kwargs),
        ]
        _emit(records.emit_estimates(reports, args.format), args.out)
        return 0

    # sweep
    spec = _load_state(args.state)
    config = DetectorConfig(N=args.detectors, eta=args.eta, nu=args.nu)
    grid = _sweep_grid(args)
    rows = run_sweep(
        spec, config, args.sweep_axis, grid, METHOD_ALIASES[args.method]
    )
    _emit(records.emit_sweep(args.sweep_axis, rows, args.format), args.out)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _run(args)
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
