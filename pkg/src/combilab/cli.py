from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from loguru import logger

from .concentration import (
    DiscreteDistribution,
    alternating_direction,
    direction_rate_grid,
    levy_estimate,
    markov_avg_check,
    slice_tail_check,
)
from .config import ExperimentConfig, load_config, load_preset, with_overrides
from .config.loader import PRESETS
from .errors import CombilabError, NumericalError, ParameterError
from .experiments import STUDIES, TrialEngine, resolve_workers
from .geometry import (
    AlmostConstParams,
    ClcdParams,
    clcd_estimate,
    sample_non_almost_constant,
)
from .linalg import spectrum, witness_certificate
from .oracles import moments_check
from .oracles.moments import OracleMode
from .report import write_study_outputs
from .research import VerificationReport
from .sampling import SeedSpec, rows_dot, sample_matrix, sample_supports_batch

STUDY_COMMANDS = {f"{name}-study": name for name in STUDIES}
MOMENT_TRIALS = 10_000


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = "DEBUG" if verbose else "WARNING" if quiet else "INFO"
    logger.remove()
    logger.add(sys.stderr, level=level, format="{level: <8} | {message}")


def _emit(payload: Any) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True))


def _parse_vector(text: Optional[str]) -> Optional[np.ndarray]:
    if text is None:
        return None
    try:
        return np.array([float(item) for item in text.split(",")], dtype=np.float64)
    except ValueError as exc:
        raise ParameterError(f"cannot parse vector '{text}'") from exc


def _study_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else load_preset(args.preset)
    return with_overrides(
        cfg,
        trials=args.trials,
        seed=args.seed,
        workers=args.workers,
        exact=True if args.exact else None,
        out_dir=args.out_dir,
    )


def sample_command(args: argparse.Namespace) -> None:
    m = args.m if args.m is not None else args.n
    spec = SeedSpec(args.seed, experiment="sample", trial=args.trial)
    print(sample_matrix(m, args.n, args.d, spec).to_text())


def spectrum_command(args: argparse.Namespace) -> None:
    m = args.m if args.m is not None else args.n
    matrix = sample_matrix(
        m, args.n, args.d, SeedSpec(args.seed, experiment="sample", trial=args.trial)
    )
    summary = spectrum(matrix, args.method)
    payload: dict[str, Any] = {"spectrum": summary.to_dict()}
    if matrix.is_square and not summary.exactly_singular:
        certificate = witness_certificate(matrix).to_dict()
        certificate.pop("x", None)
        payload["certificate"] = certificate
    _emit(payload)


def _read_vectors(path: str) -> list[np.ndarray]:
    """One whitespace-separated vector per non-blank line."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise ParameterError(f"cannot read vector file {path}: {exc}") from exc
    vectors = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            vector = np.array([float(item) for item in line.split()])
        except ValueError as exc:
            raise ParameterError(f"{path}:{lineno}: not a numeric vector") from exc
        if not np.isfinite(vector).all():
            raise ParameterError(f"{path}:{lineno}: non-finite coordinate")
        vectors.append(vector)
    if not vectors:
        raise ParameterError(f"{path} holds no vectors")
    return vectors


def _clcd_vectors(args: argparse.Namespace) -> list[np.ndarray]:
    if args.vector_file is not None:
        return _read_vectors(args.vector_file)
    vector = _parse_vector(args.vector)
    if vector is not None:
        return [vector]
    params = AlmostConstParams(args.delta, args.rho)
    return [sample_non_almost_constant(args.n, params, args.seed)]


def _clcd_params(args: argparse.Namespace, n: int) -> ClcdParams:
    defaults = ClcdParams.defaults(
        n,
        args.delta,
        args.rho,
        gamma=args.gamma,
        mu=args.mu,
        theta_max_factor=args.theta_max_factor,
    )
    theta_max = args.theta_max if args.theta_max is not None else defaults.theta_max
    step = args.step if args.step is not None else args.grid_fraction * theta_max
    alpha = args.alpha if args.alpha is not None else defaults.alpha
    return ClcdParams(defaults.gamma, alpha, theta_max, step)


def clcd_command(args: argparse.Namespace) -> None:
    vectors = _clcd_vectors(args)
    estimates = [
        clcd_estimate(vector, _clcd_params(args, vector.size)) for vector in vectors
    ]
    for vector, estimate in zip(vectors, estimates):
        print(json.dumps({"n": int(vector.size), **estimate.to_dict()}))


def levy_command(args: argparse.Namespace) -> None:
    vector = _parse_vector(args.vector)
    v = vector if vector is not None else alternating_direction(args.n)
    if v.size != args.n:
        raise ParameterError(f"vector has length {v.size}, expected {args.n}")
    supports = sample_supports_batch(args.n, args.d, args.trials, args.seed)
    estimate = levy_estimate(rows_dot(supports, v), args.eps)
    _emit(estimate.to_dict())


def slice_check_command(args: argparse.Namespace) -> None:
    vector = _parse_vector(args.vector)
    v = vector if vector is not None else alternating_direction(args.n)
    report = slice_tail_check(
        v, args.n, args.d, args.t, args.trials, args.seed, exact=args.exact
    )
    _emit(report.to_dict())


def direction_rate_command(args: argparse.Namespace) -> None:
    reports = direction_rate_grid(args.ns, args.p, args.c, args.trials, args.seed)
    _emit([{"n": n, **report.to_dict()} for n, report in zip(args.ns, reports)])


def markov_check_command(args: argparse.Namespace) -> None:
    values = _parse_vector(args.values)
    if values is None:
        raise ParameterError("markov-check needs --values")
    family = [DiscreteDistribution.uniform(values.tolist())] * args.count
    report = markov_avg_check(family, args.eps, args.trials, args.seed)
    _emit(report.to_dict())


def moments_check_command(args: argparse.Namespace) -> None:
    mode: OracleMode = "auto"
    if args.exact:
        mode = "exact"
    elif args.mc is not None:
        mode = "mc"
    trials = args.mc if args.mc is not None else MOMENT_TRIALS
    report = moments_check(args.n, args.d, mode, trials, args.seed)
    _emit(report.to_dict())
    if not report.passed:
        raise NumericalError(
            f"closed form failed against the oracle at n={args.n}, d={args.d}"
        )


def study_command(args: argparse.Namespace) -> None:
    study = STUDY_COMMANDS[args.command]
    cfg = _study_config(args)
    engine = TrialEngine(resolve_workers(args.workers, cfg))
    logger.info("Running {} study on {} grid points", study, len(cfg.grid))
    result = STUDIES[study](cfg, engine=engine)
    write_study_outputs(result, cfg.output.out_dir)
    if result.fit is not None:
        logger.info(
            "{} fit slope {:.4f} (r2 {:.4f})",
            study,
            result.fit.slope,
            result.fit.r_squared,
        )


def verify_command(args: argparse.Namespace) -> None:
    cfg = load_config(args.config) if args.config else load_preset(args.preset)
    cfg = with_overrides(cfg, seed=args.seed, out_dir=args.out_dir)
    report = VerificationReport(cfg, scale=args.scale)
    result = report.run()
    report.write(Path(cfg.output.out_dir) / "verification.json")
    if not result["passed"]:
        raise NumericalError("verification suite reported failures")


def _add_sampling_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--d", type=int, required=True)
    parser.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combilab", description="Smallest singular value lab for 0/1 matrices"
    )
    parser.add_argument("--verbose", action="store_true")
    parser.add_argument("--quiet", action="store_true")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sample = subparsers.add_parser("sample", help="Print one sampled matrix")
    _add_sampling_args(sample)
    sample.add_argument("--m", type=int)
    sample.add_argument("--trial", type=int, default=0)

    spec = subparsers.add_parser("spectrum", help="Spectral summary of one matrix")
    _add_sampling_args(spec)
    spec.add_argument("--m", type=int)
    spec.add_argument("--trial", type=int, default=0)
    spec.add_argument("--method", choices=["auto", "svd", "inverse"], default="auto")

    clcd = subparsers.add_parser("clcd", help="Certified CLCD interval")
    vectors = clcd.add_mutually_exclusive_group(required=True)
    vectors.add_argument(
        "--vector-file", help="one whitespace-separated vector per line"
    )
    vectors.add_argument("--vector", help="comma-separated coordinates")
    vectors.add_argument("--n", type=int, help="sample a non-almost-constant vector")
    clcd.add_argument("--seed", type=int, default=0)
    clcd.add_argument("--delta", type=float, default=0.05)
    clcd.add_argument("--rho", type=float, default=0.05)
    clcd.add_argument("--gamma", type=float)
    clcd.add_argument("--alpha", type=float)
    clcd.add_argument("--mu", type=float, default=0.1)
    extent = clcd.add_mutually_exclusive_group()
    extent.add_argument("--theta-max", type=float)
    extent.add_argument("--theta-max-factor", type=float, default=4.0)
    spacing = clcd.add_mutually_exclusive_group()
    spacing.add_argument("--step", type=float)
    spacing.add_argument("--grid-fraction", type=float, default=1e-3)

    levy = subparsers.add_parser("levy", help="Levy concentration of <q, v>")
    _add_sampling_args(levy)
    levy.add_argument("--eps", type=float, required=True)
    levy.add_argument("--trials", type=int, default=10_000)
    levy.add_argument("--vector")

    slice_check = subparsers.add_parser("slice-check", help="Slice concentration")
    _add_sampling_args(slice_check)
    slice_check.add_argument("--t", type=float, required=True)
    slice_check.add_argument("--trials", type=int, default=10_000)
    slice_check.add_argument("--vector")
    slice_check.add_argument("--exact", action="store_true")

    direction = subparsers.add_parser("direction-rate", help="P(||Mv|| <= c sqrt(pn))")
    direction.add_argument("--ns", type=int, nargs="+", required=True)
    direction.add_argument("--p", type=float, default=0.5)
    direction.add_argument("--c", type=float, default=0.05)
    direction.add_argument("--trials", type=int, default=1_000)
    direction.add_argument("--seed", type=int, default=0)

    markov = subparsers.add_parser("markov-check", help="Averaging inequality")
    markov.add_argument("--values", required=True)
    markov.add_argument("--count", type=int, default=4)
    markov.add_argument("--eps", type=float, required=True)
    markov.add_argument("--trials", type=int, default=100_000)
    markov.add_argument("--seed", type=int, default=0)

    moments = subparsers.add_parser("moments-check", help="E||x||^2 against oracle")
    _add_sampling_args(moments)
    oracle = moments.add_mutually_exclusive_group()
    oracle.add_argument("--exact", action="store_true")
    oracle.add_argument("--mc", type=int, metavar="TRIALS")

    for command in STUDY_COMMANDS:
        study = subparsers.add_parser(command, help=f"Run the {command}")
        study.add_argument("--config")
        study.add_argument("--preset", choices=PRESETS, default="default")
        study.add_argument("--trials", type=int)
        study.add_argument("--seed", type=int)
        study.add_argument("--workers", type=int)
        study.add_argument("--exact", action="store_true")
        study.add_argument("--out-dir")

    verify = subparsers.add_parser("verify", help="Run the property suite")
    verify.add_argument("--config")
    verify.add_argument("--preset", choices=PRESETS, default="default")
    verify.add_argument("--scale", type=float, default=1.0)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--out-dir")
    return parser


COMMANDS = {
    "sample": sample_command,
    "spectrum": spectrum_command,
    "clcd": clcd_command,
    "levy": levy_command,
    "slice-check": slice_check_command,
    "direction-rate": direction_rate_command,
    "markov-check": markov_check_command,
    "moments-check": moments_check_command,
    "verify": verify_command,
    **{command: study_command for command in STUDY_COMMANDS},
}


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        COMMANDS[args.command](args)
    except CombilabError as exc:
        logger.error("{}", exc)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
