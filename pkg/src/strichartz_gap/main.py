"""Command-line entry point: certificates, spectral gaps, deficit experiments and audits."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import pandas as pd

from strichartz_gap.audit.suites import run_audit
from strichartz_gap.certify.dominance import (
    DEFAULT_LCUT,
    combine_verdicts,
    dominance_check,
    max_dominant_constant,
)
from strichartz_gap.certify.gap import gap_survey
from strichartz_gap.data.manager import CertificateManager, ProfileManager, StateManager
from strichartz_gap.energy.space import SphereState
from strichartz_gap.errors import ProfileError
from strichartz_gap.harmonics.lattice import CoeffField, MultiIndex
from strichartz_gap.penrose.deficit import DEFAULT_EPSILONS, deficit, taylor_experiment
from strichartz_gap.penrose.profiles import RadialProfile, radial_to_zonal
from strichartz_gap.quadform.forms import SHARP_CONSTANT, Block, as_fraction
from strichartz_gap.reports.writer import REPORT_FORMATS, ReportWriter

_PROJECT_VERSION = "0.1.0"
_PROG = "strichartz-gap"

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, as parsed from the command line."""

    command: str
    lmax: Optional[int] = None
    mmax: Optional[int] = None
    lcut: int = DEFAULT_LCUT
    constant: str = "36/85"
    nT: Optional[int] = None
    nX: Optional[int] = None
    seed: int = 0
    fmt: str = "json"
    out: Optional[str] = None
    profiles: Tuple[str, ...] = ()
    state: Optional[str] = None
    taylor: bool = False
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    samples: int = 20
    max_constant: bool = False
    check_convergence: bool = False

    def __post_init__(self) -> None:
        for name in ("lmax", "lcut", "nT", "nX", "samples"):
            value = getattr(self, name)
            if value is not None and value <= 0:
                raise ValueError(f"--{name} must be positive, got {value}")
        if self.seed < 0:
            raise ValueError(f"--seed must be nonnegative, got {self.seed}")
        if any(eps <= 0 for eps in self.epsilons):
            raise ValueError(f"--epsilons must be positive, got {list(self.epsilons)}")

    @property
    def constant_fraction(self) -> Fraction:
        return as_fraction(self.constant)

    @property
    def out_path(self) -> Optional[Path]:
        return Path(self.out) if self.out else None

    def to_json(self) -> Dict[str, Any]:
        payload = asdict(self)
        payload["profiles"] = list(self.profiles)
        payload["epsilons"] = list(self.epsilons)
        return payload

    @classmethod
    def from_namespace(cls, parsed: argparse.Namespace) -> RunConfig:
        return cls(
            command=parsed.command,
            lmax=parsed.lmax,
            mmax=parsed.mmax,
            lcut=parsed.lcut,
            constant=parsed.C,
            nT=parsed.nT,
            nX=parsed.nX,
            seed=parsed.seed,
            fmt=parsed.format,
            out=str(parsed.out) if parsed.out else None,
            profiles=tuple(str(p) for p in getattr(parsed, "profile", None) or ()),
            state=str(parsed.state) if getattr(parsed, "state", None) else None,
            taylor=bool(getattr(parsed, "taylor", False)),
            epsilons=tuple(getattr(parsed, "epsilons", None) or DEFAULT_EPSILONS),
            samples=getattr(parsed, "samples", 20),
            max_constant=bool(getattr(parsed, "max_constant", False)),
            check_convergence=bool(getattr(parsed, "check_convergence", False)),
        )


def _writer(config: RunConfig) -> ReportWriter:
    return ReportWriter(version=_PROJECT_VERSION, config=config.to_json(), seed=config.seed)


def cmd_certify(config: RunConfig) -> int:
    constant = config.constant_fraction
    certificates = [dominance_check(block, constant, config.lcut) for block in Block]
    verdict = combine_verdicts(cert.verdict for cert in certificates)
    for cert in certificates:
        binding = cert.binding_row()
        print(
            f"{cert.block.value}: {cert.verdict.value} at C={constant} "
            f"(binding row ({binding.ell},{binding.m1}), margin {binding.value:.10g})",
            file=sys.stderr,
        )
        for row in cert.failures():
            print(f"  row ({row.ell},{row.m1}) {row.verdict.value}: {row.value:.10g}", file=sys.stderr)
    result: Dict[str, Any] = {
        "certificates": [cert.to_json() for cert in certificates],
        "verdict": verdict.value,
    }
    if config.max_constant:
        result["max_dominant_constant"] = max_dominant_constant(lcut=config.lcut)
    table = pd.DataFrame(
        [
            {"block": cert.block.value, **{k: v for k, v in row.to_json().items() if k != "margin"}}
            for cert in certificates
            for row in cert.rows
        ]
    )
    if config.out_path is not None and config.fmt == "json":
        manager = CertificateManager()
        stem = config.out_path.with_suffix("")
        for cert in certificates:
            manager.save(stem.parent / f"{stem.name}.{cert.block.value}.json", cert)
    _writer(config).write("certify", result, table=table, fmt=config.fmt, destination=config.out_path)
    return verdict.exit_code


def cmd_gap(config: RunConfig) -> int:
    lmax = config.lmax or 200
    mmax = 10 if config.mmax is None else config.mmax
    if mmax < 0:
        print(f"error: --mmax must be nonnegative, got {mmax}; no blocks to measure", file=sys.stderr)
        return 2
    reports = gap_survey(lmax, mmax)
    table = pd.DataFrame([report.to_json() for report in reports])
    minimum = min(reports, key=lambda report: report.lambda_min)
    result = {
        "blocks": [report.to_json() for report in reports],
        "minimum": minimum.to_json(),
        "dominance_bound": float(SHARP_CONSTANT),
    }
    print(
        f"minimum gap {minimum.lambda_min:.12f} at ({minimum.block}, m1={minimum.m1})",
        file=sys.stderr,
    )
    _writer(config).write("gap", result, table=table, fmt=config.fmt, destination=config.out_path)
    return 0


def _deficit_state(config: RunConfig, lmax: int) -> SphereState:
    if config.state:
        return StateManager().load(Path(config.state))
    manager = ProfileManager()
    profiles = [manager.load(Path(path)) for path in config.profiles] or [RadialProfile.maximiser()]
    state = SphereState.zero(lmax)
    for profile in profiles:
        field = radial_to_zonal(profile, lmax)
        part = SphereState.from_f0(field) if profile.component == "f0" else SphereState.from_f1(field)
        state = state.add(part)
    return state


def cmd_deficit(config: RunConfig) -> int:
    lmax = config.lmax or 20
    writer = _writer(config)
    if config.taylor:
        if config.state:
            direction = StateManager().load(Path(config.state))
        else:
            direction = SphereState.from_f0(CoeffField({MultiIndex(2): 1.0}, max(lmax, 2)))
        experiment = taylor_experiment(direction, config.epsilons, config.nT, config.nX)
        print(
            f"slope {experiment.slope}, limiting ratio {experiment.limiting_ratio:.6f}",
            file=sys.stderr,
        )
        writer.write(
            "deficit",
            experiment.to_json(),
            table=experiment.table,
            fmt=config.fmt,
            destination=config.out_path,
        )
        return 0
    state = _deficit_state(config, lmax)
    report = deficit(state, config.nT, config.nX, check_convergence=config.check_convergence)
    if not report.respects_sharp_bound:
        logger.warning("Deficit %.3e is below the sharp-inequality tolerance", report.deficit)
    writer.write(
        "deficit",
        report.to_json(),
        table=pd.DataFrame([report.to_json()]),
        fmt=config.fmt,
        destination=config.out_path,
    )
    return 0


def cmd_audit(config: RunConfig, norm_perturbation: float = 0.0) -> int:
    report = run_audit(
        lmax=config.lmax or 30,
        mmax=10 if config.mmax is None else config.mmax,
        seed=config.seed,
        norm_scale=1.0 + norm_perturbation,
        samples=config.samples,
    )
    for suite in report.suites:
        status = "pass" if suite.passed else "FAIL"
        print(f"{suite.name}: {status} (max deviation {suite.max_deviation:.3e})", file=sys.stderr)
    _writer(config).write(
        "audit", report.to_json(), table=report.to_frame(), fmt=config.fmt, destination=config.out_path
    )
    return 0 if report.passed else 1


def _shared_options() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--lmax", type=int, help="Truncation degree.")
    shared.add_argument("--mmax", type=int, help="Largest first lower index m1.")
    shared.add_argument("--lcut", type=int, default=DEFAULT_LCUT, help="Last explicitly checked degree.")
    shared.add_argument("--C", default="36/85", help="Coercivity constant as an exact rational 'p/q'.")
    shared.add_argument("--nT", type=int, help="Trapezoid nodes in T.")
    shared.add_argument("--nX", type=int, help="Gauss-Jacobi nodes in X0.")
    shared.add_argument("--out", type=Path, help="Write the report here instead of standard output.")
    shared.add_argument("--seed", type=int, default=0, help="Seed for randomized suites.")
    shared.add_argument("--format", choices=REPORT_FORMATS, default="json", help="Report format.")
    shared.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs.")
    return shared


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=_PROG,
        description="Certify and measure the coercivity of the 5-D Strichartz deficit quadratic form.",
    )
    parser.add_argument("--version", action="store_true", help="Print the package version and exit.")
    commands = parser.add_subparsers(dest="command")
    shared = _shared_options()

    certify = commands.add_parser("certify", parents=[shared], help="Diagonal-dominance certificates.")
    certify.add_argument(
        "--max-constant",
        action="store_true",
        help="Also bisect for the largest constant with a dominance certificate.",
    )

    commands.add_parser("gap", parents=[shared], help="Finite-truncation spectral gaps per block.")

    deficit_parser = commands.add_parser("deficit", parents=[shared], help="Deficit of radial data.")
    deficit_parser.add_argument(
        "--profile", type=Path, action="append", help="Radial profile JSON (repeat for f0 and f1)."
    )
    deficit_parser.add_argument("--state", type=Path, help="Sphere-state JSON (zonal).")
    deficit_parser.add_argument(
        "--taylor", action="store_true", help="Run the expansion experiment along fstar + eps g."
    )
    deficit_parser.add_argument("--epsilons", type=float, nargs="+", help="Epsilon ladder for --taylor.")
    deficit_parser.add_argument(
        "--check-convergence", action="store_true", help="Recompute with doubled quadrature orders."
    )

    audit = commands.add_parser("audit", parents=[shared], help="Special-function identity suites.")
    audit.add_argument("--samples", type=int, default=20, help="Random states in the dual-path suite.")
    audit.add_argument("--perturb-norm", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def run_cli(args: list[str] | None = None) -> int:
    """Parse CLI arguments and dispatch commands."""
    parser = _build_parser()
    parsed = parser.parse_args(args=args)

    if parsed.version:
        print(f"{_PROG} {_PROJECT_VERSION}")
        return 0
    if parsed.command is None:
        parser.print_usage(sys.stderr)
        return 2

    _configure_logging(parsed.verbose)
    try:
        config = RunConfig.from_namespace(parsed)
        if parsed.command == "certify":
            return cmd_certify(config)
        if parsed.command == "gap":
            return cmd_gap(config)
        if parsed.command == "deficit":
            return cmd_deficit(config)
        return cmd_audit(config, parsed.perturb_norm)
    except ProfileError as exc:
        where = f" (field: {exc.field})" if exc.field else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return 2
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> int:
    """Entrypoint used by console scripts."""
    return run_cli()


if __name__ == "__main__":
    raise SystemExit(main())
