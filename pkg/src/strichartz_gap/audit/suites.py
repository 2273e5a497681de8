"""Numerical identity suites: each compares a computed quantity with its closed form."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from strichartz_gap.energy.space import random_tilde_state
from strichartz_gap.harmonics.coupling import c5, x0_coupling_audit
from strichartz_gap.quadform.forms import q_form, q_form_general, q_form_via_spacetime
from strichartz_gap.special.functions import assoc_legendre, assoc_legendre_table, recurrence_coeffs
from strichartz_gap.special.quadrature import beta_moment, default_order, jacobi_rule

logger = logging.getLogger(__name__)

IDENTITY_TOLERANCE = 1e-9
RATIO_TOLERANCE = 1e-12
MOMENT_TOLERANCE = 1e-12
DUAL_PATH_TOLERANCE = 1e-10


@dataclass
class SuiteResult:
    """Outcome of one suite: the worst deviation seen and where it occurred."""

    name: str
    max_deviation: float
    tolerance: float
    checks: int
    worst: Optional[str] = None

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "max_deviation": self.max_deviation,
            "tolerance": self.tolerance,
            "checks": self.checks,
            "worst": self.worst,
        }


class _Tracker:
    def __init__(self, name: str, tolerance: float) -> None:
        self.result = SuiteResult(name=name, max_deviation=0.0, tolerance=tolerance, checks=0)

    def record(self, deviation: float, where: str) -> None:
        self.result.checks += 1
        if not math.isfinite(deviation):
            deviation = math.inf
        if self.result.worst is None or deviation > self.result.max_deviation:
            self.result.max_deviation = deviation
            self.result.worst = where

    def finish(self) -> SuiteResult:
        logger.info(
            "Suite %s: %d checks, max deviation %.3e (%s)",
            self.result.name,
            self.result.checks,
            self.result.max_deviation,
            "pass" if self.result.passed else "FAIL",
        )
        return self.result


def orthonormality_suite(lmax: int, mmax: int, *, norm_scale: float = 1.0) -> SuiteResult:
    """Gram matrix of P_l^m against (1 - t^2)^(3/2) compared with the identity."""
    tracker = _Tracker("orthonormality", IDENTITY_TOLERANCE)
    rule = jacobi_rule(default_order(lmax))
    for m in range(min(mmax, lmax) + 1):
        table = np.array(
            [assoc_legendre(ell, m, rule.nodes, norm_scale=norm_scale) for ell in range(m, lmax + 1)]
        )
        gram = (table * rule.weights) @ table.T
        deviation = np.abs(gram - np.eye(gram.shape[0]))
        row, col = np.unravel_index(int(np.argmax(deviation)), deviation.shape)
        tracker.result.checks += deviation.size - 1
        tracker.record(float(deviation[row, col]), f"l={row + m}, l'={col + m}, m={m}")
    return tracker.finish()


def recurrence_suite(lmax: int = 40, samples: int = 21) -> SuiteResult:
    """Residual of a P_l - b t P_{l-1} + c P_{l-2} relative to the largest term."""
    tracker = _Tracker("recurrence", IDENTITY_TOLERANCE)
    t = np.linspace(-1.0, 1.0, samples)
    for m in range(max(lmax - 1, 0)):
        table = assoc_legendre_table(lmax, m, t)
        for ell in range(max(2, m + 2), lmax + 1):
            a, b, c = recurrence_coeffs(ell, m)
            terms = (a * table[ell], b * t * table[ell - 1], c * table[ell - 2])
            residual = np.max(np.abs(terms[0] - terms[1] + terms[2]))
            scale = max(float(np.max(np.abs(term))) for term in terms) or 1.0
            tracker.record(float(residual) / scale, f"l={ell}, m={m}")
    return tracker.finish()


def ratio_suite(lmax: int) -> SuiteResult:
    """a_l^m / b_l^m against C5(l - 1, m)."""
    tracker = _Tracker("ratio", RATIO_TOLERANCE)
    for ell in range(1, lmax + 1):
        for m in range(ell):
            a, b, _ = recurrence_coeffs(ell, m)
            tracker.record(abs(a / b - c5(ell - 1, m)), f"l={ell}, m={m}")
    return tracker.finish()


def coupling_suite(lmax: int, mmax: int) -> SuiteResult:
    audit = x0_coupling_audit(lmax, mmax)
    tracker = _Tracker("coupling", audit.tolerance)
    where = "l={}, l'={}, m1={}".format(*audit.worst_pair) if audit.worst_pair else None
    tracker.result.checks = (lmax + 1) ** 2 * (min(mmax, lmax) + 1)
    tracker.result.max_deviation = float(audit.max_deviation)
    tracker.result.worst = where
    return tracker.finish()


def quadrature_suite(max_points: int = 16) -> SuiteResult:
    """jacobi_rule(n) against the Beta-function moments of t^(2k), k < n."""
    tracker = _Tracker("quadrature", MOMENT_TOLERANCE)
    for npoints in range(1, max_points + 1):
        rule = jacobi_rule(npoints)
        for k in range(npoints):
            exact = beta_moment(k)
            approx = rule.integrate(lambda t, k=k: t ** (2 * k))
            tracker.record(abs(approx - exact) / exact, f"n={npoints}, k={k}")
    return tracker.finish()


def dual_path_suite(lmax: int, seed: int, samples: int = 20) -> SuiteResult:
    """q_form against the spacetime assembly and the exact-in-T general form."""
    tracker = _Tracker("dual-path", DUAL_PATH_TOLERANCE)
    rng = np.random.default_rng(seed)
    for sample in range(samples):
        x = random_tilde_state(rng, max(lmax, 2))
        reference = q_form(x)
        scale = max(abs(reference), 1e-300)
        tracker.record(abs(q_form_via_spacetime(x) - reference) / scale, f"sample {sample} (spacetime)")
        tracker.record(abs(q_form_general(x) - reference) / scale, f"sample {sample} (general)")
    return tracker.finish()


@dataclass
class AuditReport:
    lmax: int
    mmax: int
    seed: int
    suites: List[SuiteResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(suite.passed for suite in self.suites)

    def suite(self, name: str) -> SuiteResult:
        for result in self.suites:
            if result.name == name:
                return result
        raise KeyError(f"No suite named {name!r}")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([suite.to_json() for suite in self.suites])

    def to_json(self) -> Dict[str, Any]:
        return {
            "lmax": self.lmax,
            "mmax": self.mmax,
            "seed": self.seed,
            "passed": self.passed,
            "suites": [suite.to_json() for suite in self.suites],
        }


def run_audit(
    lmax: int = 30,
    mmax: int = 10,
    seed: int = 0,
    *,
    norm_scale: float = 1.0,
    samples: int = 20,
) -> AuditReport:
    """Run every suite; ``norm_scale`` perturbs the Legendre normalization for sensitivity checks."""
    if lmax < 2 or mmax < 0:
        raise ValueError(f"Audit needs lmax >= 2 and mmax >= 0, got lmax={lmax}, mmax={mmax}")
    if lmax > 30 or mmax > 30:
        raise ValueError(f"Audit supports lmax, mmax <= 30, got lmax={lmax}, mmax={mmax}")
    report = AuditReport(lmax=lmax, mmax=mmax, seed=seed)
    report.suites.append(orthonormality_suite(lmax, mmax, norm_scale=norm_scale))
    report.suites.append(recurrence_suite(lmax))
    report.suites.append(ratio_suite(lmax))
    report.suites.append(coupling_suite(lmax, mmax))
    report.suites.append(quadrature_suite())
    report.suites.append(dual_path_suite(min(lmax, 12), seed, samples))
    return report
