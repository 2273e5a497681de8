"""Finite-truncation spectral gaps of Q against the energy Gram, one (block, m1) chain at a time."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Iterable, List, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky_banded, eigh

from strichartz_gap.certify.dominance import chain_floor
from strichartz_gap.errors import DiagnosticError
from strichartz_gap.harmonics.coupling import c5
from strichartz_gap.quadform.forms import Block, alpha_beta

logger = logging.getLogger(__name__)

MIN_GAP_LMAX = 4
_BISECTION_STEPS = 200
_RELATIVE_TOL = 1e-15


@dataclass(frozen=True)
class Tridiagonal:
    """Symmetric tridiagonal matrix stored as its diagonal and first off-diagonal."""

    diagonal: np.ndarray
    offdiagonal: np.ndarray

    @property
    def size(self) -> int:
        return self.diagonal.size

    def dense(self) -> np.ndarray:
        matrix = np.diag(self.diagonal)
        if self.size > 1:
            matrix += np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)
        return matrix

    def banded_upper(self) -> np.ndarray:
        bands = np.zeros((2, self.size))
        bands[0, 1:] = self.offdiagonal
        bands[1, :] = self.diagonal
        return bands


def q_matrix(block: Block | str, m1: int, lmax: int) -> Tridiagonal:
    """Q restricted to one chain; the off-diagonal is half of the beta cross term."""
    block = Block(block)
    floor = chain_floor(block, m1)
    degrees = range(floor, lmax + 1)
    diagonal = np.empty(len(degrees))
    offdiagonal = np.zeros(max(len(degrees) - 1, 0))
    for row, ell in enumerate(degrees):
        if block is Block.F1 and ell == 1:
            diagonal[row] = 1.0 / (12.0 * math.pi)
            continue
        alpha, beta = alpha_beta(ell, m1)
        if block is Block.F0:
            diagonal[row] = alpha / (4.0 * math.pi)
            cross = beta / (8.0 * math.pi)
        else:
            diagonal[row] = alpha / (4.0 * math.pi * (ell + 2) ** 2)
            cross = beta / (8.0 * math.pi * (ell + 2) * (ell + 3))
        if row < offdiagonal.size:
            offdiagonal[row] = cross
    return Tridiagonal(diagonal, offdiagonal)


def gram_matrix(block: Block | str, m1: int, lmax: int) -> Tridiagonal:
    """Energy Gram restricted to one chain."""
    block = Block(block)
    floor = chain_floor(block, m1)
    degrees = list(range(floor, lmax + 1))
    if block is Block.F0:
        diagonal = np.array([(ell + 2) ** 2 for ell in degrees], dtype=float)
        offdiagonal = np.array(
            [c5(ell, m1) * (ell + 2) * (ell + 3) for ell in degrees[:-1]], dtype=float
        )
    else:
        diagonal = np.ones(len(degrees))
        offdiagonal = np.array([c5(ell, m1) for ell in degrees[:-1]], dtype=float)
    return Tridiagonal(diagonal, offdiagonal)


def count_below(q: Tridiagonal, g: Tridiagonal, shift: float) -> int:
    """Number of generalized eigenvalues below ``shift`` (negative LDL^T pivots of Q - shift G)."""
    diagonal = q.diagonal - shift * g.diagonal
    offdiagonal = q.offdiagonal - shift * g.offdiagonal
    tiny = np.finfo(float).tiny
    count = 0
    pivot = 0.0
    for k in range(diagonal.size):
        pivot = diagonal[k] if k == 0 else diagonal[k] - offdiagonal[k - 1] ** 2 / pivot
        if pivot == 0.0:
            pivot = -tiny
        if pivot < 0.0:
            count += 1
    return count


def smallest_eigenvalue(q: Tridiagonal, g: Tridiagonal) -> Tuple[float, int]:
    """Bisection on the inertia count; returns (lambda_min, iterations)."""
    hi = float(q.diagonal[0] / g.diagonal[0])
    lo = min(0.0, hi)
    width = max(abs(hi), 1.0)
    while count_below(q, g, lo) > 0:
        lo -= width
        width *= 2.0
    iterations = 0
    while iterations < _BISECTION_STEPS and hi - lo > _RELATIVE_TOL * max(abs(hi), abs(lo), 1e-300):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if count_below(q, g, mid) >= 1:
            hi = mid
        else:
            lo = mid
        iterations += 1
    return 0.5 * (lo + hi), iterations


@dataclass(frozen=True)
class GapReport:
    """Smallest eigenvalue of Q against the Gram on one chain, scaled by 8 pi."""

    block: str
    m1: int
    lmax: int
    floor: int
    dimension: int
    lambda_min: float
    residual: float
    iterations: int

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def spectral_gap(block: Block | str, m1: int, lmax: int) -> GapReport:
    """Measure min Q(x)/|x|^2 on the (block, m1) chain truncated at lmax."""
    block = Block(block)
    if lmax < MIN_GAP_LMAX:
        raise ValueError(f"Spectral gaps need lmax >= {MIN_GAP_LMAX}, got {lmax}")
    if m1 < 0:
        raise ValueError(f"m1 must be nonnegative, got {m1}")
    floor = chain_floor(block, m1)
    if floor > lmax:
        raise ValueError(f"Chain ({block.value}, m1={m1}) starts at {floor} > lmax={lmax}")
    q = q_matrix(block, m1, lmax)
    g = gram_matrix(block, m1, lmax)
    # Definiteness check of the Gram only; bisection counts the inertia of Q - shift * G.
    try:
        cholesky_banded(g.banded_upper())
    except LinAlgError as exc:
        raise DiagnosticError(
            f"Energy Gram of chain ({block.value}, m1={m1}) is not positive definite"
        ) from exc
    value, iterations = smallest_eigenvalue(q, g)
    try:
        dense = eigh(q.dense(), g.dense(), eigvals_only=True, subset_by_index=[0, 0])
    except LinAlgError as exc:
        raise DiagnosticError("Dense generalized eigensolve failed") from exc
    scale = 8.0 * math.pi
    report = GapReport(
        block=block.value,
        m1=m1,
        lmax=lmax,
        floor=floor,
        dimension=q.size,
        lambda_min=value * scale,
        residual=abs(value - float(dense[0])) * scale,
        iterations=iterations,
    )
    logger.info(
        "Gap %s m1=%d lmax=%d: %.12f (residual %.2e)",
        block.value,
        m1,
        lmax,
        report.lambda_min,
        report.residual,
    )
    return report


def gap_survey(
    lmax: int, mmax: int, blocks: Iterable[Block | str] = (Block.F0, Block.F1)
) -> List[GapReport]:
    """Gaps for every block and every 0 <= m1 <= mmax whose chain fits below lmax."""
    if mmax < 0:
        raise ValueError(f"mmax must be nonnegative, got {mmax}")
    reports: List[GapReport] = []
    for block in blocks:
        for m1 in range(mmax + 1):
            if chain_floor(block, m1) > lmax:
                continue
            reports.append(spectral_gap(block, m1, lmax))
    return reports
