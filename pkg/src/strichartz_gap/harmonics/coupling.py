"""The coupling coefficient C5 and multiplication by X0 in coefficient space."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from strichartz_gap.harmonics.lattice import CoeffField, MultiIndex
from strichartz_gap.special.functions import assoc_legendre_table
from strichartz_gap.special.quadrature import QuadratureRule, default_order, jacobi_rule

logger = logging.getLogger(__name__)

COUPLING_TOLERANCE = 1e-9


def c5(ell: int, m1: int) -> float:
    """Return C5(ell, m1), or 0 outside 0 <= m1 <= ell."""
    if not 0 <= m1 <= ell:
        return 0.0
    return 0.5 * math.sqrt((ell - m1 + 1) * (ell + m1 + 4) / ((ell + 2) * (ell + 3)))


def mult_x0(f: CoeffField) -> CoeffField:
    """Multiply by X0; the result lives at lmax + 1 so no boundary term is lost."""
    out: Dict[MultiIndex, float] = {}
    for index, value in f.items():
        up = MultiIndex(index.ell + 1, index.m)
        out[up] = out.get(up, 0.0) + c5(index.ell, index.m1) * value
        down = index.shifted(-1)
        if down is not None:
            out[down] = out.get(down, 0.0) + c5(index.ell - 1, index.m1) * value
    return CoeffField(out, f.lmax + 1)


def x0_matrix(m1: int, lmax: int) -> np.ndarray:
    """Dense matrix of multiplication by X0 on one chain, rows ell = m1..lmax."""
    if not 0 <= m1 <= lmax:
        raise ValueError(f"Expected 0 <= m1 <= lmax, got m1={m1}, lmax={lmax}")
    size = lmax - m1 + 1
    matrix = np.zeros((size, size))
    for row in range(size - 1):
        value = c5(m1 + row, m1)
        matrix[row, row + 1] = value
        matrix[row + 1, row] = value
    return matrix


@dataclass
class CouplingAudit:
    """Outcome of comparing quadrature X0 matrix elements with C5."""

    lmax: int
    mmax: int
    max_deviation: float
    worst_pair: Optional[tuple[int, int, int]] = None
    flagged: list[tuple[int, int, int, float]] = field(default_factory=list)
    tolerance: float = COUPLING_TOLERANCE

    @property
    def passed(self) -> bool:
        return not self.flagged


def x0_coupling_audit(
    lmax: int, mmax: int, rule: QuadratureRule | None = None
) -> CouplingAudit:
    """Integrate t P_ell^m P_ell'^m against the weight and compare with C5(min, m)."""
    if not (0 <= mmax <= 30 and 0 <= lmax <= 30):
        raise ValueError(f"Coupling audit supports lmax, mmax <= 30, got {lmax}, {mmax}")
    rule = rule or jacobi_rule(default_order(lmax))
    audit = CouplingAudit(lmax=lmax, mmax=mmax, max_deviation=0.0)
    for m1 in range(min(mmax, lmax) + 1):
        table = assoc_legendre_table(lmax, m1, rule.nodes)
        moments = (table * (rule.weights * rule.nodes)) @ table.T
        for ell in range(m1, lmax + 1):
            for other in range(m1, lmax + 1):
                expected = c5(min(ell, other), m1) if abs(ell - other) == 1 else 0.0
                deviation = abs(moments[ell, other] - expected)
                if deviation > audit.max_deviation:
                    audit.max_deviation = deviation
                    audit.worst_pair = (ell, other, m1)
                if deviation > audit.tolerance:
                    audit.flagged.append((ell, other, m1, deviation))
    logger.info(
        "X0 coupling audit lmax=%d mmax=%d max deviation %.3e", lmax, mmax, audit.max_deviation
    )
    return audit
