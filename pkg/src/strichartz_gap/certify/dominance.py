"""Diagonal-dominance certificates for the changed-variable tridiagonal form.

A row (ell, m1) is dominant when a(ell) >= (|b(ell)| + |b(ell - 1)|) / 2, with the
b(ell - 1) term absent at the bottom of a chain. Zonal rows are exact rationals over pi,
rows with m1 = 1 carry square roots and are enclosed with outward-rounded intervals, and
rows with m1 >= 2 follow from the zonal ones by an exact monotonicity argument. Every
degree beyond the explicit range is covered by a symbolic tail certificate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy
from mpmath import iv

from strichartz_gap.quadform.forms import (
    SHARP_CONSTANT,
    Block,
    ExactRow,
    RationalLike,
    alpha_numerator,
    as_fraction,
    exact_row,
)

logger = logging.getLogger(__name__)

DEFAULT_LCUT = 50

_ELL = sympy.Symbol("l", positive=True)


class Verdict(str, Enum):
    CERTIFIED = "certified"
    FALSIFIED = "falsified"
    INCONCLUSIVE = "inconclusive"

    @property
    def exit_code(self) -> int:
        return {Verdict.CERTIFIED: 0, Verdict.FALSIFIED: 1, Verdict.INCONCLUSIVE: 2}[self]


def combine_verdicts(verdicts: Iterable[Verdict]) -> Verdict:
    """Falsified wins over inconclusive, which wins over certified."""
    seen = set(verdicts)
    if Verdict.FALSIFIED in seen:
        return Verdict.FALSIFIED
    if Verdict.INCONCLUSIVE in seen:
        return Verdict.INCONCLUSIVE
    return Verdict.CERTIFIED


def _fraction_str(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class CertificateRow:
    """Margin of one dominance row: exact (times 1/pi) or an enclosing interval."""

    ell: int
    m1: int
    value: float
    exact_pi: Optional[Fraction] = None
    interval: Optional[Tuple[float, float]] = None

    @property
    def verdict(self) -> Verdict:
        if self.exact_pi is not None:
            return Verdict.CERTIFIED if self.exact_pi >= 0 else Verdict.FALSIFIED
        lo, hi = self.interval
        if lo >= 0:
            return Verdict.CERTIFIED
        if hi < 0:
            return Verdict.FALSIFIED
        return Verdict.INCONCLUSIVE

    def to_json(self) -> Dict[str, Any]:
        if self.exact_pi is not None:
            margin: Dict[str, Any] = {"exact": f"{_fraction_str(self.exact_pi)} over pi"}
        else:
            margin = {"interval": [self.interval[0], self.interval[1]]}
        return {"l": self.ell, "m1": self.m1, "margin": margin, "value": self.value}


@dataclass(frozen=True)
class ReductionStep:
    """Exact comparison of rows with m1 >= 1 against the zonal rows.

    a(ell, m1) - a(ell, 0) has numerator ``a_gap`` over a positive denominator, and
    (ell+1)(ell+4) minus the square-root factor numerator equals ``factor_gap``; both are
    nonnegative polynomials in m1, so every margin is at least its zonal counterpart.
    """

    a_gap: str
    factor_gap: str
    holds: bool
    covers: str

    def to_json(self) -> Dict[str, Any]:
        return {
            "a_gap": self.a_gap,
            "factor_gap": self.factor_gap,
            "holds": self.holds,
            "covers": self.covers,
        }


@lru_cache(maxsize=1)
def monotonicity_reduction() -> ReductionStep:
    m1 = sympy.Symbol("m1", nonnegative=True)
    a_gap = sympy.expand(alpha_numerator(_ELL, m1) - alpha_numerator(_ELL, 0))
    factor_gap = sympy.expand((_ELL + 1) * (_ELL + 4) - (_ELL + 1 - m1) * (_ELL + 4 + m1))
    holds = True
    for expr in (a_gap, factor_gap):
        poly = sympy.Poly(expr, m1)
        holds &= not expr.has(_ELL) and all(coeff >= 0 for coeff in poly.all_coeffs())
    return ReductionStep(
        a_gap=str(a_gap),
        factor_gap=str(factor_gap),
        holds=bool(holds),
        covers="m1 >= 2 at every degree; m1 = 1 beyond the explicit range",
    )


@dataclass(frozen=True)
class TailCertificate:
    """Positivity of the zonal margin for every ell > lcut.

    The margin times pi is ``numerator / denominator``, both with exact integer
    coefficients listed from the constant term upward.
    """

    constant_C: Fraction
    lcut: int
    numerator: Tuple[int, ...]
    denominator: Tuple[int, ...]
    criterion: Optional[str]
    bracket_nonnegative: bool
    verdict: Verdict
    witness: Optional[int] = None
    closed_form_residual: Optional[str] = None

    @property
    def poly_string(self) -> str:
        return str(sympy.Poly(list(reversed(self.numerator)), _ELL).as_expr())

    def to_json(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "C": _fraction_str(self.constant_C),
            "lcut": self.lcut,
            "poly": [str(c) for c in self.numerator],
            "denominator": [str(c) for c in self.denominator],
            "criterion": self.criterion,
            "bracket_nonnegative": self.bracket_nonnegative,
            "verdict": self.verdict.value,
        }
        if self.witness is not None:
            payload["witness"] = self.witness
        if self.closed_form_residual is not None:
            payload["closed_form_residual"] = self.closed_form_residual
        return payload


def _bracket_pi(ell: sympy.Expr, constant: sympy.Rational) -> sympy.Expr:
    return (ell - 1) * (ell + 6) / (4 * (ell + 2) * (ell + 3)) - constant / 8


def zonal_margin_expression(C: RationalLike) -> sympy.Expr:
    """pi times the zonal margin a(l) - (b(l) + b(l-1))/2 as a rational function of l."""
    fraction = as_fraction(C)
    constant = sympy.Rational(fraction.numerator, fraction.denominator)
    ell = _ELL
    a_pi = alpha_numerator(ell, 0) / (4 * (ell + 1) ** 2 * (ell + 3) ** 2) - constant * (
        ell + 2
    ) ** 2 / (8 * (ell + 1) * (ell + 3))
    return a_pi - (_bracket_pi(ell, constant) + _bracket_pi(ell - 1, constant)) / 2


def _integer_coeffs(poly: sympy.Poly) -> Tuple[int, ...]:
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


def _positivity_criterion(poly: sympy.Poly, start: int) -> Optional[str]:
    """Name the first criterion proving poly(l) > 0 for every l >= start, if any."""
    coeffs = poly.all_coeffs()
    if coeffs[0] > 0 and all(c >= 0 for c in coeffs):
        return "all-coeffs-positive"
    s = sympy.Symbol("s", nonnegative=True)
    shifted = sympy.Poly(poly.as_expr().subs(_ELL, start + s), s)
    shifted_coeffs = shifted.all_coeffs()
    if all(c >= 0 for c in shifted_coeffs) and shifted.eval(0) > 0:
        return "shifted-coeffs-positive"
    if coeffs[0] > 0 and poly.count_roots(inf=start) == 0 and poly.eval(start) > 0:
        return "root-isolation"
    return None


def _negative_witness(num: sympy.Poly, den: sympy.Poly, start: int) -> Optional[int]:
    """Smallest integer l >= start where the margin is negative, searched up to past the last real root."""
    upper_ends = [
        bounds[1] for poly in (num, den) for bounds, _multiplicity in poly.intervals()
    ]
    top = max([start] + [int(sympy.ceiling(end)) for end in upper_ends]) + 1
    for ell in range(start, top + 1):
        if num.eval(ell) * den.eval(ell) < 0:
            return ell
    return None


def _closed_form_residual(expr: sympy.Expr) -> str:
    """Difference from 1/(4(l+1)(l+3)) * ((l^2+4l+15)/((l+1)(l+3)) - 18/85)."""
    ell = _ELL
    closed = ((ell**2 + 4 * ell + 15) / ((ell + 1) * (ell + 3)) - sympy.Rational(18, 85)) / (
        4 * (ell + 1) * (ell + 3)
    )
    return str(sympy.cancel(expr - closed))


@lru_cache(maxsize=64)
def tail_certificate(constant: RationalLike = SHARP_CONSTANT, lcut: int = 2) -> TailCertificate:
    """Certify the zonal margin positive for every ell > lcut by exact polynomial algebra.

    b(ell, 0) >= 0 for ell >= lcut is checked at lcut alone: the bracket is increasing in ell.
    """
    C = as_fraction(constant)
    if not 0 < C < 1:
        raise ValueError(f"C must lie in (0, 1), got {C}")
    if lcut < 2:
        raise ValueError(f"Tail certificates start at lcut >= 2, got {lcut}")
    expr = sympy.cancel(sympy.together(zonal_margin_expression(C)))
    num_expr, den_expr = sympy.fraction(expr)
    _, num = sympy.Poly(num_expr, _ELL).clear_denoms(convert=True)
    _, den = sympy.Poly(den_expr, _ELL).clear_denoms(convert=True)
    num = num.primitive()[1]
    den = den.primitive()[1]
    if den.LC() < 0:
        num, den = -num, -den
    start = lcut + 1
    bracket_ok = exact_row(lcut, 0, C).bracket_pi >= 0
    residual = None
    if C == SHARP_CONSTANT:
        residual = _closed_form_residual(expr)
    criterion = None
    witness = None
    num_criterion = _positivity_criterion(num, start)
    den_criterion = _positivity_criterion(den, start)
    if num_criterion and den_criterion:
        criterion = num_criterion
    if residual not in (None, "0"):
        verdict = Verdict.FALSIFIED
    elif criterion and bracket_ok:
        verdict = Verdict.CERTIFIED
    else:
        witness = _negative_witness(num, den, start) if bracket_ok else None
        verdict = Verdict.FALSIFIED if witness is not None else Verdict.INCONCLUSIVE
    logger.debug(
        "Tail C=%s lcut=%d numerator %s criterion %s", C, lcut, num.as_expr(), criterion
    )
    return TailCertificate(
        constant_C=C,
        lcut=lcut,
        numerator=_integer_coeffs(num),
        denominator=_integer_coeffs(den),
        criterion=criterion,
        bracket_nonnegative=bool(bracket_ok),
        verdict=verdict,
        witness=witness,
        closed_form_residual=residual,
    )


@dataclass
class RationalCertificate:
    """Dominance certificate for one block and one constant."""

    block: Block
    constant_C: Fraction
    checked_range: Tuple[int, int]
    rows: List[CertificateRow]
    reduction: ReductionStep
    tail: TailCertificate
    notes: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> Verdict:
        row_verdicts = [row.verdict for row in self.rows]
        reduction = Verdict.CERTIFIED if self.reduction.holds else Verdict.INCONCLUSIVE
        return combine_verdicts(row_verdicts + [reduction, self.tail.verdict])

    @property
    def exit_code(self) -> int:
        return self.verdict.exit_code

    def failures(self) -> List[CertificateRow]:
        return [row for row in self.rows if row.verdict is not Verdict.CERTIFIED]

    def binding_row(self) -> CertificateRow:
        return min(self.rows, key=lambda row: (row.value, row.ell, row.m1))

    def row(self, ell: int, m1: int) -> CertificateRow:
        for candidate in self.rows:
            if candidate.ell == ell and candidate.m1 == m1:
                return candidate
        raise KeyError(f"No certificate row at ({ell}, {m1})")

    def to_json(self) -> Dict[str, Any]:
        return {
            "block": self.block.value,
            "C": _fraction_str(self.constant_C),
            "checked_range": list(self.checked_range),
            "rows": [row.to_json() for row in self.rows],
            "reduction": self.reduction.to_json(),
            "tail": self.tail.to_json(),
            "notes": list(self.notes),
            "verdict": self.verdict.value,
        }


def _sqrt_iv(value: Fraction):
    return iv.sqrt(iv.mpf(value.numerator) / iv.mpf(value.denominator))


def _frac_iv(value: Fraction):
    return iv.mpf(value.numerator) / iv.mpf(value.denominator)


def _midpoint(value) -> float:
    return (float(value.a) + float(value.b)) / 2


def _half_abs_b_iv(row: Optional[ExactRow]):
    if row is None:
        return iv.mpf(0)
    return _sqrt_iv(row.factor_sq) * _frac_iv(row.abs_bracket_pi) / 2


def _interval_row(current: ExactRow, previous: Optional[ExactRow]) -> CertificateRow:
    margin = (
        _frac_iv(current.a_pi) - _half_abs_b_iv(current) - _half_abs_b_iv(previous)
    ) / iv.pi
    lo, hi = float(margin.a), float(margin.b)
    return CertificateRow(current.ell, current.m1, value=_midpoint(margin), interval=(lo, hi))


def _exact_row(current: ExactRow, previous: Optional[ExactRow]) -> CertificateRow:
    # zonal square-root factor is exactly one
    margin_pi = current.a_pi - current.abs_bracket_pi / 2
    if previous is not None:
        margin_pi -= previous.abs_bracket_pi / 2
    return CertificateRow(
        current.ell, 0, value=float(margin_pi) / math.pi, exact_pi=margin_pi
    )


def chain_floor(block: Block | str, m1: int) -> int:
    """Lowest degree of a tilde-orthogonal chain with first lower index m1."""
    block = Block(block)
    if block is Block.F0:
        return max(2, m1)
    if m1 == 0:
        return 2
    return m1


def _chain_rows(block: Block, m1: int, C: Fraction, lcut: int) -> List[CertificateRow]:
    rows: List[CertificateRow] = []
    previous: Optional[ExactRow] = None
    for ell in range(chain_floor(block, m1), lcut + 1):
        current = exact_row(ell, m1, C, block)
        if m1 == 0:
            rows.append(_exact_row(current, previous))
        else:
            rows.append(_interval_row(current, previous))
        previous = current
    return rows


def _degree_one_note(C: Fraction) -> str:
    row = exact_row(1, 1, C, Block.F1)
    full = (_frac_iv(row.a_pi) - 2 * _half_abs_b_iv(row)) / iv.pi
    half = (_frac_iv(row.a_pi) - _half_abs_b_iv(row)) / iv.pi
    return (
        f"degree-one row certified as a~ - |b~|/2 = {_midpoint(half):.7f}; "
        f"the variant a~ - |b~| evaluates to {_midpoint(full):.7f}"
    )


def dominance_check(
    block: Block | str, C: RationalLike, lcut: int = DEFAULT_LCUT
) -> RationalCertificate:
    """Check every dominance row of one block at the constant C.

    Zonal rows (exact) and m1 = 1 rows (intervals) are enumerated up to lcut; the
    reduction covers m1 >= 2, and the tail covers degrees beyond lcut.
    """
    block = Block(block)
    constant = as_fraction(C)
    if not 0 < constant < 1:
        raise ValueError(f"C must lie in (0, 1), got {constant}")
    if lcut < 3:
        raise ValueError(f"lcut must be at least 3, got {lcut}")
    rows = _chain_rows(block, 0, constant, lcut) + _chain_rows(block, 1, constant, lcut)
    notes: List[str] = []
    if block is Block.F1:
        notes.append(_degree_one_note(constant))
    certificate = RationalCertificate(
        block=block,
        constant_C=constant,
        checked_range=(min(row.ell for row in rows), lcut),
        rows=rows,
        reduction=monotonicity_reduction(),
        tail=tail_certificate(constant, lcut),
        notes=notes,
    )
    logger.info(
        "Dominance %s C=%s lcut=%d: %s", block.value, constant, lcut, certificate.verdict.value
    )
    return certificate


def max_dominant_constant(
    tol: float = 1e-10,
    blocks: Sequence[Block | str] = (Block.F0, Block.F1),
    lcut: int = DEFAULT_LCUT,
) -> float:
    """Largest C for which every requested block is certified, by bisection on (0, 1)."""
    if tol <= 0:
        raise ValueError(f"tol must be positive, got {tol}")
    lo, hi = Fraction(0), Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        certified = all(
            dominance_check(block, mid, lcut).verdict is Verdict.CERTIFIED for block in blocks
        )
        if certified:
            lo = mid
        else:
            hi = mid
        logger.debug("Bisection bracket [%s, %s]", float(lo), float(hi))
    return float((lo + hi) / 2)
