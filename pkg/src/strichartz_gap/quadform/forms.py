"""The deficit quadratic form Q in sphere coefficients, by two independent routes.

The first route uses the tridiagonal coefficients alpha and beta directly. The second
assembles Q from its spacetime definition,

    Q = (16 pi / |f*|^2) [ (2 <f*|x>^2 + |f*|^2 |x|^2) / (8 pi)^2 - 3 I(x) ],

with the crossed integral I(x) = int (S f*)^2 (S x)^2 taken from closed-form
coefficient sums. Both assume tilde-orthogonal input. ``q_form_general`` evaluates the
same spacetime expression on arbitrary states, with I(x) integrated exactly in T.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import sympy

from strichartz_gap.energy.space import SphereState, fstar, h_inner, tilde_violation
from strichartz_gap.errors import PreconditionError
from strichartz_gap.harmonics.coupling import c5
from strichartz_gap.harmonics.lattice import CoeffField
from strichartz_gap.quadform.trig import TrigPolynomial

logger = logging.getLogger(__name__)

RationalLike = Union[Fraction, int, str]

SHARP_CONSTANT = Fraction(36, 85)


class Block(str, Enum):
    """Position (F0) or velocity (F1) component of the form."""

    F0 = "F0"
    F1 = "F1"


def as_fraction(value: RationalLike | float) -> Fraction:
    """Parse ``"p/q"`` strings, integers and Fractions; floats are taken exactly."""
    if isinstance(value, Fraction):
        return value
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"Not an exact rational: {value!r}") from exc


def _require_tilde(x: SphereState) -> None:
    violation = tilde_violation(x)
    if violation is not None:
        component, index = violation
        raise PreconditionError(
            f"State is not tilde-orthogonal: {component} coefficient at {index.label()} "
            f"is {x.component(component)[index]!r}"
        )


def alpha_numerator(ell: int, m1: int) -> int:
    return ell**4 + 8 * ell**3 + 11 * ell**2 - 20 * ell - 12 + 6 * m1**2 + 18 * m1


def alpha_beta(ell: int, m1: int) -> tuple[float, float]:
    """Diagonal and off-diagonal coefficients of the tridiagonal form at (ell, m1)."""
    if ell < 2 or not 0 <= m1 <= ell:
        raise ValueError(f"alpha/beta need ell >= 2 and 0 <= m1 <= ell, got ({ell}, {m1})")
    alpha = alpha_numerator(ell, m1) / ((ell + 1) * (ell + 3))
    beta = (ell - 1) * (ell + 6) * math.sqrt(
        (ell + 1 - m1) * (ell + 4 + m1) / ((ell + 2) * (ell + 3))
    )
    return alpha, beta


def _chain_pairs(field: CoeffField):
    for index, value in field.items():
        yield index.ell, index.m, index.m1, value


def q_form(x: SphereState) -> float:
    """Q(x, x) for a tilde-orthogonal state from the alpha/beta coefficients."""
    _require_tilde(x)
    position = 0.0
    for ell, m, m1, value in _chain_pairs(x.f0):
        alpha, beta = alpha_beta(ell, m1)
        position += alpha * value * value + beta * value * x.f0.get(ell + 1, m)
    velocity = 0.0
    for ell, m, m1, value in _chain_pairs(x.f1):
        if ell == 1:
            velocity += value * value / 3.0
            continue
        alpha, beta = alpha_beta(ell, m1)
        velocity += alpha * value * value / (ell + 2) ** 2
        velocity += beta * value * x.f1.get(ell + 1, m) / ((ell + 2) * (ell + 3))
    return (position + velocity) / (4.0 * math.pi)


def _diagonal_weight(ell: int, m1: int) -> float:
    return (2 * ell**2 + 8 * ell - m1**2 - 3 * m1 + 4) / (2.0 * (ell + 1) * (ell + 3))


def crossed_sum(x: SphereState) -> float:
    """int (S f*)^2 (S x)^2 from its coefficient sums; tilde-orthogonal input only.

    The velocity sum runs over G = F1 / (ell + 2) and carries the extra degree-one
    summands 1/2 G(1)^2 + 2 C5(1, 1) G(1) G(2).
    """
    _require_tilde(x)
    total = 0.0
    for ell, m, m1, value in _chain_pairs(x.f0):
        total += _diagonal_weight(ell, m1) * value * value
        total += 2.0 * c5(ell, m1) * value * x.f0.get(ell + 1, m)
    for ell, m, m1, value in _chain_pairs(x.f1):
        g = value / (ell + 2)
        g_next = x.f1.get(ell + 1, m) / (ell + 3)
        if ell == 1:
            total += 0.5 * g * g + 2.0 * c5(1, m1) * g * g_next
        else:
            total += _diagonal_weight(ell, m1) * g * g + 2.0 * c5(ell, m1) * g * g_next
    return math.pi * total / 4.0


def _chain_amplitude(ell: int, position: Dict[int, float], velocity: Dict[int, float]) -> TrigPolynomial:
    """cos((ell+2)T) F0(ell) + sin((ell+2)T) F1(ell) / (ell+2)."""
    frequency = ell + 2
    return TrigPolynomial.cosine(frequency, position.get(ell, 0.0)) + TrigPolynomial.sine(
        frequency, velocity.get(ell, 0.0) / frequency
    )


def crossed_integral_exact(x: SphereState) -> float:
    """int (S f*)^2 (S x)^2 for any state, integrating each chain exactly in T.

    On a fixed lower-index chain, (cos T + X0) U has Y_ell coefficient
    cos T U_ell + C5(ell-1) U_{ell-1} + C5(ell) U_{ell+1}; multiplying by cos 2T and
    using orthonormality on S^5 leaves one-dimensional trigonometric integrals.
    """
    position_chains = x.f0.chains()
    velocity_chains = x.f1.chains()
    total = 0.0
    for m in sorted(set(position_chains) | set(velocity_chains)):
        m1 = m[0]
        position = position_chains.get(m, {})
        velocity = velocity_chains.get(m, {})
        amplitudes = {
            ell: _chain_amplitude(ell, position, velocity)
            for ell in set(position) | set(velocity)
        }
        top = max(amplitudes)
        for ell in range(m1, top + 2):
            inner = TrigPolynomial.zero()
            if ell in amplitudes:
                inner = inner + amplitudes[ell].times_cos(1)
            if ell - 1 in amplitudes:
                inner = inner + amplitudes[ell - 1].scaled(c5(ell - 1, m1))
            if ell + 1 in amplitudes:
                inner = inner + amplitudes[ell + 1].scaled(c5(ell, m1))
            total += inner.times_cos(2).integral_of_square()
    return 0.5 * total


def _assemble_spacetime(x: SphereState, crossed: float) -> float:
    star = fstar(x.lmax)
    star_norm = h_inner(star, star)
    pairing = h_inner(star, x)
    bracket = (2.0 * pairing**2 + star_norm * h_inner(x, x)) / (8.0 * math.pi) ** 2
    return 16.0 * math.pi / star_norm * (bracket - 3.0 * crossed)


def q_form_via_spacetime(x: SphereState) -> float:
    """Q(x, x) assembled from the spacetime expression and the closed-form sums."""
    _require_tilde(x)
    return _assemble_spacetime(x, crossed_sum(x))


def q_form_general(x: SphereState) -> float:
    """The spacetime expression for Q on an arbitrary state (second derivative of the deficit)."""
    return _assemble_spacetime(x, crossed_integral_exact(x))


@dataclass(frozen=True)
class ExactRow:
    """One row of the changed-variable form, in units of 1/pi.

    a = a_pi / pi and b = sqrt(factor_sq) * bracket_pi / pi.
    """

    ell: int
    m1: int
    block: Block
    constant_C: Fraction
    a_pi: Fraction
    bracket_pi: Fraction
    factor_sq: Fraction

    @property
    def abs_bracket_pi(self) -> Fraction:
        return abs(self.bracket_pi)

    def b_pi(self) -> Optional[Fraction]:
        """b * pi as an exact rational when the square-root factor is rational."""
        root = sympy.sqrt(sympy.Rational(self.factor_sq.numerator, self.factor_sq.denominator))
        if not root.is_Rational:
            return None
        return Fraction(int(root.p), int(root.q)) * self.bracket_pi

    @property
    def a(self) -> float:
        return float(self.a_pi) / math.pi

    @property
    def b(self) -> float:
        return math.sqrt(self.factor_sq) * float(self.bracket_pi) / math.pi


def exact_row(ell: int, m1: int, C: RationalLike, block: Block | str = Block.F0) -> ExactRow:
    """Exact bookkeeping of (a, b) after the change of variables.

    Position: F0 = H / sqrt((ell+1)(ell+3)). Velocity: F1 = H (ell+2) / sqrt((ell+1)(ell+3)).
    Both give the same coefficients for ell >= 2; the velocity block also has the
    degree-one row, which couples to degree two only through the energy Gram.
    """
    block = Block(block)
    constant = as_fraction(C)
    if not 0 <= m1 <= ell:
        raise ValueError(f"Expected 0 <= m1 <= ell, got ({ell}, {m1})")
    if ell == 1:
        if block is not Block.F1 or m1 != 1:
            raise ValueError("The degree-one row exists only in the F1 block with m1 = 1")
        return ExactRow(
            ell=1,
            m1=1,
            block=block,
            constant_C=constant,
            a_pi=Fraction(3, 32) - constant * Fraction(9, 64),
            bracket_pi=-constant / 8,
            factor_sq=Fraction(3, 5),
        )
    if ell < 2:
        raise ValueError(f"Rows start at ell = 2 (ell = 1 for F1), got ell={ell}")
    a_pi = Fraction(alpha_numerator(ell, m1), 4 * (ell + 1) ** 2 * (ell + 3) ** 2) - constant * Fraction(
        (ell + 2) ** 2, 8 * (ell + 1) * (ell + 3)
    )
    bracket_pi = Fraction((ell - 1) * (ell + 6), 4 * (ell + 2) * (ell + 3)) - constant / 8
    factor_sq = Fraction((ell + 1 - m1) * (ell + 4 + m1), (ell + 1) * (ell + 4))
    return ExactRow(ell, m1, block, constant, a_pi, bracket_pi, factor_sq)


def reduced_coeffs(
    ell: int, m1: int, C: RationalLike | float, block: Block | str = Block.F0
) -> tuple[float, float]:
    """(a, b) at (ell, m1) for coercivity constant C, as floats."""
    row = exact_row(ell, m1, as_fraction(C), block)
    return row.a, row.b


@dataclass(frozen=True)
class BlockCoeffs:
    """alpha, beta and the changed-variable pair (a, b) at one (ell, m1).

    For the velocity row at ell = 1, alpha = 3 and beta = 0 reproduce the diagonal
    entry 3 F1^2 / 9 of the form.
    """

    ell: int
    m1: int
    alpha: float
    beta: float
    a: float
    b: float
    constant_C: float

    @classmethod
    def build(cls, ell: int, m1: int, C: RationalLike | float, block: Block | str = Block.F0) -> BlockCoeffs:
        block = Block(block)
        if block is Block.F1 and ell == 1:
            alpha, beta = 3.0, 0.0
        else:
            alpha, beta = alpha_beta(ell, m1)
        a, b = reduced_coeffs(ell, m1, C, block)
        return cls(ell, m1, alpha, beta, a, b, float(as_fraction(C)))


def _position_scale(ell: int) -> float:
    return math.sqrt((ell + 1) * (ell + 3))


def reduced_form(x: SphereState, C: RationalLike | float) -> float:
    """sum a H^2 + b H H' in the changed variables; equals Q - (C / 8 pi) |x|^2."""
    _require_tilde(x)
    constant = as_fraction(C)
    total = 0.0
    cache: Dict[Tuple[int, int, Block], Tuple[float, float]] = {}

    def coefficients(ell: int, m1: int, block: Block) -> Tuple[float, float]:
        key = (ell, m1, block)
        if key not in cache:
            cache[key] = reduced_coeffs(ell, m1, constant, block)
        return cache[key]

    for ell, m, m1, value in _chain_pairs(x.f0):
        h = value * _position_scale(ell)
        h_next = x.f0.get(ell + 1, m) * _position_scale(ell + 1)
        a, b = coefficients(ell, m1, Block.F0)
        total += a * h * h + b * h * h_next
    for ell, m, m1, value in _chain_pairs(x.f1):
        h = value * _position_scale(ell) / (ell + 2)
        h_next = x.f1.get(ell + 1, m) * _position_scale(ell + 1) / (ell + 3)
        a, b = coefficients(ell, m1, Block.F1)
        total += a * h * h + b * h * h_next
    return total
