"""Energy space in Penrose coefficients: inner product, maximiser, tangent space, projections."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from strichartz_gap.errors import DiagnosticError
from strichartz_gap.harmonics.coupling import c5
from strichartz_gap.harmonics.lattice import ZERO_M, CoeffField, MultiIndex, lower_indices
from strichartz_gap.special.functions import assoc_legendre, sphere_area
from strichartz_gap.special.quadrature import jacobi_rule

logger = logging.getLogger(__name__)

COMPONENTS = ("f0", "f1")


@dataclass(frozen=True)
class SphereState:
    """Penrose-transformed initial data (F0, F1); both components share one lmax."""

    f0: CoeffField
    f1: CoeffField

    def __post_init__(self) -> None:
        lmax = max(self.f0.lmax, self.f1.lmax)
        if self.f0.lmax != lmax:
            object.__setattr__(self, "f0", self.f0.padded(lmax))
        if self.f1.lmax != lmax:
            object.__setattr__(self, "f1", self.f1.padded(lmax))

    @classmethod
    def zero(cls, lmax: int = 0) -> SphereState:
        return cls(CoeffField({}, lmax), CoeffField({}, lmax))

    @classmethod
    def from_f0(cls, f0: CoeffField) -> SphereState:
        return cls(f0, CoeffField({}, f0.lmax))

    @classmethod
    def from_f1(cls, f1: CoeffField) -> SphereState:
        return cls(CoeffField({}, f1.lmax), f1)

    @property
    def lmax(self) -> int:
        return self.f0.lmax

    @property
    def is_zonal(self) -> bool:
        return self.f0.is_zonal and self.f1.is_zonal

    def component(self, name: str) -> CoeffField:
        if name not in COMPONENTS:
            raise ValueError(f"Unknown component {name!r}; expected one of {COMPONENTS}")
        return self.f0 if name == "f0" else self.f1

    def add(self, other: SphereState) -> SphereState:
        return SphereState(self.f0.add(other.f0), self.f1.add(other.f1))

    def sub(self, other: SphereState) -> SphereState:
        return self.add(other.scale(-1.0))

    def scale(self, factor: float) -> SphereState:
        return SphereState(self.f0.scale(factor), self.f1.scale(factor))

    def padded(self, lmax: int) -> SphereState:
        return SphereState(self.f0.padded(lmax), self.f1.padded(lmax))

    def to_json(self) -> Dict[str, Any]:
        return {"f0": self.f0.to_json(), "f1": self.f1.to_json()}

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> SphereState:
        missing = [name for name in COMPONENTS if name not in payload]
        if missing:
            raise ValueError(f"Sphere state is missing component(s): {', '.join(missing)}")
        return cls(CoeffField.from_json(payload["f0"]), CoeffField.from_json(payload["f1"]))


def _position_pairing(x: CoeffField, y: CoeffField) -> float:
    total = 0.0
    for index, value in x.items():
        ell, m, m1 = index.ell, index.m, index.m1
        total += value * (
            (ell + 2) ** 2 * y[index]
            + c5(ell, m1) * (ell + 2) * (ell + 3) * y.get(ell + 1, m)
            + c5(ell - 1, m1) * (ell + 1) * (ell + 2) * y.get(ell - 1, m)
        )
    return total


def _velocity_pairing(x: CoeffField, y: CoeffField) -> float:
    total = 0.0
    for index, value in x.items():
        ell, m, m1 = index.ell, index.m, index.m1
        total += value * (
            y[index] + c5(ell, m1) * y.get(ell + 1, m) + c5(ell - 1, m1) * y.get(ell - 1, m)
        )
    return total


def h_inner(x: SphereState, y: SphereState) -> float:
    """Energy inner product of two states written in sphere coefficients."""
    return _position_pairing(x.f0, y.f0) + _velocity_pairing(x.f1, y.f1)


def h_norm_sq(x: SphereState) -> float:
    return h_inner(x, x)


def fstar(lmax: int = 0) -> SphereState:
    """The maximiser: F0 = 1, F1 = 0, i.e. a single coefficient sqrt|S^5| at (0, 0)."""
    if lmax < 0:
        raise ValueError(f"lmax must be nonnegative, got {lmax}")
    coefficient = math.sqrt(sphere_area(5))
    return SphereState.from_f0(CoeffField({MultiIndex(0): coefficient}, lmax))


def tilde_violation(x: SphereState) -> Optional[tuple[str, MultiIndex]]:
    """Return the first coefficient that breaks tilde-orthogonality, if any."""
    for index, value in x.f0.items():
        if index.ell <= 1 and value != 0.0:
            return "f0", index
    for index, value in x.f1.items():
        if index.ell <= 1 and index.is_zonal and value != 0.0:
            return "f1", index
    return None


def project_tilde(x: SphereState) -> SphereState:
    """Zero F0 at every degree <= 1 and F1 at the zonal degrees 0 and 1."""
    f0 = {index: value for index, value in x.f0.items() if index.ell > 1}
    f1 = {
        index: value
        for index, value in x.f1.items()
        if not (index.ell <= 1 and index.is_zonal)
    }
    return SphereState(CoeffField(f0, x.lmax), CoeffField(f1, x.lmax))


@dataclass(frozen=True)
class MonomialCoefficients:
    """Sphere coefficients of the monomials 1, X0 and X_j (j >= 1)."""

    constant: float
    zonal: float
    transverse: float


@lru_cache(maxsize=1)
def tangent_monomial_coefficients() -> MonomialCoefficients:
    """Compute the monomial-to-coefficient constants from the Legendre functions.

    The S^4 factor of a degree-one harmonic orthogonal to X0 is a coordinate function
    with squared L^2 norm |S^4|/5.
    """
    rule = jacobi_rule(8)
    t = rule.nodes
    area4 = sphere_area(4)
    constant = math.sqrt(area4) * float(np.dot(rule.weights, assoc_legendre(0, 0, t)))
    zonal = math.sqrt(area4) * float(np.dot(rule.weights, t * assoc_legendre(1, 0, t)))
    transverse = math.sqrt(area4 / 5.0) * float(
        np.dot(rule.weights, np.sqrt(1.0 - t * t) * assoc_legendre(1, 1, t))
    )
    return MonomialCoefficients(constant, zonal, transverse)


@dataclass(frozen=True)
class TangentBasis:
    """The nine states spanning the tangent space of the maximiser orbit."""

    states: tuple[SphereState, ...]
    labels: tuple[str, ...]

    def gram(self) -> np.ndarray:
        size = len(self.states)
        matrix = np.empty((size, size))
        for i in range(size):
            for j in range(i, size):
                matrix[i, j] = matrix[j, i] = h_inner(self.states[i], self.states[j])
        return matrix


def tangent_basis(lmax: int = 1) -> TangentBasis:
    """Basis of (1+X0)^2 (a_j X_j + a_6) in position and (1+X0)^3 (b_0 X0 + b_1) in velocity."""
    lmax = max(lmax, 1)
    kappa = tangent_monomial_coefficients()
    states: list[SphereState] = [fstar(lmax)]
    labels: list[str] = ["f0:1"]
    states.append(SphereState.from_f0(CoeffField({MultiIndex(1): kappa.zonal}, lmax)))
    labels.append("f0:X0")
    transverse = [m for m in lower_indices(1) if m != ZERO_M]
    for position, m in enumerate(transverse, start=1):
        states.append(
            SphereState.from_f0(CoeffField({MultiIndex(1, m): kappa.transverse}, lmax))
        )
        labels.append(f"f0:X{position}")
    states.append(SphereState.from_f1(CoeffField({MultiIndex(0): kappa.constant}, lmax)))
    labels.append("f1:1")
    states.append(SphereState.from_f1(CoeffField({MultiIndex(1): kappa.zonal}, lmax)))
    labels.append("f1:X0")
    return TangentBasis(tuple(states), tuple(labels))


@dataclass(frozen=True)
class OrthogonalDecomposition:
    """x = c * fstar + tangent + perp with perp energy-orthogonal to the tangent space."""

    c: float
    tangent: SphereState
    perp: SphereState


def _combine(states: Sequence[SphereState], coefficients: Sequence[float], lmax: int) -> SphereState:
    total = SphereState.zero(lmax)
    for state, coefficient in zip(states, coefficients):
        if coefficient != 0.0:
            total = total.add(state.scale(float(coefficient)))
    return total


def project_orth(x: SphereState) -> OrthogonalDecomposition:
    """Split off the energy-orthogonal projection onto the tangent space.

    The energy Gram is not diagonal in coefficients, so this is a 9x9 normal-equation
    solve rather than coefficient zeroing.
    """
    lmax = max(x.lmax, 1)
    basis = tangent_basis(lmax)
    gram = basis.gram()
    rhs = np.array([h_inner(state, x) for state in basis.states])
    try:
        factor = cho_factor(gram)
    except LinAlgError as exc:
        raise DiagnosticError("Tangent-space Gram matrix is not positive definite") from exc
    coefficients = cho_solve(factor, rhs)
    c = float(coefficients[0])
    tangent = _combine(basis.states[1:], coefficients[1:], lmax)
    perp = x.padded(lmax).sub(fstar(lmax).scale(c)).sub(tangent)
    logger.debug("Orthogonal projection: c=%.6g", c)
    return OrthogonalDecomposition(c=c, tangent=tangent, perp=perp)


def decompose_tangent_part(p: SphereState) -> tuple[SphereState, SphereState]:
    """Return (g, h): g tilde-orthogonal and h supported on the tangent coefficients."""
    g = project_tilde(p)
    return g, p.sub(g)


def random_tilde_state(
    rng: np.random.Generator,
    lmax: int,
    *,
    chains: int = 3,
    zonal: bool = False,
    components: Sequence[str] = COMPONENTS,
) -> SphereState:
    """Draw a tilde-orthogonal state with full chains on a few lower-index tuples."""
    if lmax < 2:
        raise ValueError(f"Tilde-orthogonal states need lmax >= 2, got {lmax}")
    if zonal:
        chosen = [ZERO_M]
    else:
        candidates = list(lower_indices(min(lmax, 4)))
        picks = rng.choice(len(candidates), size=min(chains, len(candidates)), replace=False)
        chosen = [candidates[int(i)] for i in sorted(picks)]
    entries: Dict[str, Dict[MultiIndex, float]] = {"f0": {}, "f1": {}}
    for m in chosen:
        m1 = m[0]
        if "f0" in components:
            for ell in range(max(2, m1), lmax + 1):
                entries["f0"][MultiIndex(ell, m)] = float(rng.standard_normal())
        if "f1" in components:
            floor = 2 if m == ZERO_M else max(1, m1)
            for ell in range(floor, lmax + 1):
                entries["f1"][MultiIndex(ell, m)] = float(rng.standard_normal())
    return SphereState(CoeffField(entries["f0"], lmax), CoeffField(entries["f1"], lmax))
