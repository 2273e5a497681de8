"""Gauss quadrature for the weight (1 - t^2)^(3/2) on [-1, 1]."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal
from scipy.special import gammaln

from strichartz_gap.errors import DiagnosticError

logger = logging.getLogger(__name__)

# Integral of (1 - t^2)^(3/2) over [-1, 1].
WEIGHT_MASS = 3.0 * math.pi / 8.0

# Gegenbauer parameter of the weight: (1 - t^2)^(lambda - 1/2) with lambda = 2.
_LAMBDA = 2.0


def default_order(lmax: int) -> int:
    """Node count that integrates every bilinear Legendre product up to ``lmax`` exactly."""
    return 2 * (lmax + 8)


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gauss rule; the arrays are read-only."""

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def __post_init__(self) -> None:
        nodes = np.array(self.nodes, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("Quadrature nodes and weights must be 1-D arrays of equal length.")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def integrate(self, integrand: Callable[[np.ndarray], np.ndarray]) -> float:
        """Return sum_k w_k f(t_k) for a vectorized integrand."""
        values = np.asarray(integrand(self.nodes), dtype=float)
        return float(np.dot(self.weights, values))


def jacobi_rule(npoints: int) -> QuadratureRule:
    """Build the ``npoints``-node Gauss rule for (1 - t^2)^(3/2) via Golub-Welsch.

    The Jacobi matrix of the symmetric weight has zero diagonal and off-diagonal
    entries sqrt(k (k + 2 lambda - 1) / (4 (k + lambda)(k + lambda - 1))).
    """
    if npoints < 1:
        raise ValueError(f"Quadrature needs at least one node, got npoints={npoints}")
    if npoints == 1:
        return QuadratureRule(np.array([0.0]), np.array([WEIGHT_MASS]), 1)

    k = np.arange(1, npoints, dtype=float)
    off_diagonal = np.sqrt(
        k * (k + 2.0 * _LAMBDA - 1.0) / (4.0 * (k + _LAMBDA) * (k + _LAMBDA - 1.0))
    )
    diagonal = np.zeros(npoints)
    try:
        nodes, vectors = eigh_tridiagonal(diagonal, off_diagonal)
    except LinAlgError as exc:
        raise DiagnosticError(
            f"Jacobi matrix eigen-decomposition failed for npoints={npoints}"
        ) from exc

    weights = WEIGHT_MASS * vectors[0, :] ** 2
    # Enforce exact symmetry of the rule.
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    logger.debug("Built Gauss-Jacobi rule with %d nodes", npoints)
    return QuadratureRule(nodes, weights, npoints)


def beta_moment(k: int) -> float:
    """Return the exact integral of t^(2k) (1 - t^2)^(3/2) over [-1, 1]."""
    if k < 0:
        raise ValueError(f"Moment index must be nonnegative, got k={k}")
    return math.exp(float(gammaln(k + 0.5) + gammaln(2.5) - gammaln(k + 3.0)))
