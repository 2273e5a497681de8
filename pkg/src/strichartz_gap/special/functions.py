"""Gegenbauer and Legendre families on spheres, normalized for S^5 harmonics."""

from __future__ import annotations

import logging
import math
from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from scipy.special import gammaln

logger = logging.getLogger(__name__)

RealOrArray = Union[float, np.ndarray]

# Degrees above this bound run but log a warning.
MAX_STABLE_DEGREE = 300


def _as_output(values: np.ndarray) -> RealOrArray:
    if values.ndim == 0:
        return float(values)
    return values


def _check_degree(degree: int) -> None:
    if degree > MAX_STABLE_DEGREE:
        logger.warning(
            "Degree %d exceeds the tested recurrence range (<= %d)", degree, MAX_STABLE_DEGREE
        )


def gegenbauer(nu: float, n: int, t: ArrayLike) -> RealOrArray:
    """Return C_n^(nu)(t) by the three-term recurrence of the generating function."""
    if nu <= 0:
        raise ValueError(f"Gegenbauer parameter must be positive, got nu={nu}")
    if n < 0:
        raise ValueError(f"Degree must be nonnegative, got n={n}")
    _check_degree(n)
    x = np.asarray(t, dtype=float)
    previous = np.ones_like(x)
    if n == 0:
        return _as_output(previous)
    current = 2.0 * nu * x
    for k in range(2, n + 1):
        previous, current = current, (
            2.0 * (k + nu - 1.0) * x * current - (k + 2.0 * nu - 2.0) * previous
        ) / k
    return _as_output(current)


def legendre_poly(dim: int, ell: int, t: ArrayLike) -> RealOrArray:
    """Return the Legendre polynomial of degree ``ell`` in dimension ``dim``.

    This is C_ell^(nu)(t) / C_ell^(nu)(1) with nu = (dim - 2)/2, evaluated with the
    normalized recurrence ``(k+d-3) P_k = (2k+d-4) t P_{k-1} - (k-1) P_{k-2}`` so that
    no binomial growth is carried through the loop.
    """
    if dim < 3:
        raise ValueError(f"Dimension must be at least 3, got dim={dim}")
    if ell < 0:
        raise ValueError(f"Degree must be nonnegative, got ell={ell}")
    _check_degree(ell)
    x = np.asarray(t, dtype=float)
    previous = np.ones_like(x)
    if ell == 0:
        return _as_output(previous)
    current = x.copy()
    for k in range(2, ell + 1):
        previous, current = current, (
            (2 * k + dim - 4) * x * current - (k - 1) * previous
        ) / (k + dim - 3)
    return _as_output(current)


def log_sphere_area(n: int) -> float:
    """Return log |S^n| for the unit n-sphere in R^(n+1)."""
    if n < 0:
        raise ValueError(f"Sphere dimension must be nonnegative, got n={n}")
    half = (n + 1) / 2.0
    return math.log(2.0) + half * math.log(math.pi) - float(gammaln(half))


def sphere_area(n: int) -> float:
    """Return |S^n| = 2 pi^((n+1)/2) / Gamma((n+1)/2)."""
    return math.exp(log_sphere_area(n))


def norm_constant(ell: int, m: int) -> float:
    """Return N_{ell,m}, making P_ell^m orthonormal against (1-t^2)^(3/2)."""
    if not 0 <= m <= ell:
        raise ValueError(f"Expected 0 <= m <= ell, got ell={ell}, m={m}")
    log_value = (
        math.log(2 * ell + 4)
        + float(gammaln(ell + m + 4))
        - float(gammaln(ell - m + 1))
        - float(gammaln(2 * m + 5))
        + log_sphere_area(2 * m + 4)
        - log_sphere_area(2 * m + 5)
    )
    return math.exp(0.5 * log_value)


def assoc_legendre(ell: int, m: int, t: ArrayLike, *, norm_scale: float = 1.0) -> RealOrArray:
    """Return the normalized associated Legendre function P_ell^m(6; t).

    The value is zero when ``m > ell``. ``norm_scale`` multiplies the normalization
    constant and exists so audits can check their own sensitivity.
    """
    if m < 0:
        raise ValueError(f"Order must be nonnegative, got m={m}")
    x = np.asarray(t, dtype=float)
    if m > ell:
        return _as_output(np.zeros_like(x))
    envelope = np.clip(1.0 - x * x, 0.0, None) ** (0.5 * m)
    polynomial = np.asarray(legendre_poly(2 * m + 6, ell - m, x))
    return _as_output(norm_scale * norm_constant(ell, m) * envelope * polynomial)


def assoc_legendre_table(lmax: int, m: int, t: ArrayLike) -> np.ndarray:
    """Return an array of shape (lmax+1, len(t)) holding P_ell^m(6; t) for ell <= lmax.

    Rows with ``ell < m`` are zero.
    """
    if lmax < 0 or m < 0:
        raise ValueError(f"Expected nonnegative lmax and m, got lmax={lmax}, m={m}")
    x = np.atleast_1d(np.asarray(t, dtype=float))
    table = np.zeros((lmax + 1, x.size))
    if m > lmax:
        return table
    dim = 2 * m + 6
    envelope = np.clip(1.0 - x * x, 0.0, None) ** (0.5 * m)
    previous = np.ones_like(x)
    current = x.copy()
    for ell in range(m, lmax + 1):
        k = ell - m
        if k == 0:
            polynomial = previous
        elif k == 1:
            polynomial = current
        else:
            previous, current = current, (
                (2 * k + dim - 4) * x * current - (k - 1) * previous
            ) / (k + dim - 3)
            polynomial = current
        table[ell] = norm_constant(ell, m) * envelope * polynomial
    return table


def recurrence_coeffs(ell: int, m: int) -> tuple[float, float, float]:
    """Return (a, b, c) with a P_ell^m - b t P_{ell-1}^m + c P_{ell-2}^m = 0."""
    if ell < 1 or not 0 <= m <= ell:
        raise ValueError(f"Expected ell >= 1 and 0 <= m <= ell, got ell={ell}, m={m}")
    a = math.sqrt((ell - m) * (ell + m + 3) / ((2 * ell + 4) * (ell + m + 2)))
    b = math.sqrt((2 * ell + 2) / (ell + m + 2))
    c = math.sqrt(max(ell - m - 1, 0) / (2 * ell))
    return a, b, c
