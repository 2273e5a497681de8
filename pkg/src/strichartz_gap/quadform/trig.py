"""Real trigonometric polynomials in T with exact integration over one period."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class TrigPolynomial:
    """sum_k cos_coeffs[k] cos(kT) + sin_coeffs[k] sin(kT); sin_coeffs[0] is ignored."""

    cos_coeffs: np.ndarray
    sin_coeffs: np.ndarray

    @classmethod
    def zero(cls, size: int = 1) -> TrigPolynomial:
        return cls(np.zeros(size), np.zeros(size))

    @classmethod
    def cosine(cls, frequency: int, amplitude: float = 1.0) -> TrigPolynomial:
        poly = cls.zero(frequency + 1)
        poly.cos_coeffs[frequency] = amplitude
        return poly

    @classmethod
    def sine(cls, frequency: int, amplitude: float = 1.0) -> TrigPolynomial:
        poly = cls.zero(frequency + 1)
        if frequency > 0:
            poly.sin_coeffs[frequency] = amplitude
        return poly

    @property
    def size(self) -> int:
        return self.cos_coeffs.size

    def _resized(self, size: int) -> TrigPolynomial:
        if size <= self.size:
            return TrigPolynomial(self.cos_coeffs.copy(), self.sin_coeffs.copy())
        cos_coeffs = np.zeros(size)
        sin_coeffs = np.zeros(size)
        cos_coeffs[: self.size] = self.cos_coeffs
        sin_coeffs[: self.size] = self.sin_coeffs
        return TrigPolynomial(cos_coeffs, sin_coeffs)

    def __add__(self, other: TrigPolynomial) -> TrigPolynomial:
        size = max(self.size, other.size)
        left, right = self._resized(size), other._resized(size)
        return TrigPolynomial(left.cos_coeffs + right.cos_coeffs, left.sin_coeffs + right.sin_coeffs)

    def scaled(self, factor: float) -> TrigPolynomial:
        return TrigPolynomial(factor * self.cos_coeffs, factor * self.sin_coeffs)

    def times_cos(self, n: int) -> TrigPolynomial:
        """Multiply by cos(nT) using the product-to-sum identities."""
        out = TrigPolynomial.zero(self.size + n)
        for k in range(self.size):
            a = self.cos_coeffs[k]
            b = self.sin_coeffs[k] if k > 0 else 0.0
            if a:
                out.cos_coeffs[k + n] += 0.5 * a
                out.cos_coeffs[abs(k - n)] += 0.5 * a
            if b:
                out.sin_coeffs[k + n] += 0.5 * b
                if k > n:
                    out.sin_coeffs[k - n] += 0.5 * b
                elif k < n:
                    out.sin_coeffs[n - k] -= 0.5 * b
        return out

    def evaluate(self, t: np.ndarray) -> np.ndarray:
        k = np.arange(self.size)
        angles = np.multiply.outer(np.asarray(t, dtype=float), k)
        return np.cos(angles) @ self.cos_coeffs + np.sin(angles[..., 1:]) @ self.sin_coeffs[1:]

    def integral_of_square(self) -> float:
        """Exact integral of the square over [-pi, pi]."""
        head = self.cos_coeffs[0] ** 2
        rest = float(np.sum(self.cos_coeffs[1:] ** 2) + np.sum(self.sin_coeffs[1:] ** 2))
        return 2.0 * math.pi * float(head) + math.pi * rest
