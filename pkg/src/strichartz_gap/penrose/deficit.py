"""Deficit functional of zonal sphere data by tensor-product quadrature on [-pi, pi] x S^5.

The sphere evolution of (F0, F1) is
U(T, X) = sum_l [cos((l+2)T) F0(l) + sin((l+2)T) F1(l) / (l+2)] Y_l(X), and every
four-fold product carries the weight (cos T + X0)^2 and the factor 1/2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from strichartz_gap.energy.space import COMPONENTS, SphereState, fstar, h_inner
from strichartz_gap.errors import PreconditionError, UnsupportedInputError
from strichartz_gap.quadform.forms import q_form
from strichartz_gap.special.functions import assoc_legendre_table, sphere_area
from strichartz_gap.special.quadrature import jacobi_rule

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS: Tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125)
NOISE_FLOOR = 1e-13


def default_orders(lmax: int) -> Tuple[int, int]:
    """(nT, nX) that integrate degree-4 products of data up to lmax exactly."""
    return max(64, 8 * (lmax + 4)), max(32, 2 * lmax + 8)


def _zonal_vectors(x: SphereState) -> Tuple[np.ndarray, np.ndarray]:
    for name in COMPONENTS:
        for index, _ in x.component(name).items():
            if not index.is_zonal:
                raise UnsupportedInputError(
                    f"Quadrature paths need zonal data; found {name} coefficient at {index.label()}"
                )
    position = np.array([x.f0.get(ell) for ell in range(x.lmax + 1)])
    velocity = np.array([x.f1.get(ell) for ell in range(x.lmax + 1)])
    return position, velocity


@dataclass(frozen=True)
class SpacetimeGrid:
    """Sphere evolution sampled on the trapezoid-in-T times Gauss-Jacobi-in-X0 grid."""

    times: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def integrate(self, integrand: np.ndarray) -> float:
        """1/2 int integrand (cos T + X0)^2 dT dsigma, the S^4 factor in closed form."""
        conformal = (np.cos(self.times)[:, None] + self.nodes[None, :]) ** 2
        per_time = (integrand * conformal) @ self.weights
        return 0.5 * sphere_area(4) * (2.0 * math.pi / self.times.size) * float(np.sum(per_time))


def sphere_evolution(x: SphereState, nT: int, nX: int) -> SpacetimeGrid:
    if nT < 1 or nX < 1:
        raise ValueError(f"Quadrature orders must be positive, got nT={nT}, nX={nX}")
    position, velocity = _zonal_vectors(x)
    rule = jacobi_rule(nX)
    times = -math.pi + 2.0 * math.pi * np.arange(nT) / nT
    harmonics = assoc_legendre_table(x.lmax, 0, rule.nodes) / math.sqrt(sphere_area(4))
    frequencies = np.arange(x.lmax + 1) + 2.0
    phases = np.multiply.outer(times, frequencies)
    values = np.cos(phases) @ (position[:, None] * harmonics) + np.sin(phases) @ (
        (velocity / frequencies)[:, None] * harmonics
    )
    return SpacetimeGrid(times, rule.nodes, rule.weights, values)


def _orders(x: SphereState, nT: Optional[int], nX: Optional[int]) -> Tuple[int, int]:
    default_t, default_x = default_orders(x.lmax)
    return (default_t if nT is None else nT), (default_x if nX is None else nX)


def quartic_integral(x: SphereState, nT: int | None = None, nX: int | None = None) -> float:
    """1/2 int U^4 (cos T + X0)^2 dT dsigma, the fourth power of the L^4 norm."""
    nT, nX = _orders(x, nT, nX)
    grid = sphere_evolution(x, nT, nX)
    return grid.integrate(grid.values**4)


def crossed_integral(x: SphereState, nT: int | None = None, nX: int | None = None) -> float:
    """1/2 int (cos 2T U)^2 (cos T + X0)^2 dT dsigma: the maximiser's evolution is cos 2T."""
    nT, nX = _orders(x, nT, nX)
    grid = sphere_evolution(x, nT, nX)
    star = np.cos(2.0 * grid.times)[:, None]
    return grid.integrate((star * grid.values) ** 2)


@dataclass(frozen=True)
class DeficitReport:
    """Both sides of the sharp inequality and their difference."""

    h_norm_sq: float
    energy_term: float
    l4_fourth_power: float
    l4_norm_sq: float
    deficit: float
    lmax: int
    nT: int
    nX: int
    convergence_residual: Optional[float] = None

    @property
    def respects_sharp_bound(self) -> bool:
        return self.deficit >= -1e-8 * max(self.h_norm_sq, 1.0)

    def to_json(self) -> Dict[str, Any]:
        return asdict(self)


def deficit(
    x: SphereState,
    nT: int | None = None,
    nX: int | None = None,
    *,
    check_convergence: bool = False,
) -> DeficitReport:
    """Phi(x) = |x|^2 / (8 pi) - |Sx|_{L^4}^2 with both ingredients reported."""
    nT, nX = _orders(x, nT, nX)
    quartic = quartic_integral(x, nT, nX)
    norm_sq = h_inner(x, x)
    energy_term = norm_sq / (8.0 * math.pi)
    l4_norm_sq = math.sqrt(max(quartic, 0.0))
    residual = None
    if check_convergence:
        refined = quartic_integral(x, 2 * nT, 2 * nX)
        residual = abs(refined - quartic) / max(abs(refined), 1e-300)
    report = DeficitReport(
        h_norm_sq=norm_sq,
        energy_term=energy_term,
        l4_fourth_power=quartic,
        l4_norm_sq=l4_norm_sq,
        deficit=energy_term - l4_norm_sq,
        lmax=x.lmax,
        nT=nT,
        nX=nX,
        convergence_residual=residual,
    )
    logger.info(
        "Deficit lmax=%d nT=%d nX=%d: %.6e (energy %.6e, L4 %.6e)",
        x.lmax,
        nT,
        nX,
        report.deficit,
        energy_term,
        l4_norm_sq,
    )
    return report


@dataclass
class TaylorExperiment:
    """Deficit along the ray fstar + eps g against its second-order prediction."""

    q_value: float
    g_norm_sq: float
    table: pd.DataFrame
    slope: Optional[float]
    limiting_ratio: float
    dropped: List[float] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "q_value": self.q_value,
            "g_norm_sq": self.g_norm_sq,
            "slope": self.slope,
            "limiting_ratio": self.limiting_ratio,
            "dropped": list(self.dropped),
            "rows": self.table.astype(object).to_dict(orient="records"),
        }


def taylor_experiment(
    g: SphereState,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    nT: int | None = None,
    nX: int | None = None,
) -> TaylorExperiment:
    """Fit log|Phi(fstar + eps g) - eps^2 Q(g) / 2| against log eps and report the sandwich ratios."""
    if not epsilons:
        raise ValueError("At least one epsilon is required.")
    if any(eps <= 0 for eps in epsilons):
        raise ValueError(f"Epsilons must be positive, got {list(epsilons)}")
    q_value = q_form(g)
    norm_sq = h_inner(g, g)
    if norm_sq <= 0.0:
        raise PreconditionError("Taylor experiment needs a nonzero direction g.")
    base = fstar(g.lmax)
    rows = []
    for eps in sorted(epsilons, reverse=True):
        report = deficit(base.add(g.scale(eps)), nT, nX)
        remainder = report.deficit - 0.5 * eps**2 * q_value
        rows.append(
            {
                "epsilon": eps,
                "deficit": report.deficit,
                "prediction": 0.5 * eps**2 * q_value,
                "remainder": remainder,
                "ratio": 8.0 * math.pi * report.deficit / (eps**2 * norm_sq),
                "used": abs(remainder) > NOISE_FLOOR * max(report.energy_term, 1.0),
            }
        )
    table = pd.DataFrame(rows)
    used = table[table["used"]]
    dropped = [float(eps) for eps in table.loc[~table["used"], "epsilon"]]
    if dropped:
        logger.warning("Remainder below quadrature noise at epsilon %s; dropped from the fit", dropped)
    slope = None
    if len(used) >= 2:
        slope = float(
            np.polyfit(np.log(used["epsilon"].to_numpy()), np.log(np.abs(used["remainder"].to_numpy())), 1)[0]
        )
    limiting_ratio = float(table["ratio"].iloc[-1])
    logger.info("Taylor experiment: slope %s, limiting ratio %.6f", slope, limiting_ratio)
    return TaylorExperiment(
        q_value=q_value,
        g_norm_sq=norm_sq,
        table=table,
        slope=slope,
        limiting_ratio=limiting_ratio,
        dropped=dropped,
    )
