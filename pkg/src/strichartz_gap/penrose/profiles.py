"""Radial flat-space initial data and their Penrose transform to zonal sphere coefficients."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from strichartz_gap.errors import ProfileError
from strichartz_gap.harmonics.lattice import CoeffField
from strichartz_gap.special.functions import assoc_legendre_table, sphere_area
from strichartz_gap.special.quadrature import QuadratureRule, default_order, jacobi_rule

logger = logging.getLogger(__name__)

PROFILE_COMPONENTS = ("f0", "f1")

# Conformal weights of the transform: f0 = (1+X0)^2 F0, f1 = (1+X0)^3 F1.
_WEIGHT_EXPONENT = {"f0": 2, "f1": 3}
# Growth of |phi| r^k that keeps the transformed function bounded at X0 = -1.
_DECAY_POWER = {"f0": 4, "f1": 6}
_DECAY_GROWTH = 1.5
_DECAY_SLACK = 1e-12


class ProfileKind(str, Enum):
    MAXIMISER = "maximiser"
    RATIONAL = "rational"
    GAUSSIAN = "gaussian"
    BUMP = "bump"
    TABLE = "table"


_REQUIRED_PARAMS = {
    ProfileKind.MAXIMISER: (),
    ProfileKind.RATIONAL: ("amplitude", "power"),
    ProfileKind.GAUSSIAN: ("amplitude", "width"),
    ProfileKind.BUMP: ("amplitude", "radius"),
    ProfileKind.TABLE: ("r", "values"),
}


def _float_param(params: Mapping[str, Any], name: str) -> float:
    try:
        value = float(params[name])
    except KeyError as exc:
        raise ProfileError(f"Profile is missing parameter '{name}'.", field=f"params.{name}") from exc
    except (TypeError, ValueError) as exc:
        raise ProfileError(
            f"Parameter '{name}' must be a number, got {params[name]!r}.", field=f"params.{name}"
        ) from exc
    if not math.isfinite(value):
        raise ProfileError(f"Parameter '{name}' must be finite.", field=f"params.{name}")
    return value


@dataclass
class RadialProfile:
    """A radial function phi(r) used as one component of wave initial data.

    Parameterizations:
      maximiser: 4 (1 + r^2)^-2 for f0, (1 + r^2)^-3 for f1
      rational:  amplitude (1 + r^2)^-power
      gaussian:  amplitude exp(-(r / width)^2)
      bump:      amplitude exp(-1 / (1 - (r / radius)^2)) inside r < radius, 0 outside
      table:     cubic spline through (r, values), zero outside the sampled range
    """

    kind: ProfileKind
    component: str = "f0"
    params: Dict[str, Any] = field(default_factory=dict)
    _spline: Optional[CubicSpline] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            self.kind = ProfileKind(self.kind)
        except ValueError as exc:
            known = ", ".join(kind.value for kind in ProfileKind)
            raise ProfileError(
                f"Unknown profile kind {self.kind!r}; expected one of: {known}.", field="kind"
            ) from exc
        if self.component not in PROFILE_COMPONENTS:
            raise ProfileError(
                f"Unknown component {self.component!r}; expected 'f0' or 'f1'.", field="component"
            )
        for name in _REQUIRED_PARAMS[self.kind]:
            if name not in self.params:
                raise ProfileError(
                    f"Profile kind '{self.kind.value}' needs parameter '{name}'.",
                    field=f"params.{name}",
                )
        if self.kind is ProfileKind.TABLE:
            self._spline = self._build_spline()
        elif self.kind is not ProfileKind.MAXIMISER:
            for name in _REQUIRED_PARAMS[self.kind]:
                _float_param(self.params, name)
            for name in ("width", "radius"):
                if name in _REQUIRED_PARAMS[self.kind] and _float_param(self.params, name) <= 0:
                    raise ProfileError(f"Parameter '{name}' must be positive.", field=f"params.{name}")

    def _build_spline(self) -> CubicSpline:
        try:
            r = np.asarray(self.params["r"], dtype=float)
            values = np.asarray(self.params["values"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise ProfileError("Table profile needs numeric 'r' and 'values'.", field="params") from exc
        if r.ndim != 1 or r.shape != values.shape or r.size < 4:
            raise ProfileError(
                "Table profile needs matching 1-D 'r' and 'values' with at least 4 samples.",
                field="params.values",
            )
        if r[0] < 0 or np.any(np.diff(r) <= 0):
            raise ProfileError("Table radii must start at r >= 0 and increase strictly.", field="params.r")
        if not np.all(np.isfinite(values)):
            raise ProfileError("Table values must be finite.", field="params.values")
        return CubicSpline(r, values, extrapolate=False)

    @classmethod
    def maximiser(cls, component: str = "f0") -> RadialProfile:
        return cls(ProfileKind.MAXIMISER, component)

    @classmethod
    def table(cls, r: Sequence[float], values: Sequence[float], component: str = "f0") -> RadialProfile:
        return cls(ProfileKind.TABLE, component, {"r": list(r), "values": list(values)})

    def evaluate(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        kind = self.kind
        if kind is ProfileKind.MAXIMISER:
            if self.component == "f0":
                return 4.0 * (1.0 + r * r) ** -2
            return (1.0 + r * r) ** -3
        if kind is ProfileKind.RATIONAL:
            amplitude = _float_param(self.params, "amplitude")
            power = _float_param(self.params, "power")
            return amplitude * (1.0 + r * r) ** -power
        if kind is ProfileKind.GAUSSIAN:
            amplitude = _float_param(self.params, "amplitude")
            width = _float_param(self.params, "width")
            return amplitude * np.exp(-((r / width) ** 2))
        if kind is ProfileKind.BUMP:
            amplitude = _float_param(self.params, "amplitude")
            s = r / _float_param(self.params, "radius")
            inside = np.abs(s) < 1.0
            out = np.zeros_like(s)
            out[inside] = amplitude * np.exp(-1.0 / (1.0 - s[inside] ** 2))
            return out
        return np.nan_to_num(self._spline(r), nan=0.0)

    def derivative(self, r: np.ndarray) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        kind = self.kind
        if kind is ProfileKind.MAXIMISER:
            if self.component == "f0":
                return -16.0 * r * (1.0 + r * r) ** -3
            return -6.0 * r * (1.0 + r * r) ** -4
        if kind is ProfileKind.RATIONAL:
            amplitude = _float_param(self.params, "amplitude")
            power = _float_param(self.params, "power")
            return -2.0 * power * amplitude * r * (1.0 + r * r) ** (-power - 1.0)
        if kind is ProfileKind.GAUSSIAN:
            width = _float_param(self.params, "width")
            return -2.0 * r / width**2 * self.evaluate(r)
        if kind is ProfileKind.BUMP:
            radius = _float_param(self.params, "radius")
            s = r / radius
            inside = np.abs(s) < 1.0
            out = np.zeros_like(s)
            inner = s[inside]
            out[inside] = self.evaluate(r)[inside] * (-2.0 * inner / (1.0 - inner**2) ** 2) / radius
            return out
        return np.nan_to_num(self._spline.derivative()(r), nan=0.0)

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "component": self.component, "params": dict(self.params)}

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> RadialProfile:
        if not isinstance(payload, Mapping):
            raise ProfileError("Profile description must be a JSON object.", field="")
        if "kind" not in payload:
            raise ProfileError("Profile description is missing 'kind'.", field="kind")
        params = payload.get("params") or {}
        if not isinstance(params, Mapping):
            raise ProfileError("'params' must be a JSON object.", field="params")
        return cls(payload["kind"], str(payload.get("component", "f0")), dict(params))


def stereographic_radius(t: np.ndarray) -> np.ndarray:
    """|x| of the flat point whose image on S^5 has X0 = t."""
    t = np.asarray(t, dtype=float)
    return np.sqrt((1.0 - t) / (1.0 + t))


def sphere_function(profile: RadialProfile) -> Callable[[np.ndarray], np.ndarray]:
    """F(t) = phi(r) / (1 + t)^k with k = 2 for f0 and 3 for f1."""
    exponent = _WEIGHT_EXPONENT[profile.component]

    def transformed(t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return profile.evaluate(stereographic_radius(t)) / (1.0 + t) ** exponent

    return transformed


def check_decay(profile: RadialProfile, rule: QuadratureRule) -> None:
    """Reject profiles whose transform blows up at X0 = -1, judged at the two outermost nodes."""
    power = _DECAY_POWER[profile.component]
    r = stereographic_radius(rule.nodes[:2])
    scaled = np.abs(profile.evaluate(r)) * r**power
    if not np.all(np.isfinite(scaled)):
        raise ProfileError(
            f"Profile {profile.kind.value} is not finite near infinity (|phi| r^{power} = {scaled}).",
            field="params",
        )
    if scaled[0] > _DECAY_GROWTH * scaled[1] + _DECAY_SLACK:
        raise ProfileError(
            f"Profile {profile.kind.value} decays too slowly: |phi| r^{power} grows from "
            f"{scaled[1]:.3e} at r={r[1]:.3g} to {scaled[0]:.3e} at r={r[0]:.3g}.",
            field="params",
        )


def radial_to_zonal(
    profile: RadialProfile, lmax: int, order: int | None = None
) -> CoeffField:
    """Zonal coefficients sqrt|S^4| * int F(t) P_l^0(t) (1 - t^2)^(3/2) dt for l <= lmax."""
    if lmax < 0:
        raise ValueError(f"lmax must be nonnegative, got {lmax}")
    rule = jacobi_rule(order or default_order(lmax))
    check_decay(profile, rule)
    values = sphere_function(profile)(rule.nodes)
    table = assoc_legendre_table(lmax, 0, rule.nodes)
    coefficients = math.sqrt(sphere_area(4)) * (table @ (rule.weights * values))
    logger.debug(
        "Transformed %s profile (%s) to %d zonal coefficients with %d nodes",
        profile.kind.value,
        profile.component,
        lmax + 1,
        rule.order,
    )
    return CoeffField.zonal({ell: float(value) for ell, value in enumerate(coefficients)}, lmax)


def energy_flat(profile: RadialProfile) -> float:
    """Flat-space energy |S^4| int |phi'|^2 r^4 dr (f0) or |S^4| int phi^2 r^4 dr (f1)."""
    sample = profile.derivative if profile.component == "f0" else profile.evaluate

    def integrand(r: float) -> float:
        return float(sample(np.array([r]))[0]) ** 2 * r**4

    options: Dict[str, Any] = {"limit": 400, "epsabs": 1e-13, "epsrel": 1e-12}
    lower, upper = 0.0, np.inf
    if profile.kind is ProfileKind.BUMP:
        upper = _float_param(profile.params, "radius")
    elif profile.kind is ProfileKind.TABLE:
        radii = np.asarray(profile.params["r"], dtype=float)
        lower, upper = float(radii[0]), float(radii[-1])
        options["points"] = radii[1:-1][:50]
    value, _ = quad(integrand, lower, upper, **options)
    return sphere_area(4) * value
