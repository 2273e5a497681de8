"""Persistence helpers for sphere states, radial profiles and certificates."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Mapping

from strichartz_gap.certify.dominance import RationalCertificate, dominance_check
from strichartz_gap.data.loader import DEFAULT_RADIUS_COLUMN, DEFAULT_VALUE_COLUMN, DataLoader
from strichartz_gap.energy.space import SphereState
from strichartz_gap.errors import ProfileError
from strichartz_gap.penrose.profiles import ProfileKind, RadialProfile

logger = logging.getLogger(__name__)


def write_json(destination: Path, payload: Any) -> Path:
    destination = Path(destination).expanduser().resolve()
    destination.parent.mkdir(parents=True, exist_ok=True)
    destination.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return destination


def read_json(source: Path) -> Any:
    source = Path(source).expanduser().resolve()
    if not source.exists():
        raise FileNotFoundError(f"File not found: {source}")
    try:
        return json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"'{source.name}' is not valid JSON: {exc}") from exc


class StateManager:
    """Serialize and hydrate sphere states ({"f0": field, "f1": field})."""

    def save(self, destination: Path, state: SphereState) -> Path:
        return write_json(destination, state.to_json())

    def load(self, source: Path) -> SphereState:
        raw = read_json(source)
        if not isinstance(raw, Mapping):
            raise ValueError(f"Sphere state in '{Path(source).name}' must be a JSON object.")
        return SphereState.from_json(raw)


class ProfileManager:
    """Serialize and hydrate radial profiles; table profiles may point at a CSV/TSV/XLSX file."""

    def __init__(self, loader: DataLoader | None = None) -> None:
        self.loader = loader or DataLoader()

    def save(self, destination: Path, profile: RadialProfile) -> Path:
        return write_json(destination, profile.to_json())

    def load(self, source: Path) -> RadialProfile:
        raw = read_json(source)
        if not isinstance(raw, Mapping):
            raise ProfileError("Profile description must be a JSON object.", field="")
        params = raw.get("params") or {}
        if raw.get("kind") == ProfileKind.TABLE.value and isinstance(params, Mapping) and "path" in params:
            raw = dict(raw)
            raw["params"] = self._resolve_table(Path(source), params)
        return RadialProfile.from_json(raw)

    def _resolve_table(self, source: Path, params: Mapping[str, Any]) -> Dict[str, Any]:
        table_path = Path(str(params["path"])).expanduser()
        if not table_path.is_absolute():
            table_path = Path(source).expanduser().resolve().parent / table_path
        try:
            table = self.loader.load(
                table_path,
                sheet=params.get("sheet"),
                header_row=params.get("header_row"),
                column_offset=int(params.get("column_offset", 0)),
            )
            radii, values = table.samples(
                str(params.get("r_column", DEFAULT_RADIUS_COLUMN)),
                str(params.get("value_column", DEFAULT_VALUE_COLUMN)),
            )
        except FileNotFoundError as exc:
            raise ProfileError(str(exc), field="params.path") from exc
        except ValueError as exc:
            raise ProfileError(f"Cannot read profile table: {exc}", field="params.path") from exc
        logger.info("Read %d radial samples from %s", radii.size, table.source_path.name)
        return {"r": radii.tolist(), "values": values.tolist()}


class CertificateManager:
    """Store dominance certificates and check stored ones against a fresh computation."""

    REQUIRED_KEYS = ("block", "C", "rows", "tail", "verdict")

    def save(self, destination: Path, certificate: RationalCertificate) -> Path:
        return write_json(destination, certificate.to_json())

    def load(self, source: Path) -> Dict[str, Any]:
        raw = read_json(source)
        if not isinstance(raw, Mapping):
            raise ValueError(f"Certificate in '{Path(source).name}' must be a JSON object.")
        missing = [key for key in self.REQUIRED_KEYS if key not in raw]
        if missing:
            raise ValueError(f"Certificate is missing field(s): {', '.join(missing)}")
        return dict(raw)

    def reproduces(self, payload: Mapping[str, Any]) -> bool:
        """True when recomputing the certificate gives the stored JSON exactly."""
        lcut = int(payload.get("checked_range", [0, 0])[1])
        fresh = dominance_check(payload["block"], payload["C"], lcut).to_json()
        return json.dumps(fresh, sort_keys=True) == json.dumps(dict(payload), sort_keys=True)
