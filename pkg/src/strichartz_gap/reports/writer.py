"""Byte-stable JSON and CSV report emission."""

from __future__ import annotations

import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, TextIO

import pandas as pd

REPORT_FORMATS = ("json", "csv")
CSV_FLOAT_FORMAT = "%.17g"


@dataclass
class ReportWriter:
    """Wrap results with the run configuration, seed and package version, then write them."""

    version: str
    config: Mapping[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def envelope(self, command: str, result: Any) -> Dict[str, Any]:
        return {
            "command": command,
            "config": dict(self.config),
            "result": result,
            "seed": self.seed,
            "version": self.version,
        }

    def render_json(self, command: str, result: Any) -> str:
        return json.dumps(self.envelope(command, result), indent=2, sort_keys=True) + "\n"

    def render_csv(self, command: str, table: pd.DataFrame) -> str:
        buffer = io.StringIO()
        buffer.write(f"# {command} {self.version}\n")
        buffer.write(f"# config: {json.dumps(dict(self.config), sort_keys=True)}\n")
        buffer.write(f"# seed: {self.seed}\n")
        table.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()

    def write(
        self,
        command: str,
        result: Any,
        *,
        table: pd.DataFrame | None = None,
        fmt: str = "json",
        destination: Path | None = None,
        stream: TextIO | None = None,
    ) -> Optional[Path]:
        """Write to ``destination`` if given, else to ``stream`` (standard output by default)."""
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"Unknown report format {fmt!r}; expected one of {REPORT_FORMATS}")
        if fmt == "csv":
            if table is None:
                raise ValueError(f"The {command} report has no tabular form; use --format json.")
            text = self.render_csv(command, table)
        else:
            text = self.render_json(command, result)
        if destination is None:
            (stream or sys.stdout).write(text)
            return None
        target = Path(destination).expanduser().resolve()
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_text(text, encoding="utf-8")
        return target
