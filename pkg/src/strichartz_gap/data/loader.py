"""Load sampled radial profiles from CSV, TSV and Excel tables."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

DEFAULT_RADIUS_COLUMN = "r"
DEFAULT_VALUE_COLUMN = "value"


@dataclass
class ProfileTable:
    """A loaded table of radial samples, before column selection."""

    source_path: Path
    dataframe: pd.DataFrame
    sheet_name: Optional[str] = None
    available_sheets: list[str] = field(default_factory=list)
    header_row: Optional[int] = None
    column_offset: int = 0

    def columns(self) -> list[str]:
        return list(self.dataframe.columns)

    def samples(
        self,
        radius_column: str = DEFAULT_RADIUS_COLUMN,
        value_column: str = DEFAULT_VALUE_COLUMN,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Return (r, values) sorted by radius, skipping rows that are not numeric."""
        missing = [name for name in (radius_column, value_column) if name not in self.dataframe.columns]
        if missing:
            available = ", ".join(self.columns())
            raise ValueError(
                f"Column(s) {', '.join(repr(m) for m in missing)} not found in "
                f"'{self.source_path.name}'. Available columns: {available}"
            )
        frame = pd.DataFrame(
            {
                "r": pd.to_numeric(self.dataframe[radius_column], errors="coerce"),
                "value": pd.to_numeric(self.dataframe[value_column], errors="coerce"),
            }
        ).dropna()
        skipped = len(self.dataframe.index) - len(frame.index)
        if skipped:
            logger.warning("Skipped %d non-numeric row(s) in %s", skipped, self.source_path.name)
        if frame.empty:
            raise ValueError(f"No numeric samples in '{self.source_path.name}'.")
        frame = frame.sort_values("r", kind="mergesort")
        if frame["r"].duplicated().any():
            raise ValueError(f"Duplicate radii in '{self.source_path.name}'.")
        return frame["r"].to_numpy(dtype=float), frame["value"].to_numpy(dtype=float)


class DataLoader:
    """Load CSV and Excel files using pandas/openpyxl."""

    SUPPORTED_SUFFIXES: tuple[str, ...] = (".csv", ".tsv", ".xls", ".xlsx")

    def load(
        self,
        path: Path,
        *,
        sheet: Optional[str] = None,
        header_row: Optional[int] = None,
        column_offset: int = 0,
    ) -> ProfileTable:
        """Read a table whose header row names the columns; rows below it are samples."""
        normalized = Path(path).expanduser().resolve()
        if not normalized.exists():
            raise FileNotFoundError(f"Profile table not found: {normalized}")

        suffix = normalized.suffix.lower()
        if suffix not in self.SUPPORTED_SUFFIXES:
            allowed = ", ".join(self.SUPPORTED_SUFFIXES)
            raise ValueError(f"Unsupported file type {normalized.suffix!r}. Allowed: {allowed}")

        available_sheets: list[str] = []
        sheet_name: Optional[str] = None
        if suffix == ".csv":
            frame = pd.read_csv(normalized, header=None)
        elif suffix == ".tsv":
            frame = pd.read_csv(normalized, sep="\t", header=None)
        else:
            with pd.ExcelFile(normalized, engine="openpyxl") as workbook:
                available_sheets = list(workbook.sheet_names)
                if not available_sheets:
                    raise ValueError(f"Workbook '{normalized.name}' contains no worksheets.")
                if sheet is not None and sheet not in available_sheets:
                    available = ", ".join(available_sheets)
                    raise ValueError(f"Worksheet '{sheet}' not found. Available sheets: {available}")
                sheet_name = sheet or available_sheets[0]
                frame = workbook.parse(sheet_name, header=None)

        offset = max(0, column_offset)
        if offset >= frame.shape[1]:
            raise ValueError("Column offset exceeds available columns.")
        if offset:
            frame = frame.iloc[:, offset:]

        header_idx = header_row - 1 if header_row and header_row > 0 else 0
        if header_idx >= len(frame.index):
            raise ValueError("Header row index exceeds available rows.")
        columns = self._deduplicate_columns(
            [
                self._normalize_column(value) or f"Column {idx + 1}"
                for idx, value in enumerate(frame.iloc[header_idx])
            ]
        )
        frame = frame.iloc[header_idx + 1 :].reset_index(drop=True)
        if frame.empty:
            raise ValueError(f"Profile table '{normalized.name}' has no rows below the header.")
        frame.columns = columns
        logger.debug("Loaded %d row(s) from %s", len(frame.index), normalized)

        return ProfileTable(
            source_path=normalized,
            dataframe=frame,
            sheet_name=sheet_name,
            available_sheets=available_sheets,
            header_row=header_idx + 1,
            column_offset=offset,
        )

    @staticmethod
    def _normalize_column(column: object) -> str:
        """Trim whitespace and collapse repeated spaces in column names."""
        if column is None or (isinstance(column, float) and np.isnan(column)):
            return ""
        return " ".join(str(column).split())

    @staticmethod
    def _deduplicate_columns(columns: list[str]) -> list[str]:
        """Append numeric suffixes when column names repeat."""
        seen: dict[str, int] = {}
        unique: list[str] = []
        for name in columns:
            count = seen.get(name, 0)
            seen[name] = count + 1
            unique.append(name if count == 0 else f"{name} ({count + 1})")
        return unique
