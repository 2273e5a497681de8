import numpy as np
import pandas as pd
import pytest

from strichartz_gap.data.loader import DataLoader


def test_load_csv_normalizes_columns(tmp_path):
    csv_path = tmp_path / "profile.csv"
    csv_path.write_text(" r ,value\n0.0,4.0\n1.0,1.0\n", encoding="utf-8")

    loader = DataLoader()
    table = loader.load(csv_path)

    assert table.source_path == csv_path.resolve()
    assert table.columns() == ["r", "value"]
    assert isinstance(table.dataframe, pd.DataFrame)
    assert len(table.dataframe) == 2
    assert table.sheet_name is None
    assert table.available_sheets == []
    assert table.header_row == 1
    assert table.column_offset == 0


def test_loader_rejects_missing_file(tmp_path):
    loader = DataLoader()
    with pytest.raises(FileNotFoundError):
        loader.load(tmp_path / "unknown.csv")


def test_loader_rejects_unknown_suffix(tmp_path):
    path = tmp_path / "profile.json"
    path.write_text("{}", encoding="utf-8")
    with pytest.raises(ValueError, match="Unsupported file type"):
        DataLoader().load(path)


def test_load_excel_returns_sheet_metadata(tmp_path):
    path = tmp_path / "profiles.xlsx"
    position = pd.DataFrame({"r": [0.0, 1.0, 2.0], "value": [4.0, 1.0, 0.16]})
    velocity = pd.DataFrame({"r": [0.0, 1.0, 2.0], "value": [1.0, 0.125, 0.008]})
    with pd.ExcelWriter(path, engine="openpyxl") as writer:
        position.to_excel(writer, sheet_name="Position", index=False)
        velocity.to_excel(writer, sheet_name="Velocity", index=False)

    loader = DataLoader()
    table = loader.load(path)
    assert table.sheet_name == "Position"
    assert set(table.available_sheets) == {"Position", "Velocity"}

    velocity_table = loader.load(path, sheet="Velocity")
    radii, values = velocity_table.samples()
    assert np.allclose(values, [1.0, 0.125, 0.008])

    with pytest.raises(ValueError, match="Worksheet 'Missing' not found"):
        loader.load(path, sheet="Missing")


def test_header_row_and_column_offset(tmp_path):
    path = tmp_path / "offset.csv"
    path.write_text(
        "exported by solver,,\n"
        "note,radius,phi\n"
        ",0.0,2.0\n"
        ",0.5,1.5\n",
        encoding="utf-8",
    )
    table = DataLoader().load(path, header_row=2, column_offset=1)
    assert table.columns() == ["radius", "phi"]
    assert table.header_row == 2
    radii, values = table.samples("radius", "phi")
    assert list(radii) == [0.0, 0.5]
    assert list(values) == [2.0, 1.5]


def test_samples_sort_and_skip_non_numeric_rows(tmp_path, caplog):
    path = tmp_path / "unsorted.csv"
    path.write_text("r,value\n2.0,0.1\nn/a,3\n0.0,4.0\n1.0,1.0\n", encoding="utf-8")
    radii, values = DataLoader().load(path).samples()
    assert list(radii) == [0.0, 1.0, 2.0]
    assert list(values) == [4.0, 1.0, 0.1]
    assert "Skipped 1 non-numeric row" in caplog.text


def test_samples_reject_duplicates_and_missing_columns(tmp_path):
    path = tmp_path / "dupes.csv"
    path.write_text("r,value,r\n0.0,1.0,0\n0.0,2.0,1\n", encoding="utf-8")
    table = DataLoader().load(path)
    assert table.columns() == ["r", "value", "r (2)"]
    with pytest.raises(ValueError, match="Duplicate radii"):
        table.samples()
    with pytest.raises(ValueError, match="Available columns"):
        table.samples("radius", "value")
