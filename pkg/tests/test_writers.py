import json
import math

import numpy as np
import pytest

from utils.summarize import format_value, render_table
from utils.writers import RunManifest, read_csv, write_csv, write_json, write_table

HASH = "ab" * 32


def test_csv_header_and_precision(tmp_path):
    rows = [{"q": 3, "snf": 1.0 / 3.0}, {"q": 5, "snf": float("nan")}]
    path = write_csv(tmp_path / "out.csv", rows, HASH, ["q", "snf"])
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# q,snf config_hash={HASH}"
    assert lines[1] == "3,0.33333333333333331"
    assert lines[2] == "5,NaN"


def test_csv_reads_back(tmp_path):
    rows = [{"a": 1.0e-26, "b": -2.5}, {"a": math.pi, "b": float("nan")}]
    path = write_csv(tmp_path / "out.csv", rows, HASH, ["a", "b"])
    df, config_hash = read_csv(path)
    assert config_hash == HASH
    assert list(df.columns) == ["a", "b"]
    assert df["a"].tolist() == [1.0e-26, math.pi]
    assert math.isnan(df["b"][1])


def test_csv_floats_round_trip_exactly(tmp_path):
    values = [1.0e-26, 0.1 + 0.2, 5.0e-6 / 3.0, -math.pi * 1e14, 2.0**-52, 9.999999999999999e-27]
    path = write_csv(tmp_path / "out.csv", [{"v": v} for v in values], HASH, ["v"])
    df, _ = read_csv(path)
    assert df["v"].tolist() == values


def test_csv_missing_columns_become_nan(tmp_path):
    path = write_csv(tmp_path / "out.csv", [{"a": 1.0}], HASH, ["a", "b"])
    assert path.read_text(encoding="utf-8").splitlines()[1] == "1,NaN"


def test_read_csv_rejects_foreign_files(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("a,b\n1,2\n", encoding="utf-8")
    with pytest.raises(ValueError):
        read_csv(path)


def test_json_is_strict(tmp_path):
    payload = {"values": np.array([[1.0, np.nan]]), "count": np.int64(3), "z": 1 + 2j}
    path = write_json(tmp_path / "out.json", payload, HASH)
    document = json.loads(path.read_text(encoding="utf-8"))
    assert document["schema_version"] == 1
    assert document["config_hash"] == HASH
    assert document["values"] == [[1.0, None]]
    assert document["count"] == 3
    assert document["z"] == [1.0, 2.0]


def test_write_table_formats(tmp_path):
    rows = [{"k": 0, "x": 0.5}]
    csv_path = write_table(tmp_path / "table", rows, ["k", "x", "y"], HASH, "csv")
    json_path = write_table(tmp_path / "table", rows, ["k", "x", "y"], HASH, "json")
    assert csv_path.suffix == ".csv"
    document = json.loads(json_path.read_text(encoding="utf-8"))
    assert document["columns"] == ["k", "x", "y"]
    assert document["rows"] == [[0, 0.5, None]]
    with pytest.raises(ValueError):
        write_table(tmp_path / "table", rows, ["k"], HASH, "parquet")


def test_identical_rows_give_identical_bytes(tmp_path):
    rows = [{"v": v} for v in np.linspace(0, 1, 7)]
    first = write_csv(tmp_path / "a.csv", rows, HASH, ["v"]).read_bytes()
    second = write_csv(tmp_path / "b.csv", rows, HASH, ["v"]).read_bytes()
    assert first == second


def test_manifest_lists_outputs(tmp_path):
    manifest = RunManifest("map", {"physics": {}}, HASH, "0.3.0", "analytic")
    manifest.add_output(write_csv(tmp_path / "out.csv", [{"a": 1}], HASH, ["a"]))
    manifest.calibration["amplitude_scale"] = 2.0
    document = json.loads(manifest.save(tmp_path).read_text(encoding="utf-8"))
    assert document["command"] == "map"
    assert document["output_files"] == [str(tmp_path / "out.csv")]
    assert document["calibration"] == {"amplitude_scale": 2.0}
    assert document["timestamp"]


def test_manifest_refuses_missing_outputs(tmp_path):
    manifest = RunManifest("map", {}, HASH, "0.3.0", "analytic")
    manifest.add_output(tmp_path / "never_written.csv")
    with pytest.raises(FileNotFoundError):
        manifest.save(tmp_path)


def test_console_formatting():
    assert format_value(float("nan")) == "NaN"
    assert format_value(1.0 / 3.0) == "0.333333"
    assert format_value(14) == "14"
    assert render_table([]) == "(no rows)"
    assert "snf" in render_table([{"snf": -0.5}])
