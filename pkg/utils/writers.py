"""CSV / JSON result files and the run manifest."""

import json
import math
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

SCHEMA_VERSION = 1
FLOAT_FORMAT = "%.17g"
HASH_PREFIX = "config_hash="

PathLike = Union[str, Path]


def _json_safe(value: Any) -> Any:
    """NaN/inf -> None, numpy scalars and arrays -> Python values."""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, np.ndarray):
        return _json_safe(value.tolist())
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, complex):
        return [_json_safe(value.real), _json_safe(value.imag)]
    return value


def write_csv(
    path: PathLike,
    rows: Union[pd.DataFrame, Sequence[Dict[str, Any]]],
    config_hash: str,
    columns: Optional[Sequence[str]] = None,
) -> Path:
    """
    One '#'-prefixed header line carrying the column names and the config hash,
    then the body with 17 significant digits and NaN for missing values.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = rows if isinstance(rows, pd.DataFrame) else pd.DataFrame(list(rows), columns=columns)
    if columns is not None:
        df = df.reindex(columns=list(columns))

    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# {','.join(str(c) for c in df.columns)} {HASH_PREFIX}{config_hash}\n")
        df.to_csv(f, header=False, index=False, float_format=FLOAT_FORMAT, na_rep="NaN", lineterminator="\n")
    logger.debug(f"Wrote {len(df)} rows to {path}")
    return path


def read_csv(path: PathLike) -> Tuple[pd.DataFrame, str]:
    """Inverse of write_csv: (frame, config_hash)."""
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline()
    if not header.startswith("# "):
        raise ValueError(f"{path}: missing '#' header line")
    names, _, tail = header[2:].strip().rpartition(" ")
    if not tail.startswith(HASH_PREFIX):
        raise ValueError(f"{path}: header carries no config hash")
    df = pd.read_csv(
        path,
        skiprows=1,
        header=None,
        names=names.split(","),
        na_values=["NaN"],
        float_precision="round_trip",
    )
    return df, tail[len(HASH_PREFIX) :]


def write_json(path: PathLike, payload: Dict[str, Any], config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"schema_version": SCHEMA_VERSION, "config_hash": config_hash}
    document.update(payload)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(_json_safe(document), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    logger.debug(f"Wrote {path}")
    return path


def write_table(
    path: PathLike,
    rows: Sequence[Dict[str, Any]],
    columns: Sequence[str],
    config_hash: str,
    fmt: str = "csv",
    extra: Optional[Dict[str, Any]] = None,
) -> Path:
    """Tabular result in either format; JSON keeps columns and row arrays."""
    if fmt == "csv":
        return write_csv(Path(path).with_suffix(".csv"), rows, config_hash, columns)
    if fmt == "json":
        payload = {
            "columns": list(columns),
            "rows": [[row.get(c, float("nan")) for c in columns] for row in rows],
        }
        if extra:
            payload.update(extra)
        return write_json(Path(path).with_suffix(".json"), payload, config_hash)
    raise ValueError(f"format must be 'csv' or 'json', got: {fmt}")


@dataclass
class RunManifest:
    command: str
    config_snapshot: Dict[str, Any]
    config_hash: str
    version: str
    solver_method: str
    timestamp: str = field(default_factory=lambda: datetime.now(timezone.utc).isoformat())
    output_files: List[str] = field(default_factory=list)
    calibration: Dict[str, Any] = field(default_factory=dict)

    def add_output(self, path: PathLike) -> None:
        self.output_files.append(str(path))

    def save(self, output_dir: PathLike) -> Path:
        missing = [p for p in self.output_files if not Path(p).is_file()]
        if missing:
            raise FileNotFoundError(f"manifest lists missing output files: {missing}")
        path = Path(output_dir) / "manifest.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(_json_safe(asdict(self)), f, indent=2, sort_keys=True)
            f.write("\n")
        logger.info(f"Manifest saved to {path}")
        return path
