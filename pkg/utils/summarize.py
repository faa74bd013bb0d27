import math
from typing import Any, Dict, Optional, Sequence

import pandas as pd


def format_value(value: Any) -> str:
    """Compact console form: 6 significant digits, NaN spelled out."""
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        return f"{value:.6g}"
    return str(value)


def render_table(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    df = pd.DataFrame(list(rows), columns=list(columns) if columns is not None else None)
    if df.empty:
        return "(no rows)"
    return df.to_string(index=False, formatters={c: format_value for c in df.columns})


def print_table(title: str, rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> None:
    print("\n" + "=" * 70)
    print(title.upper())
    print("=" * 70)
    print(render_table(rows, columns))
    print("=" * 70 + "\n")


def print_key_values(title: str, values: Dict[str, Any]) -> None:
    print("\n" + "-" * 70)
    print(title.upper())
    print("-" * 70)
    width = max((len(k) for k in values), default=0)
    for key, value in values.items():
        print(f"  {key:<{width}} : {format_value(value)}")
    print("-" * 70 + "\n")
