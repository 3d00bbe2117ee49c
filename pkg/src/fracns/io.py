"""CSV and key=value report writers (17 significant digits, '.' decimal)."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Iterable, Mapping, Sequence


def fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int,)) and not isinstance(value, bool):
        return str(value)
    try:
        x = float(value)
    except (TypeError, ValueError):
        return str(value)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def write_csv(path: str | Path, columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_records(path: str | Path, records: Sequence[Mapping], columns: Sequence[str] | None = None) -> None:
    if columns is None:
        columns = list(records[0]) if records else []
    write_csv(path, columns, ([r.get(c, "") for c in columns] for r in records))


def read_csv(path: str | Path) -> dict[str, list[float]]:
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    out: dict[str, list] = {h: [] for h in header}
    for row in body:
        for h, v in zip(header, row):
            if v in ("true", "false"):
                out[h].append(v == "true")
            else:
                try:
                    out[h].append(float(v))
                except ValueError:
                    out[h].append(v)
    return out


def write_report(path: str | Path, items: Mapping) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("".join(f"{k}={fmt(v)}\n" for k, v in items.items()))


def format_report(items: Mapping) -> str:
    return "".join(f"{k}={fmt(v)}\n" for k, v in items.items())
