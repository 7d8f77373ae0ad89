"""Canonical CSV / JSON encoding of result tables.

High-precision numbers are written as scientific-notation strings with a fixed
number of significant digits, in both formats, so a CSV and a JSON dump of the
same table hold identical values and a parse/re-emit cycle is byte-stable.
"""
from __future__ import annotations

import csv
import io
import json
from typing import IO, Any, Iterable, List, Mapping, Sequence

import mpmath
from mpmath import mpf

from .mpnum import format_real, parse_real

DEFAULT_SIG = 12


def encode_cell(value: Any, sig: int = DEFAULT_SIG):
    """JSON-ready canonical form of one cell."""
    if value is None or isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (mpf, float)):
        return format_real(value, sig)
    raise TypeError(f"cannot encode {type(value).__name__}")


def csv_text(value: Any) -> str:
    if value is None:
        return "na"
    if value is True:
        return "true"
    if value is False:
        return "false"
    return str(value)


def decode_csv_cell(text: str):
    """Inverse of :func:`csv_text` applied to :func:`encode_cell` output."""
    if text == "na":
        return None
    if text in ("true", "false"):
        return text == "true"
    if text.lstrip("-").isdigit():
        return int(text)
    return text


def write_csv(columns: Sequence[str], rows: Iterable[Mapping[str, Any]], fh: IO[str],
              sig: int = DEFAULT_SIG) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([csv_text(encode_cell(row[c], sig)) for c in columns])
        fh.flush()


def write_json(columns: Sequence[str], rows: Iterable[Mapping[str, Any]], fh: IO[str],
               meta: Mapping[str, Any] | None = None, sig: int = DEFAULT_SIG) -> None:
    body = {
        "meta": dict(meta or {}, columns=list(columns)),
        "rows": [{c: encode_cell(row[c], sig) for c in columns} for row in rows],
    }
    json.dump(body, fh, indent=2, ensure_ascii=False)
    fh.write("\n")


def read_csv(text: str) -> tuple[List[str], List[dict]]:
    reader = csv.reader(io.StringIO(text))
    columns = next(reader)
    rows = [dict(zip(columns, (decode_csv_cell(c) for c in line))) for line in reader]
    return columns, rows


def _mantissa_digits(text: str) -> int:
    mantissa = text.lstrip("-").split("e")[0]
    return len(mantissa.replace(".", ""))


def reemit_csv(text: str) -> str:
    """Parse every numeric cell back to high precision and print it again."""
    columns, rows = read_csv(text)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        cells = []
        for c in columns:
            v = row[c]
            if isinstance(v, str) and "e" in v and v not in ("nan", "inf", "-inf"):
                sig = _mantissa_digits(v)
                with mpmath.workdps(sig + 10):
                    v = format_real(parse_real(v, sig + 10), sig)
            cells.append(csv_text(v))
        writer.writerow(cells)
    return out.getvalue()
