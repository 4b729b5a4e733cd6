"""Reading samples from text files, and the bundled gastric-cancer data."""

from __future__ import annotations

import csv
import math
from importlib import resources
from pathlib import Path

from .errors import DataError
from .estimation import Sample

BUNDLED = {"gastric_cancer": "gastric_cancer.txt"}


def _parse_lines(lines, source: str) -> Sample:
    values = []
    rows = csv.reader(lines)
    for lineno, row in enumerate(rows, start=1):
        cells = [c.strip() for c in row if c.strip()]
        if not cells:
            continue
        if len(cells) > 1:
            raise DataError(f"{source}: line {lineno}: expected one value, found {len(cells)}")
        text = cells[0]
        try:
            v = float(text)
        except ValueError:
            if lineno == 1:
                continue  # header
            raise DataError(f"{source}: line {lineno}: not a number: {text!r}") from None
        if not math.isfinite(v) or v <= 0:
            raise DataError(f"{source}: line {lineno}: values must be finite and positive, got {text!r}")
        values.append(v)
    if not values:
        raise DataError(f"{source}: no observations found")
    return Sample(tuple(values), source=source)


def ingest(path) -> Sample:
    """Read one positive number per line (or a one-column CSV).

    A non-numeric first line is treated as a header. Blank lines are skipped.
    Any other bad entry raises :class:`DataError` naming the line.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8-sig")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not UTF-8 text") from exc
    return _parse_lines(text.splitlines(), str(path))


def bundled_path(name: str = "gastric_cancer") -> Path:
    if name not in BUNDLED:
        raise DataError(f"unknown bundled dataset {name!r}; available: {sorted(BUNDLED)}")
    return Path(str(resources.files("exgd") / "data" / BUNDLED[name]))


def gastric_cancer() -> Sample:
    """Survival times in days of 45 gastric-cancer patients treated with chemotherapy alone."""
    s = ingest(bundled_path("gastric_cancer"))
    return Sample(s.values, source="bundled:gastric_cancer")
