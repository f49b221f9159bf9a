"""Writers for data files, reports and run manifests."""

import csv
import json
import logging
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Sequence, Union

import numpy as np

from .mixing import ClassDistribution
from .surface import OrientedGraphModel, edge_pairs

_log = logging.getLogger(__name__)

PathLike = Union[Path, str]


def format_value(value: Any) -> str:
    """Text form of one CSV cell; reals carry 17 significant digits."""
    if isinstance(value, (float, np.floating, Decimal)):
        return f"{float(value):.17g}"
    if isinstance(value, (tuple, list)):
        return ";".join(format_value(item) for item in value)
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, (Fraction, Decimal, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


def write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows([format_value(cell) for cell in row] for row in rows)
    _log.debug("Wrote %s", path)
    return path


def write_json(path: PathLike, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    _log.debug("Wrote %s", path)
    return path


def write_records(path: PathLike, header: Sequence[str], rows: List[Sequence[Any]], fmt: str) -> Path:
    """Write rows as CSV, or as a JSON list of objects keyed by the header."""
    if fmt == "json":
        return write_json(path, [dict(zip(header, row)) for row in rows])
    return write_csv(path, header, rows)


def write_law(path: PathLike, law: ClassDistribution) -> Path:
    """One row per cycle type: mu, probability numerator, probability denominator."""
    rows = [(str(mu), p.numerator, p.denominator) for mu, p in sorted(law.probabilities.items(), reverse=True)]
    return write_csv(path, ("mu", "probability_numerator", "probability_denominator"), rows)


def write_edge_list(model: OrientedGraphModel, path: PathLike) -> Path:
    """Edge list with 1-based vertices and half-edges; the first line records n and k."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w") as f:
        f.write(f"# n={model.n} k={model.k}\n")
        for a, b in edge_pairs(model).tolist():
            f.write(f"{a // model.k + 1} {b // model.k + 1} {a + 1} {b + 1}\n")
    return path
