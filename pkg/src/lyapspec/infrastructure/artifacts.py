import csv
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from .. import __version__
from ..app.characteristic import CharSample
from ..app.expsum import ExpSum
from ..app.plmap import PLMap
from ..app.spectrum import SpectrumSample
from ..core.errors import LyapspecError, MapFileError, UsageError

logger = logging.getLogger("lyapspec.infrastructure.artifacts")

MAP_FILE_KEYS = {"slopes", "log_slopes", "label", "strict_geometry"}
SPECTRUM_HEADER = ("t", "alpha", "L", "dL_dalpha")
CHARACTERISTIC_HEADER = ("t", "G", "H_sign", "d2L")
EXPSUM_HEADER = ("b", "c")


@dataclass
class AnalysisArtifacts:
    """Everything one analysis run produced, with the tolerances it used."""

    map: PLMap
    report: Optional[Dict[str, Any]]
    paths: Dict[str, str] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    degenerate: bool = False
    version: str = __version__

    def to_dict(self) -> Dict[str, Any]:
        return {
            "map": self.map.to_dict(),
            "degenerate": self.degenerate,
            "paths": dict(sorted(self.paths.items())),
            "tolerances": self.tolerances,
            "version": self.version,
            "transversal_count": self.report["transversal_count"] if self.report else 0,
        }


# --- Map files ---

def load_map_file(path: str) -> PLMap:
    """Reads a JSON map description; I/O and format problems raise MapFileError."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        raise MapFileError(f"Cannot read map file {path}: {e}") from e
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise MapFileError(f"Map file {path} is not valid JSON: {e}") from e

    if not isinstance(data, dict):
        raise MapFileError(f"Map file {path} must contain a JSON object")
    unknown = set(data) - MAP_FILE_KEYS
    if unknown:
        raise MapFileError(f"Map file {path} has unknown keys: {sorted(unknown)}")
    for key in ("slopes", "log_slopes"):
        if key in data and not isinstance(data[key], list):
            raise MapFileError(f"'{key}' in {path} must be a list of numbers")

    try:
        pl_map = PLMap.from_dict(data)
    except UsageError as e:
        raise MapFileError(f"Map file {path}: {e}") from e
    logger.info(f"Loaded map {pl_map.label or path} with {pl_map.branch_count} branches")
    return pl_map


def save_map_file(path: str, pl_map: PLMap):
    atomic_write_text(path, dumps_json(pl_map.to_dict()))


# --- Writers ---

def atomic_write_text(path: str, text: str):
    """Writes to a temporary sibling and renames it into place."""
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = None
    try:
        os.makedirs(directory, exist_ok=True)
        with tempfile.NamedTemporaryFile(
                "w", encoding="utf-8", newline="", dir=directory, prefix=".tmp-", delete=False
        ) as tmp:
            tmp_path = tmp.name
            tmp.write(text)
        os.replace(tmp_path, path)
    except OSError as e:
        if tmp_path and os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise LyapspecError(f"Failed to write {path}: {e}") from e
    logger.debug(f"Wrote {path}")


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def dumps_json(data: Any) -> str:
    # json emits floats with repr, the shortest string that round-trips
    return json.dumps(_json_safe(data), indent=2, sort_keys=True, allow_nan=False, ensure_ascii=False) + "\n"


def write_json(path: str, data: Any):
    atomic_write_text(path, dumps_json(data))


def _format_cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def format_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    return buffer.getvalue()


def write_spectrum_csv(path: str, samples: Iterable[SpectrumSample]):
    atomic_write_text(path, format_csv(SPECTRUM_HEADER, (s.to_row() for s in samples)))


def write_characteristic_csv(path: str, samples: Iterable[CharSample]):
    atomic_write_text(path, format_csv(CHARACTERISTIC_HEADER, (s.to_row() for s in samples)))


def write_expsum_csv(path: str, s: ExpSum):
    atomic_write_text(path, format_csv(EXPSUM_HEADER, s.to_csv_rows()))


def read_csv(path: str) -> Tuple[List[str], List[List[float]]]:
    """Reads back a numeric CSV written by this module."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            rows = [[float(cell) for cell in row] for row in reader]
    except (OSError, StopIteration, ValueError) as e:
        raise MapFileError(f"Cannot parse CSV {path}: {e}") from e
    return header, rows
