"""Matrix files, CSV/JSON emitters and run manifests."""
from __future__ import annotations

import csv
import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .bipartite import BipartiteOperator, Dims

SIZE_WARN_ORDER = 4096


class MatrixFileError(ValueError):
    """A matrix file could not be read or does not describe a valid operator."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


def fmt(x) -> str:
    """Float with 17 significant digits (round-trips a double exactly)."""
    return format(float(x), ".17g")


def matrix_to_dict(op: BipartiteOperator) -> dict:
    return {
        "dims": [op.n, op.m],
        "re": op.mat.real.tolist(),
        "im": op.mat.imag.tolist(),
    }


def save_matrix(op: BipartiteOperator, path) -> None:
    if op.dims.total > SIZE_WARN_ORDER:
        warnings.warn(f"writing a matrix of order {op.dims.total} as JSON", stacklevel=2)
    Path(path).write_text(json.dumps(matrix_to_dict(op)))


def load_matrix(path, check_unitary: bool = True) -> BipartiteOperator:
    """Read the JSON matrix format; raises MatrixFileError naming the file."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise MatrixFileError(path, f"cannot read file ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise MatrixFileError(path, f"invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(data, dict) or not {"dims", "re", "im"} <= set(data):
        raise MatrixFileError(path, "expected an object with keys dims, re, im")
    try:
        dims = Dims(*[int(v) for v in data["dims"]])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise MatrixFileError(path, f"malformed contents ({exc})") from None
    if dims.total > SIZE_WARN_ORDER:
        warnings.warn(f"{path}: matrix of order {dims.total} read from JSON", stacklevel=2)
    if re.shape != im.shape or re.shape != (dims.total, dims.total):
        raise MatrixFileError(path, f"re/im shapes {re.shape}, {im.shape} do not match dims {dims} (order {dims.total})")
    if not (np.all(np.isfinite(re)) and np.all(np.isfinite(im))):
        raise MatrixFileError(path, "non-finite entries")
    op = BipartiteOperator(dims, re + 1j * im)
    if check_unitary and not op.is_unitary():
        raise MatrixFileError(path, f"not unitary (max|U^dag U - 1| = {op.unitarity_error():.3e})")
    return op


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, Dims):
        return str(x)
    return x


def dump_json(obj) -> str:
    # json writes floats via repr, which is already the shortest exact round-trip form
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


@dataclass
class RunManifest:
    command: str
    params: dict
    seed: int | None
    version: str
    outputs: list[str] = field(default_factory=list)
    duration_s: float = 0.0

    def write(self, path) -> None:
        Path(path).write_text(dump_json(asdict(self)))

    @classmethod
    def read(cls, path) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text()))
