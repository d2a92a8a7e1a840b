"""CSV and manifest helpers shared by the command-line tools."""
from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path

import numpy as np

FLOAT_FMT = "{:.17g}"


def _fmt(v) -> str:
    return FLOAT_FMT.format(float(v))


def write_trajectory_csv(path, macro) -> None:
    """``t,x1,...,xM`` with 17 significant digits."""
    x = np.asarray(macro, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"x{j + 1}" for j in range(x.shape[1])])
        for t, row in enumerate(x):
            w.writerow([t] + [_fmt(v) for v in row])


def read_trajectory_csv(path) -> np.ndarray:
    """Inverse of :func:`write_trajectory_csv`; returns (T+1, M) floats."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"trajectory file not found: {path}")
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "t":
        raise ValueError(f"{path}: expected a header starting with 't'")
    data = np.array([[float(v) for v in r[1:]] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    return data.reshape(len(rows) - 1, len(rows[0]) - 1)


def write_micro_csv(path, micro) -> None:
    """``t,a1,...,aN`` with integer opinions."""
    s = np.asarray(micro)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t"] + [f"a{i + 1}" for i in range(s.shape[1])])
        for t, row in enumerate(s):
            w.writerow([t] + row.astype(int).tolist())


def write_table_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def read_matrix_csv(path) -> np.ndarray:
    """Plain numeric CSV (no header), e.g. an adaption matrix."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"matrix file not found: {path}")
    with open(path, newline="") as fh:
        return np.array([[float(v) for v in r] for r in csv.reader(fh) if r], dtype=float)


def read_points_csv(path) -> np.ndarray:
    """Point cloud CSV; a non-numeric first row is treated as a header."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"point file not found: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    try:
        [float(v) for v in rows[0]]
    except ValueError:
        rows = rows[1:]
    return np.array([[float(v) for v in r] for r in rows], dtype=float)


def default_alpha() -> np.ndarray:
    """The bundled 3x3 adaption matrix."""
    ref = resources.files("mzopinion").joinpath("data/alpha_default.csv")
    with resources.as_file(ref) as p:
        return read_matrix_csv(p)


def write_manifest(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True, default=_jsonable))


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"cannot serialise {type(o).__name__}")
