"""Text file formats: point clouds, images, and distance matrices.

Points: one point per line, comma-separated decimal coordinates.
Images: a header line "rows cols" or "rows cols depth", then whitespace
separated values in row-major order.  Distance matrices: square,
whitespace separated.  Parse failures raise InputError with a line (and
where it applies, column) diagnostic.
"""

from __future__ import annotations

from typing import List

import numpy as np

from .errors import InputError


def _fail(path: str, line_no: int, col_no: int, why: str):
    raise InputError(f"{path}:{line_no}:{col_no}: {why}")


def read_points(path: str) -> np.ndarray:
    rows: List[List[float]] = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            fields = text.split(",")
            coords = []
            for col_no, tok in enumerate(fields, start=1):
                try:
                    coords.append(float(tok))
                except ValueError:
                    _fail(path, line_no, col_no, f"not a number: {tok.strip()!r}")
            if rows and len(coords) != len(rows[0]):
                _fail(path, line_no, 1,
                      f"expected {len(rows[0])} coordinates, got {len(coords)}")
            rows.append(coords)
    if not rows:
        raise InputError(f"{path}:1:1: no points found")
    return np.array(rows, dtype=float)


def write_points(path: str, points) -> None:
    pts = np.asarray(points, dtype=float)
    with open(path, "w") as fh:
        for row in pts:
            fh.write(",".join(repr(float(x)) for x in row) + "\n")


def read_image(path: str) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline()
        dims = header.split()
        if len(dims) not in (2, 3):
            _fail(path, 1, 1, f"header must be 'rows cols [depth]', got {header.strip()!r}")
        try:
            shape = tuple(int(d) for d in dims)
        except ValueError:
            _fail(path, 1, 1, f"non-integer dimension in header {header.strip()!r}")
        if any(d < 1 for d in shape):
            _fail(path, 1, 1, f"dimensions must be positive, got {shape}")
        values: List[float] = []
        need = int(np.prod(shape))
        for line_no, line in enumerate(fh, start=2):
            for col_no, tok in enumerate(line.split(), start=1):
                try:
                    values.append(float(tok))
                except ValueError:
                    _fail(path, line_no, col_no, f"not a number: {tok!r}")
    if len(values) != need:
        raise InputError(f"{path}: expected {need} values for shape {shape}, got {len(values)}")
    return np.array(values, dtype=float).reshape(shape)


def write_image(path: str, image) -> None:
    arr = np.asarray(image, dtype=float)
    with open(path, "w") as fh:
        fh.write(" ".join(str(d) for d in arr.shape) + "\n")
        if arr.ndim == 2:
            planes = [arr]
        else:
            planes = [arr[i] for i in range(arr.shape[0])]
        for plane in planes:
            for row in plane:
                fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def read_distance_matrix(path: str) -> np.ndarray:
    rows: List[List[float]] = []
    with open(path) as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                continue
            vals = []
            for col_no, tok in enumerate(text.split(), start=1):
                try:
                    vals.append(float(tok))
                except ValueError:
                    _fail(path, line_no, col_no, f"not a number: {tok!r}")
            rows.append(vals)
    if not rows:
        raise InputError(f"{path}:1:1: empty distance matrix")
    n = len(rows)
    for line_no, row in enumerate(rows, start=1):
        if len(row) != n:
            _fail(path, line_no, 1, f"expected {n} entries per row, got {len(row)}")
    return np.array(rows, dtype=float)
