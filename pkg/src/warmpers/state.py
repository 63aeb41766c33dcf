"""Decomposition state files.

A state file carries everything needed to warm-start future runs in another
process: field, mode, flags, the complex's canonical keys and values in
filtration order, the construction recipe, the per-dimension R/V matrices,
and aggregate counters.  The default container is binary with explicit
little-endian integers; a JSON text variant exists for debugging.

Stored complexes carry keys and values but no boundary content: diffs are
key-based and inserted cells take their boundaries from the new filtration,
so boundaries of the old complex are never needed again.
"""

from __future__ import annotations

import json
import struct
from typing import BinaryIO, List, Optional, Tuple

from .errors import InputError
from .field import PrimeField
from .filtration import Cell, FilteredComplex
from .persistence import DecompositionSet
from .reduction import OperationCounters, RUDecomposition
from .sparsemat import ColumnMatrix, SparseColumn

MAGIC = b"WMPS"
VERSION = 1
_MODES = ("homology", "cohomology")


def _w(fh: BinaryIO, fmt: str, *vals) -> None:
    fh.write(struct.pack("<" + fmt, *vals))


def _r(fh: BinaryIO, fmt: str):
    size = struct.calcsize("<" + fmt)
    data = fh.read(size)
    if len(data) != size:
        raise InputError("state file truncated")
    return struct.unpack("<" + fmt, data)


def _w_bytes(fh: BinaryIO, data: bytes) -> None:
    _w(fh, "I", len(data))
    fh.write(data)


def _r_bytes(fh: BinaryIO) -> bytes:
    (n,) = _r(fh, "I")
    data = fh.read(n)
    if len(data) != n:
        raise InputError("state file truncated")
    return data


def _w_matrix(fh: BinaryIO, A: ColumnMatrix) -> None:
    _w(fh, "QQ", A.nrows, A.ncols)
    for col in A.columns:
        _w(fh, "I", len(col.entries))
        for i, v in col.entries:
            _w(fh, "II", i, v)


def _r_matrix(fh: BinaryIO, fld: PrimeField) -> ColumnMatrix:
    nrows, ncols = _r(fh, "QQ")
    cols = []
    for _ in range(ncols):
        (cnt,) = _r(fh, "I")
        entries = [tuple(_r(fh, "II")) for _ in range(cnt)]
        cols.append(SparseColumn(entries))  # type: ignore[arg-type]
    return ColumnMatrix(nrows, ncols, cols, fld)


def _restore_meta(meta: dict) -> dict:
    out = dict(meta)
    if "shape" in out:
        out["shape"] = tuple(out["shape"])
    return out


def _complex_payload(cx: FilteredComplex) -> dict:
    return {
        "kind": cx.kind,
        "report_dim": cx.report_dim,
        "meta": {k: (list(v) if isinstance(v, tuple) else v) for k, v in cx.meta.items()},
        "dims": [[{"key": list(c.key), "value": c.value} for c in cells]
                 for cells in cx.cells_by_dim],
    }


def _complex_from_payload(data: dict) -> FilteredComplex:
    cells_by_dim: List[List[Cell]] = []
    for q, cells in enumerate(data["dims"]):
        cells_by_dim.append([Cell(q, tuple(c["key"]), float(c["value"]), [])
                             for c in cells])
    return FilteredComplex(cells_by_dim, data["kind"], _restore_meta(data["meta"]),
                           report_dim=data["report_dim"], validate=False)


def save_state(path: str, state: DecompositionSet, recipe: Optional[dict] = None,
               fmt: str = "binary") -> None:
    if fmt == "text":
        doc = {
            "magic": MAGIC.decode(),
            "version": VERSION,
            "p": state.field.p,
            "mode": state.mode,
            "use_clearing": state.use_clearing,
            "keep_basis": state.keep_basis,
            "recipe": recipe or {},
            "complex": _complex_payload(state.complex),
            "decs": [
                {"R": _matrix_payload(dec.R),
                 "V": _matrix_payload(dec.V) if dec.V is not None else None}
                for dec in state.decs
            ],
            "counters": [state.counters.column_additions,
                         state.counters.pivot_eliminations, state.counters.swaps],
        }
        with open(path, "w") as fh:
            json.dump(doc, fh)
        return
    if fmt != "binary":
        raise InputError(f"unknown state format {fmt!r}")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        _w(fh, "HB", VERSION, 0)
        _w(fh, "IBBB", state.field.p, _MODES.index(state.mode),
           int(state.use_clearing), int(state.keep_basis))
        _w_bytes(fh, json.dumps(recipe or {}, sort_keys=True).encode())
        cx = state.complex
        _w_bytes(fh, cx.kind.encode())
        _w(fh, "i", cx.report_dim)
        _w_bytes(fh, json.dumps(
            {k: (list(v) if isinstance(v, tuple) else v) for k, v in cx.meta.items()},
            sort_keys=True).encode())
        _w(fh, "I", cx.max_dim + 1)
        for cells in cx.cells_by_dim:
            _w(fh, "Q", len(cells))
            for c in cells:
                _w(fh, "B", len(c.key))
                _w(fh, f"{len(c.key)}q", *c.key)
                _w(fh, "d", c.value)
        _w(fh, "I", len(state.decs))
        for dec in state.decs:
            _w_matrix(fh, dec.R)
            _w(fh, "B", 1 if dec.V is not None else 0)
            if dec.V is not None:
                _w_matrix(fh, dec.V)
        _w(fh, "QQQ", state.counters.column_additions,
           state.counters.pivot_eliminations, state.counters.swaps)


def _matrix_payload(A: ColumnMatrix) -> dict:
    return {"nrows": A.nrows, "ncols": A.ncols,
            "cols": [[list(e) for e in c.entries] for c in A.columns]}


def _matrix_from_payload(data: dict, fld: PrimeField) -> ColumnMatrix:
    cols = [SparseColumn([tuple(e) for e in c]) for c in data["cols"]]
    return ColumnMatrix(data["nrows"], data["ncols"], cols, fld)


def load_state(path: str) -> Tuple[DecompositionSet, dict]:
    with open(path, "rb") as fh:
        head = fh.read(4)
        if head == MAGIC:
            return _load_binary(fh)
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not a state file ({exc})")
    if doc.get("magic") != MAGIC.decode():
        raise InputError(f"{path}: not a state file")
    fld = PrimeField(doc["p"])
    decs = [RUDecomposition(_matrix_from_payload(d["R"], fld),
                            _matrix_from_payload(d["V"], fld) if d["V"] is not None else None,
                            reduced=True)
            for d in doc["decs"]]
    ca, pe, sw = doc["counters"]
    state = DecompositionSet(doc["mode"], fld, _complex_from_payload(doc["complex"]),
                             decs, doc["use_clearing"], doc["keep_basis"],
                             OperationCounters(ca, pe, sw))
    return state, doc.get("recipe", {})


def _load_binary(fh: BinaryIO) -> Tuple[DecompositionSet, dict]:
    version, _flags = _r(fh, "HB")
    if version != VERSION:
        raise InputError(f"unsupported state version {version}")
    p, mode_idx, clearing, basis = _r(fh, "IBBB")
    recipe = json.loads(_r_bytes(fh).decode())
    fld = PrimeField(p)
    kind = _r_bytes(fh).decode()
    (report_dim,) = _r(fh, "i")
    meta = _restore_meta(json.loads(_r_bytes(fh).decode()))
    (ndims,) = _r(fh, "I")
    cells_by_dim: List[List[Cell]] = []
    for q in range(ndims):
        (count,) = _r(fh, "Q")
        cells = []
        for _ in range(count):
            (klen,) = _r(fh, "B")
            key = _r(fh, f"{klen}q")
            (value,) = _r(fh, "d")
            cells.append(Cell(q, tuple(key), value, []))
        cells_by_dim.append(cells)
    cx = FilteredComplex(cells_by_dim, kind, meta, report_dim=report_dim, validate=False)
    (ndecs,) = _r(fh, "I")
    decs = []
    for _ in range(ndecs):
        R = _r_matrix(fh, fld)
        (has_v,) = _r(fh, "B")
        V = _r_matrix(fh, fld) if has_v else None
        decs.append(RUDecomposition(R, V, reduced=True))
    ca, pe, sw = _r(fh, "QQQ")
    state = DecompositionSet(_MODES[mode_idx], fld, cx, decs, bool(clearing),
                             bool(basis), OperationCounters(ca, pe, sw))
    return state, recipe
