"""Thin data-science bindings for the warmpers persistence engine.

Arrays in, arrays out: `bind_compute` builds a filtration from an in-memory
numeric array, computes its barcode, and returns an opaque state handle;
`bind_update` pushes the handle to new data. No files are touched and no
algorithmic logic lives here — every result is produced by the engine and
is byte-comparable with the command line's output via `BoundBarcode.text`.

Handles are single-owner: calls into one handle must be externally
serialized, and a handle that saw an engine error refuses further use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from warmpers import (Barcode, UsageError, compute_persistence, format_barcode,
                      lower_star_cubical, lower_star_freudenthal, rips_filtration,
                      update_persistence)
from warmpers.field import PrimeField

__all__ = ["BoundBarcode", "StateHandle", "bind_compute", "bind_update"]

_KINDS = ("rips", "freudenthal", "cubical")


@dataclass(frozen=True)
class BoundBarcode:
    """Barcode as parallel arrays; +inf death and -1 death index mark
    essential classes."""

    dims: np.ndarray
    births: np.ndarray
    deaths: np.ndarray
    birth_indices: np.ndarray
    death_indices: np.ndarray
    text: str

    def __len__(self) -> int:
        return len(self.dims)


def _bound(barcode: Barcode, include_zero: bool) -> BoundBarcode:
    pairs = barcode.sorted_pairs(include_zero=include_zero)
    return BoundBarcode(
        dims=np.array([p.dim for p in pairs], dtype=np.int64),
        births=np.array([p.birth for p in pairs], dtype=np.float64),
        deaths=np.array([p.death for p in pairs], dtype=np.float64),
        birth_indices=np.array([p.birth_index for p in pairs], dtype=np.int64),
        death_indices=np.array(
            [-1 if p.death_index is None else p.death_index for p in pairs],
            dtype=np.int64),
        text=format_barcode(barcode, include_zero=include_zero),
    )


@dataclass
class StateHandle:
    """Opaque, single-owner handle over one engine decomposition state."""

    _state: object = field(repr=False)
    _options: dict = field(repr=False)
    _live: bool = True

    def _require_live(self):
        if not self._live:
            raise UsageError("state handle is stale (consumed by an earlier error)")


def _build(data, kind: str, max_dim: int, r_max, is_dist: bool):
    arr = np.asarray(data, dtype=float)
    if kind == "rips":
        if is_dist:
            return rips_filtration(dist=arr, r_max=r_max, max_dim=max_dim)
        return rips_filtration(arr, r_max=r_max, max_dim=max_dim)
    if kind == "freudenthal":
        return lower_star_freudenthal(arr)
    if kind == "cubical":
        return lower_star_cubical(arr)
    raise UsageError(f"unknown complex kind {kind!r}; pick from {_KINDS}")


def bind_compute(data, kind: str = "rips", max_dim: int = 1,
                 r_max="enc", mode: str = "homology", use_clearing: bool = True,
                 p: int = 2, is_dist: bool = False,
                 include_zero_bars: bool = False) -> Tuple[StateHandle, BoundBarcode]:
    """Compute persistence of an in-memory array; returns (handle, barcode).

    `data` is a point array (rips), a square distance matrix (rips with
    is_dist), or a 2D/3D value grid (freudenthal/cubical).  The handle can
    be pushed to new data of the same shape with bind_update.
    """
    options = {"kind": kind, "max_dim": max_dim, "r_max": r_max,
               "is_dist": is_dist, "include_zero_bars": include_zero_bars}
    cx = _build(data, kind, max_dim, r_max, is_dist)
    state, barcode = compute_persistence(cx, mode=mode, use_clearing=use_clearing,
                                         keep_basis=True, fld=PrimeField(p))
    return StateHandle(state, options), _bound(barcode, include_zero_bars)


def bind_update(handle: StateHandle, data) -> BoundBarcode:
    """Warm-start the handle's state on new data; the handle advances.

    Engine errors invalidate the handle; later calls raise a usage
    exception instead of operating on a half-updated state.
    """
    handle._require_live()
    opts = handle._options
    cx = _build(data, opts["kind"], opts["max_dim"], opts["r_max"], opts["is_dist"])
    try:
        new_state, barcode = update_persistence(handle._state, cx)
    except Exception:
        handle._live = False
        raise
    handle._state = new_state
    return _bound(barcode, opts["include_zero_bars"])
