"""Binary grid files for simulation input and output.

One file holds one field of mu components on an N^3 grid:

    offset  size  content
    0       8     magic "PFFTGRID"
    8       4     N, little-endian unsigned
    12      4     mu, little-endian unsigned
    16      4     word kind: 0 real, 1 complex
    20      ...   mu * N^3 values, C row-major, little-endian binary64
                  (real) or binary64 pairs (complex)

Nothing about the format depends on the process grid; decomposition is
the simulator's business, files always hold the whole volume.
"""

from __future__ import annotations

import struct

import numpy as np

__all__ = [
    "GRID_MAGIC",
    "WORD_REAL",
    "WORD_COMPLEX",
    "GridFormatError",
    "write_grid",
    "read_grid",
]

GRID_MAGIC = b"PFFTGRID"
WORD_REAL = 0
WORD_COMPLEX = 1

_HEADER = struct.Struct("<8sIII")


class GridFormatError(ValueError):
    """File is not a grid file or its header disagrees with its size."""


def write_grid(path, field) -> None:
    """Store a (mu, N, N, N) or (N, N, N) array; complex dtype is kept."""
    a = np.asarray(field)
    if a.ndim == 3:
        a = a[np.newaxis]
    if a.ndim != 4 or len(set(a.shape[1:])) != 1:
        raise GridFormatError(
            f"expected a (mu, N, N, N) or (N, N, N) array, got shape {a.shape}"
        )
    mu, n = a.shape[0], a.shape[1]
    if np.iscomplexobj(a):
        kind, dtype = WORD_COMPLEX, "<c16"
    else:
        kind, dtype = WORD_REAL, "<f8"
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(GRID_MAGIC, n, mu, kind))
        fh.write(np.ascontiguousarray(a, dtype=dtype).tobytes())


def read_grid(path) -> np.ndarray:
    """Load a grid file as a (mu, N, N, N) array, float64 or complex128."""
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if len(head) != _HEADER.size:
            raise GridFormatError("file is shorter than a grid header")
        magic, n, mu, kind = _HEADER.unpack(head)
        if magic != GRID_MAGIC:
            raise GridFormatError(f"bad magic {magic!r}")
        if kind == WORD_REAL:
            dtype, width = "<f8", 8
        elif kind == WORD_COMPLEX:
            dtype, width = "<c16", 16
        else:
            raise GridFormatError(f"unknown word kind {kind}")
        body = fh.read()
    expect = mu * n**3 * width
    if len(body) != expect:
        raise GridFormatError(
            f"header promises {expect} value bytes, file carries {len(body)}"
        )
    a = np.frombuffer(body, dtype=dtype).reshape(mu, n, n, n)
    # native byte order, writable
    return a.astype(np.complex128 if kind == WORD_COMPLEX else np.float64)
