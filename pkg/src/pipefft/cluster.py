"""Functional simulation of the P-node distributed 3-D transform.

Every node owns one pencil of the input volume and the whole transform runs
as five steps: transform along the first axis, fold within grid rows,
transform along the second axis, fold within grid columns, transform along
the third axis. Folds exchange one bulk message per (source, destination)
pair and every byte is written to a ledger, so communication claims can be
checked exactly: each fold moves exactly (1 - 1/P_u) resp. (1 - 1/P_v) of a
node's packed payload V', and no message ever differs from its sender in
both grid coordinates.

Real input packs the first axis to bins 0..N/2. Bins below N/2 tile evenly
across the P_u row. The single bin-N/2 plane cannot tile that way and keep
both the byte counts exact and the later transforms node-local, so it is
spread round-robin instead: by k during the row fold, then by transformed-j
tile during the column fold. Its third-axis lines therefore end up split
across a row and are transformed during result assembly; all of the
N^3-order payload is transformed strictly node-local.

The inverse runs the same machinery in complex mode through the conjugation
identity idft(x) = conj(dft(conj(x))) / N^3, so its ledger shows
complex-mode volumes (2 s N^3 / P per node and phase) with the same exact
fold fractions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import fft_radix2
from .pencil import PencilGrid

__all__ = [
    "Message",
    "CommLedger",
    "NodeState",
    "run_distributed_3dfft",
    "run_distributed_inverse",
]

_COMPLEX_BYTES = 16  # simulation computes in binary64 pairs


@dataclass(frozen=True)
class Message:
    """One bulk transfer between two nodes during one fold."""

    phase: str
    src: tuple[int, int]
    dst: tuple[int, int]
    nbytes: int


class CommLedger:
    """Every message and every kept-local block of a run, in emission order."""

    def __init__(self) -> None:
        self.messages: list[Message] = []
        self._kept: dict[tuple[str, tuple[int, int]], int] = {}

    def record_message(self, phase, src, dst, nbytes: int) -> None:
        self.messages.append(Message(phase, src, dst, nbytes))

    def record_kept(self, phase, node, nbytes: int) -> None:
        key = (phase, node)
        self._kept[key] = self._kept.get(key, 0) + nbytes

    def bytes_sent(self, phase: str, node) -> int:
        return sum(m.nbytes for m in self.messages if m.phase == phase and m.src == node)

    def bytes_received(self, phase: str, node) -> int:
        return sum(m.nbytes for m in self.messages if m.phase == phase and m.dst == node)

    def bytes_kept(self, phase: str, node) -> int:
        return self._kept.get((phase, node), 0)

    def total_bytes(self, phase: str | None = None) -> int:
        return sum(m.nbytes for m in self.messages if phase is None or m.phase == phase)

    def message_count(self, phase: str | None = None) -> int:
        return sum(1 for m in self.messages if phase is None or m.phase == phase)

    def nodes(self) -> list[tuple[int, int]]:
        seen = {m.src for m in self.messages} | {m.dst for m in self.messages}
        seen |= {node for _, node in self._kept}
        return sorted(seen)

    def to_csv(self) -> str:
        lines = ["phase,src_u,src_v,dst_u,dst_v,bytes"]
        for m in self.messages:
            lines.append(
                f"{m.phase},{m.src[0]},{m.src[1]},{m.dst[0]},{m.dst[1]},{m.nbytes}"
            )
        return "\n".join(lines) + "\n"

    def __eq__(self, other) -> bool:
        if not isinstance(other, CommLedger):
            return NotImplemented
        return self.messages == other.messages and self._kept == other._kept


@dataclass
class NodeState:
    """Buffers one node holds as the run progresses.

    regular buffers carry the evenly tiled payload; side buffers carry the
    node's share of the packed bin-N/2 plane (real input only).
    """

    u: int
    v: int
    phase: str = "x"
    x_input: np.ndarray | None = None
    x_regular: np.ndarray | None = None
    x_side: np.ndarray | None = None
    y_regular: np.ndarray | None = None
    y_side: np.ndarray | None = None
    z_regular: np.ndarray | None = None
    z_side: np.ndarray | None = None
    side_k: tuple[int, ...] = field(default_factory=tuple)

    @property
    def coords(self) -> tuple[int, int]:
        return (self.u, self.v)


# ---------------------------------------------------------------------------
# message plumbing


def _ship(transport, ledger, phase, src, dst, parts):
    """Account one bulk transfer and optionally push it through a transport.

    parts is a list of complex arrays; a transport sees them as one
    contiguous byte payload and must return it intact (possibly after a
    real codec round trip).
    """
    nbytes = sum(p.nbytes for p in parts)
    if src == dst:
        ledger.record_kept(phase, src, nbytes)
        return parts
    ledger.record_message(phase, src, dst, nbytes)
    if transport is None:
        return parts
    payload = b"".join(np.ascontiguousarray(p).tobytes() for p in parts)
    returned = transport.deliver(phase, src, dst, payload)
    if len(returned) != nbytes:
        raise ValueError(
            f"transport returned {len(returned)} bytes for a {nbytes}-byte message"
        )
    out = []
    offset = 0
    for p in parts:
        count = p.size
        flat = np.frombuffer(
            returned, dtype=np.complex128, count=count, offset=offset
        )
        out.append(flat.reshape(p.shape))
        offset += p.nbytes
    return out


def _validate_grid_for_real(grid: PencilGrid) -> None:
    n, p_u, p_v = grid.n, grid.p_u, grid.p_v
    if grid.word_bytes != 8:
        raise ValueError("the simulation computes in binary64; word_bytes must be 8")
    if n < 8:
        raise ValueError(f"distributed runs need n >= 8, got {n}")
    if p_u > n // 2:
        raise ValueError(f"p_u must not exceed n/2 (packed-row tiles), got {p_u}")
    if (n // p_v) % p_u:
        raise ValueError(
            f"exact fold accounting needs p_u | n/p_v, got p_u={p_u}, n/p_v={n // p_v}"
        )


# ---------------------------------------------------------------------------
# forward, packed-real pipeline


def run_distributed_3dfft(field, grid: PencilGrid, transport=None, keep_nodes=False):
    """Distributed forward transform of a real N^3 volume.

    Returns (spectrum, ledger), with spectrum the full natural-order complex
    volume, identical (to rounding) to a direct triple transform of the
    input. keep_nodes=True appends the final per-node states for
    inspection.
    """
    _validate_grid_for_real(grid)
    a = np.asarray(field)
    if a.shape != (grid.n,) * 3:
        raise ValueError(f"expected a ({grid.n},)*3 volume, got shape {a.shape}")
    if np.iscomplexobj(a):
        raise ValueError("forward input must be real; packed bins assume it")
    a = a.astype(np.float64)

    n, p_u, p_v = grid.n, grid.p_u, grid.p_v
    nu, nv = n // p_u, n // p_v
    h = n // (2 * p_u)          # packed rows per node after the row fold
    nvj = n // p_v              # transformed-j rows per node after the column fold
    ledger = CommLedger()

    nodes = {
        (u, v): NodeState(u, v) for u in range(p_u) for v in range(p_v)
    }
    order = sorted(nodes)

    # scatter and X-phase transform: full lines along the first axis
    for (u, v) in order:
        node = nodes[(u, v)]
        node.x_input = a[:, u * nu : (u + 1) * nu, v * nv : (v + 1) * nv].copy()
        spec = fft_radix2(node.x_input.astype(np.complex128), axis=0)
        node.x_regular = spec[: n // 2]
        node.x_side = spec[n // 2].copy()
        node.x_input = None

    # row fold: regular bins tile by ki, side plane spreads round-robin by k
    for (u, v) in order:
        node = nodes[(u, v)]
        k_global = v * nv + np.arange(nv)
        for dst_u in range(p_u):
            dst = nodes[(dst_u, v)]
            if dst.y_regular is None:
                dst.y_regular = np.empty((h, n, nv), dtype=np.complex128)
                owned = [k for k in range(v * nv, (v + 1) * nv) if k % p_u == dst_u]
                dst.side_k = tuple(owned)
                dst.y_side = np.empty((n, len(owned)), dtype=np.complex128)
            sel = np.nonzero(k_global % p_u == dst_u)[0]
            parts = [
                node.x_regular[dst_u * h : (dst_u + 1) * h],
                node.x_side[:, sel],
            ]
            parts = _ship(transport, ledger, "xy", (u, v), (dst_u, v), parts)
            dst.y_regular[:, u * nu : (u + 1) * nu, :] = parts[0]
            dst.y_side[u * nu : (u + 1) * nu, :] = parts[1]
        node.x_regular = None
        node.x_side = None

    # Y-phase transform: full lines along the second axis
    for (u, v) in order:
        node = nodes[(u, v)]
        node.phase = "y"
        node.y_regular = fft_radix2(node.y_regular, axis=1)
        node.y_side = fft_radix2(node.y_side, axis=0)

    # column fold: both payloads tile by the transformed-j index
    for (u, v) in order:
        node = nodes[(u, v)]
        for dst_v in range(p_v):
            dst = nodes[(u, dst_v)]
            if dst.z_regular is None:
                dst.z_regular = np.empty((h, nvj, n), dtype=np.complex128)
                dst.z_side = np.empty((nvj, n // p_u), dtype=np.complex128)
            parts = [
                node.y_regular[:, dst_v * nvj : (dst_v + 1) * nvj, :],
                node.y_side[dst_v * nvj : (dst_v + 1) * nvj, :],
            ]
            parts = _ship(transport, ledger, "yz", (u, v), (u, dst_v), parts)
            dst.z_regular[:, :, v * nv : (v + 1) * nv] = parts[0]
            cols = [k // p_u for k in node.side_k]
            dst.z_side[:, cols] = parts[1]
        node.y_regular = None
        node.y_side = None

    # Z-phase transform: node-local for the regular payload
    for (u, v) in order:
        node = nodes[(u, v)]
        node.phase = "z"
        node.z_regular = fft_radix2(node.z_regular, axis=2)

    # assembly: place regular tiles, then finish the split side plane
    half = np.empty((n // 2 + 1, n, n), dtype=np.complex128)
    side_full = np.empty((n, n), dtype=np.complex128)
    for (u, v) in order:
        node = nodes[(u, v)]
        node.phase = "done"
        half[u * h : (u + 1) * h, v * nvj : (v + 1) * nvj, :] = node.z_regular
        side_full[v * nvj : (v + 1) * nvj, u::p_u] = node.z_side
    half[n // 2] = fft_radix2(side_full, axis=1)

    spectrum = _reflect_packed(half, n)
    if keep_nodes:
        return spectrum, ledger, nodes
    return spectrum, ledger


def _reflect_packed(half: np.ndarray, n: int) -> np.ndarray:
    """Expand packed bins 0..N/2 of a real volume to the full spectrum."""
    full = np.empty((n, n, n), dtype=np.complex128)
    full[: n // 2 + 1] = half
    mirror = (-np.arange(n)) % n
    for ki in range(n // 2 + 1, n):
        full[ki] = np.conj(half[n - ki][np.ix_(mirror, mirror)])
    return full


# ---------------------------------------------------------------------------
# complex pipeline (single code path for the inverse)


def _run_complex(volume: np.ndarray, grid: PencilGrid, transport, ledger: CommLedger):
    n, p_u, p_v = grid.n, grid.p_u, grid.p_v
    nu, nv, hc, nvj = n // p_u, n // p_v, n // p_u, n // p_v
    nodes = {(u, v): NodeState(u, v) for u in range(p_u) for v in range(p_v)}
    order = sorted(nodes)

    for (u, v) in order:
        node = nodes[(u, v)]
        block = volume[:, u * nu : (u + 1) * nu, v * nv : (v + 1) * nv]
        node.x_regular = fft_radix2(np.ascontiguousarray(block), axis=0)

    for (u, v) in order:
        node = nodes[(u, v)]
        for dst_u in range(p_u):
            dst = nodes[(dst_u, v)]
            if dst.y_regular is None:
                dst.y_regular = np.empty((hc, n, nv), dtype=np.complex128)
            parts = [node.x_regular[dst_u * hc : (dst_u + 1) * hc]]
            parts = _ship(transport, ledger, "xy", (u, v), (dst_u, v), parts)
            dst.y_regular[:, u * nu : (u + 1) * nu, :] = parts[0]
        node.x_regular = None

    for (u, v) in order:
        nodes[(u, v)].phase = "y"
        nodes[(u, v)].y_regular = fft_radix2(nodes[(u, v)].y_regular, axis=1)

    for (u, v) in order:
        node = nodes[(u, v)]
        for dst_v in range(p_v):
            dst = nodes[(u, dst_v)]
            if dst.z_regular is None:
                dst.z_regular = np.empty((hc, nvj, n), dtype=np.complex128)
            parts = [node.y_regular[:, dst_v * nvj : (dst_v + 1) * nvj, :]]
            parts = _ship(transport, ledger, "yz", (u, v), (u, dst_v), parts)
            dst.z_regular[:, :, v * nv : (v + 1) * nv] = parts[0]
        node.y_regular = None

    out = np.empty((n, n, n), dtype=np.complex128)
    for (u, v) in order:
        node = nodes[(u, v)]
        node.phase = "z"
        node.z_regular = fft_radix2(node.z_regular, axis=2)
        out[u * hc : (u + 1) * hc, v * nvj : (v + 1) * nvj, :] = node.z_regular
        node.phase = "done"
    return out


def run_distributed_inverse(spectrum, grid: PencilGrid, transport=None):
    """Distributed inverse transform of a full complex spectrum.

    Returns (volume, ledger); the volume is complex with (up to rounding)
    zero imaginary part when the spectrum came from a real field.
    """
    if grid.word_bytes != 8:
        raise ValueError("the simulation computes in binary64; word_bytes must be 8")
    if grid.n < 8:
        raise ValueError(f"distributed runs need n >= 8, got {grid.n}")
    a = np.asarray(spectrum, dtype=np.complex128)
    if a.shape != (grid.n,) * 3:
        raise ValueError(f"expected a ({grid.n},)*3 volume, got shape {a.shape}")
    ledger = CommLedger()
    forward_of_conj = _run_complex(np.conj(a), grid, transport, ledger)
    volume = np.conj(forward_of_conj) / float(grid.n) ** 3
    return volume, ledger
