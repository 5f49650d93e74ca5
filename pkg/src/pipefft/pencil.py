"""Pencil decomposition geometry and per-node volume accounting.

A P = P_u * P_v process grid owns an N^3 volume in pencils: each phase keeps
one axis fully local and tiles the other two across the grid. The X phase
tiles (j, k), the Y phase tiles (i, k) and the Z phase tiles (i, j), so the
XY fold only moves data between nodes that share v (grid rows) and the YZ
fold only between nodes that share u (grid columns).

Real input packs the first axis to N/2 + 1 complex bins, which is where the
N^2-order correction in the per-node payload V' comes from.
"""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import is_power_of_two

__all__ = [
    "PHASES",
    "PencilGrid",
    "VolumeReport",
    "Transfer",
    "owner_of",
    "transpose_map",
    "volumes",
    "ram_per_node",
    "memory_occupancy",
]

PHASES = ("x", "y", "z")

_MAP_LIMIT = 1 << 18  # transpose_map enumerates every point; keep it honest


@dataclass(frozen=True)
class PencilGrid:
    """Problem size and process-grid shape, plus the storage word size."""

    n: int
    p_u: int = 1
    p_v: int = 1
    word_bytes: int = 8

    def __post_init__(self) -> None:
        if not is_power_of_two(self.n) or self.n < 2:
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        for name in ("p_u", "p_v"):
            val = getattr(self, name)
            if not is_power_of_two(val):
                raise ValueError(f"{name} must be a power of two >= 1, got {val}")
            if val > self.n:
                raise ValueError(f"{name} must not exceed n, got {val} > {self.n}")
        if self.word_bytes < 1:
            raise ValueError(f"word_bytes must be positive, got {self.word_bytes}")

    @property
    def p(self) -> int:
        return self.p_u * self.p_v


def owner_of(grid: PencilGrid, point: tuple[int, int, int], phase: str) -> tuple[int, int]:
    """Grid coordinates (u, v) of the node holding one point in one phase."""
    i, j, k = point
    for name, idx in (("i", i), ("j", j), ("k", k)):
        if not 0 <= idx < grid.n:
            raise ValueError(f"{name} out of range [0, {grid.n}), got {idx}")
    if phase == "x":
        return (j * grid.p_u // grid.n, k * grid.p_v // grid.n)
    if phase == "y":
        return (i * grid.p_u // grid.n, k * grid.p_v // grid.n)
    if phase == "z":
        return (i * grid.p_u // grid.n, j * grid.p_v // grid.n)
    raise ValueError(f"phase must be one of {PHASES}, got {phase!r}")


@dataclass(frozen=True)
class Transfer:
    """All points one node hands one other node (or keeps, when src == dst)."""

    src: tuple[int, int]
    dst: tuple[int, int]
    points: frozenset


def transpose_map(grid: PencilGrid, fold: str, include_kept: bool = False) -> list[Transfer]:
    """Exhaustive point routing for one fold, "xy" or "yz".

    By default lists only the node-to-node moves, so a fold that is all
    local (p_u = 1 for "xy", p_v = 1 for "yz") maps to an empty list.
    include_kept=True adds the src == dst entries, making the union over
    all point sets rebuild the full volume. Enumerates all n^3 points;
    refuses grids too big for that to be sane.
    """
    if fold == "xy":
        before, after = "x", "y"
    elif fold == "yz":
        before, after = "y", "z"
    else:
        raise ValueError(f"fold must be 'xy' or 'yz', got {fold!r}")
    if grid.n**3 > _MAP_LIMIT:
        raise ValueError(f"transpose_map enumerates n^3 points; n={grid.n} is too large")
    routes: dict[tuple[tuple[int, int], tuple[int, int]], set] = {}
    for i in range(grid.n):
        for j in range(grid.n):
            for k in range(grid.n):
                point = (i, j, k)
                key = (owner_of(grid, point, before), owner_of(grid, point, after))
                routes.setdefault(key, set()).add(point)
    return [
        Transfer(src, dst, frozenset(points))
        for (src, dst), points in sorted(routes.items())
        if include_kept or src != dst
    ]


@dataclass(frozen=True)
class VolumeReport:
    """Per-node byte volumes: raw pencil, packed payload, and working set."""

    v_bytes: int
    v_prime_bytes: int
    ram_bytes: int


def _exact_div(num: int, den: int, what: str) -> int:
    q, r = divmod(num, den)
    if r:
        raise ValueError(f"{what} does not divide evenly ({num} / {den})")
    return q


def volumes(grid: PencilGrid) -> VolumeReport:
    """V = s*N^3/P, V' = s*(N^3 + 2N^2)/P, working set 2*s*N^3/P."""
    s, n, p = grid.word_bytes, grid.n, grid.p
    return VolumeReport(
        v_bytes=_exact_div(s * n**3, p, "V"),
        v_prime_bytes=_exact_div(s * (n**3 + 2 * n**2), p, "V'"),
        ram_bytes=_exact_div(2 * s * n**3, p, "working set"),
    )


def ram_per_node(grid: PencilGrid) -> int:
    """Leading-order working set per node: in-flight plus staged copy."""
    return volumes(grid).ram_bytes


def memory_occupancy(grid: PencilGrid, architecture: str) -> int:
    """Peak bytes resident per node for one cluster architecture.

    The sequential machine keeps the incoming and outgoing pencil sets
    resident at once (2 V'). The pipelined streaming machine double-buffers
    its output pencils (also 2 V') and additionally stages two transposed
    planes per grid row, adding 2*s*N^2/P_u.
    """
    base = 2 * volumes(grid).v_prime_bytes
    if architecture == "sequential":
        return base
    if architecture == "pipelined":
        return base + _exact_div(2 * grid.word_bytes * grid.n**2, grid.p_u, "plane stage")
    raise ValueError(
        f"architecture must be 'sequential' or 'pipelined', got {architecture!r}"
    )
