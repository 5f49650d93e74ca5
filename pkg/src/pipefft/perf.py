"""Analytical performance models of the distributed transform machines.

Five machine organizations are modeled, all built from the same streaming
engines and all parameterized by the engine multiplicity k and the number
of field components mu:

* sequential: Q = k engines take turns on the X, Y and Z phases;
* pipelined: X, Y and Z engines run concurrently (Q = 3k), the Y stage
  stalling on the X drain;
* parallel: one dedicated machine per component (resources scale by mu);
* sequential_streaming: the sequential machine fed all mu components
  back to back;
* pipelined_streaming: the pipelined machine with doubled X engines
  (Q = 4k) fed all mu components back to back.

Every total is available in exact form (block latencies included) and in
the large-N asymptotic form the summary tables use. For the pipelined
streaming machine the published closed form and the published prediction
grid disagree by exactly a factor of two in the drain term; both variants
are implemented and callers pick one explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import WORD_BYTES
from .numerics import is_power_of_two

__all__ = [
    "ARCH_KINDS",
    "DEVICE_MEMORY_BYTES",
    "ArchSpec",
    "TimelineEvent",
    "timeline",
    "total_time",
    "pipelined_streaming_time",
    "host_bandwidth",
    "ComparisonRow",
    "architecture_comparison",
    "network_bandwidth",
    "CalcTimeTable",
    "predict_table",
]

ARCH_KINDS = (
    "sequential",
    "pipelined",
    "parallel",
    "sequential_streaming",
    "pipelined_streaming",
)

DEVICE_MEMORY_BYTES = 8 * 2**30  # on-package RAM per node


@dataclass(frozen=True)
class ArchSpec:
    """One machine configuration: organization, problem size and latencies.

    l_fft, l_dma and l_comm are block latencies in seconds; they default to
    zero, which reproduces the asymptotic tables. k is the engine
    multiplicity knob; Q and the controller counts derive from it.
    """

    kind: str
    n: int
    p: int = 1
    rows: int = 4
    k: int = 1
    mu: int = 1
    t_clk: float = 1.0 / 180.0e6
    l_fft: float = 0.0
    l_dma: float = 0.0
    l_comm: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ARCH_KINDS:
            raise ValueError(f"kind must be one of {ARCH_KINDS}, got {self.kind!r}")
        if not is_power_of_two(self.n) or self.n < 2:
            raise ValueError(f"n must be a power of two >= 2, got {self.n}")
        if self.p < 1:
            raise ValueError(f"p must be positive, got {self.p}")
        for name in ("rows", "k", "mu"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.t_clk > 0.0:
            raise ValueError(f"t_clk must be positive, got {self.t_clk}")
        for name in ("l_fft", "l_dma", "l_comm"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must not be negative")

    @property
    def engines(self) -> int:
        return {
            "sequential": self.k,
            "sequential_streaming": self.k,
            "pipelined": 3 * self.k,
            "pipelined_streaming": 4 * self.k,
            "parallel": self.mu * self.k,
        }[self.kind]

    @property
    def host_dma(self) -> int:
        return {
            "sequential": self.k,
            "sequential_streaming": self.k,
            "pipelined": self.k,
            "pipelined_streaming": 2 * self.k,
            "parallel": self.mu * self.k,
        }[self.kind]

    @property
    def local_dma(self) -> int:
        return {
            "sequential": 2 * self.k,
            "sequential_streaming": 2 * self.k,
            "pipelined": 4 * self.k,
            "pipelined_streaming": 4 * self.k,
            "parallel": 2 * self.mu * self.k,
        }[self.kind]

    @property
    def net_controllers(self) -> int:
        return {
            "sequential": self.k,
            "sequential_streaming": self.k,
            "pipelined": 2 * self.k,
            "pipelined_streaming": 2 * self.k,
            "parallel": self.mu * self.k,
        }[self.kind]


@dataclass(frozen=True)
class TimelineEvent:
    name: str
    seconds: float
    note: str = ""


def timeline(arch: ArchSpec) -> list[TimelineEvent]:
    """The t0..t11 event chain of one component through the machine.

    Defined for the sequential and pipelined organizations, which are the
    two laid out as explicit event chains; the streaming and parallel
    variants reuse these structures and only their totals are modeled.
    """
    n, p, r, k = arch.n, arch.p, arch.rows, arch.k
    t_clk = arch.t_clk
    l_fft, l_dma, l_comm = arch.l_fft, arch.l_dma, arch.l_comm
    if arch.kind == "sequential":
        q = arch.engines
        x_drain = t_clk * n**3 / (2 * p * r * q)
        y_drain = t_clk * (n**3 + 2 * n**2) / (4 * p * r * q)
        t1 = l_dma
        t4 = t1 + l_fft + x_drain
        t5 = t4 + l_dma
        t8 = t5 + l_fft + y_drain
        t9 = t8 + l_dma
        t10 = t9 + l_fft
        return [
            TimelineEvent("t0", 0.0, "host read of X pencils starts"),
            TimelineEvent("t1", t1, "first words reach the X engines"),
            TimelineEvent("t2", t1 + l_fft, "first transformed words leave the engines"),
            TimelineEvent("t3", t1 + l_fft + l_comm, "row exchange starts landing Y pencils"),
            TimelineEvent("t4", t4, "X phase drained"),
            TimelineEvent("t5", t5, "Y transform starts"),
            TimelineEvent("t6", t5 + l_fft, "first Y words reach the network"),
            TimelineEvent("t7", t5 + l_fft + l_comm, "column exchange starts landing Z pencils"),
            TimelineEvent("t8", t8, "Y phase drained"),
            TimelineEvent("t9", t9, "Z transform starts"),
            TimelineEvent("t10", t10, "first results head back to the host"),
            TimelineEvent("t11", t10 + l_dma + y_drain, "all results stored"),
        ]
    if arch.kind == "pipelined":
        plane = t_clk * n**2 / (2 * p * r * k)
        t1 = l_dma
        t2 = t1 + l_fft
        t3 = t2 + l_comm
        t4 = t3 + plane
        t5 = t4 + l_dma
        t6 = t5 + l_fft
        t7 = t6 + l_comm
        t8_free = t7 + t_clk * (n - 1) * n**2 / (4 * p * r * k)
        t8_stall = t2 + t_clk * n**3 / (2 * p * r * k)
        stalled = t8_stall >= t8_free
        t8 = max(t8_free, t8_stall)
        t9 = t8 + l_dma
        t10 = t9 + l_fft
        return [
            TimelineEvent("t0", 0.0, "host read starts"),
            TimelineEvent("t1", t1, "first words reach the X engines"),
            TimelineEvent("t2", t2, "first transformed words leave the X engines"),
            TimelineEvent("t3", t3, "row exchange starts landing Y pencils"),
            TimelineEvent("t4", t4, "first plane X-transformed; Y input readable"),
            TimelineEvent("t5", t5, "Y transform starts"),
            TimelineEvent("t6", t6, "first Y words reach the network"),
            TimelineEvent("t7", t7, "column exchange starts landing Z pencils"),
            TimelineEvent(
                "t8",
                t8,
                "Y phase drained"
                + (", held back by the X drain" if stalled else ", no stall"),
            ),
            TimelineEvent("t9", t9, "Z transform starts"),
            TimelineEvent("t10", t10, "first results head back to the host"),
            TimelineEvent("t11", t10 + l_dma + t_clk * n**3 / (4 * p * r * k), "all results stored"),
        ]
    raise ValueError(f"timeline is defined for sequential and pipelined, not {arch.kind!r}")


def pipelined_streaming_time(
    n: int,
    p: int,
    rows: int,
    k: int,
    mu: int,
    t_clk: float,
    form: str = "table",
) -> float:
    """Calculation time of the pipelined streaming machine.

    form="table" is (mu+1) * t_clk * N^3 / (2 P R k), the expression the
    published prediction grid follows; form="equation" is the published
    closed form with 4 in the denominator. They differ by exactly 2.
    """
    if form == "table":
        denom = 2.0
    elif form == "equation":
        denom = 4.0
    else:
        raise ValueError(f"form must be 'table' or 'equation', got {form!r}")
    return (mu + 1) * t_clk * n**3 / (denom * p * rows * k)


def total_time(arch: ArchSpec, exact: bool = False) -> float:
    """Run time of the whole 3-D transform on one machine organization.

    exact=False gives the large-N asymptotic form; exact=True keeps the
    block latencies and the N^2-order packed-payload terms.
    """
    n, p, r, k, mu, t_clk = arch.n, arch.p, arch.rows, arch.k, arch.mu, arch.t_clk
    if arch.kind in ("sequential", "parallel", "sequential_streaming"):
        q = k  # engines per active phase; parallel replicates whole machines
        repeats = mu if arch.kind == "sequential_streaming" else 1
        x_drain = t_clk * n**3 / (2 * p * r * q)
        y_drain = t_clk * (n**3 + 2 * n**2) / (4 * p * r * q)
        if exact:
            return 4 * arch.l_dma + 3 * arch.l_fft + repeats * (x_drain + 2 * y_drain)
        return repeats * 2 * x_drain
    if arch.kind == "pipelined":
        drain = t_clk * n**3 / (2 * p * r * k) + t_clk * n**3 / (4 * p * r * k)
        if exact:
            return 3 * arch.l_dma + 2 * arch.l_fft + drain
        return drain
    # pipelined_streaming
    value = pipelined_streaming_time(n, p, r, k, mu, t_clk, form="table")
    if exact:
        return 3 * arch.l_dma + 2 * arch.l_fft + value
    return value


def host_bandwidth(arch: ArchSpec) -> float:
    """Host-side data throughput that keeps the pipelines fed, bytes/s."""
    s, r, t_clk = WORD_BYTES, arch.rows, arch.t_clk
    per_engine_group = 4.0 * s * r / t_clk
    if arch.kind in ("sequential", "sequential_streaming"):
        return per_engine_group * arch.k
    if arch.kind in ("pipelined", "pipelined_streaming"):
        return per_engine_group * arch.k
    return per_engine_group * arch.mu * arch.k


@dataclass(frozen=True)
class ComparisonRow:
    """One machine in normalized units.

    time is in units of t_clk * N^3 / (2 P R) seconds, bandwidth in units
    of 4 s R / t_clk bytes/s, ram in units of s N^3 / P bytes to leading
    order.
    """

    label: str
    time_units: float
    bandwidth_units: float
    ram_units: float
    engines: int
    host_dma: int
    local_dma: int
    net_controllers: int


def architecture_comparison(mu: int, k: int = 1, fixed_q: int | None = None) -> list[ComparisonRow]:
    """Normalized machine comparison for a mu-component field.

    With fixed_q=None, the streaming sequential, streaming pipelined and
    parallel machines are compared at engine multiplicity k. With fixed_q
    set, the sequential and pipelined machines are compared at the same
    total engine count Q (pipelined needs Q to be a multiple of 4). The
    pipelined row follows the published closed form, with 4 in the drain
    denominator.
    """
    if mu < 1:
        raise ValueError(f"mu must be positive, got {mu}")
    if fixed_q is None:
        seq = ComparisonRow(
            "sequential", 2.0 * mu / k, 1.0 * k, 2.0,
            engines=k, host_dma=k, local_dma=2 * k, net_controllers=k,
        )
        pipe = ComparisonRow(
            "pipelined", (mu + 1) / (2.0 * k), 1.0 * k, 2.0,
            engines=4 * k, host_dma=2 * k, local_dma=4 * k, net_controllers=2 * k,
        )
        par = ComparisonRow(
            "parallel", 2.0 / k, 1.0 * mu * k, 2.0 * mu,
            engines=mu * k, host_dma=mu * k, local_dma=2 * mu * k,
            net_controllers=mu * k,
        )
        return [seq, pipe, par]
    if fixed_q < 4 or fixed_q % 4:
        raise ValueError(f"fixed_q must be a positive multiple of 4, got {fixed_q}")
    k_pipe = fixed_q // 4
    seq = ComparisonRow(
        "sequential", 2.0 * mu / fixed_q, 1.0 * fixed_q, 2.0,
        engines=fixed_q, host_dma=fixed_q, local_dma=2 * fixed_q,
        net_controllers=fixed_q,
    )
    pipe = ComparisonRow(
        "pipelined", (mu + 1) / (2.0 * k_pipe), 1.0 * k_pipe, 2.0,
        engines=4 * k_pipe, host_dma=2 * k_pipe, local_dma=4 * k_pipe,
        net_controllers=2 * k_pipe,
    )
    return [seq, pipe]


def network_bandwidth(topology: str, p: int, rows: int = 4, t_clk: float = 1.0 / 180.0e6) -> float:
    """Required per-node network bandwidth on a square P-node grid, bytes/s.

    A switched grid carries the exchanged fraction at engine throughput;
    a torus pays an extra sqrt(P)/2 multi-hop factor on top of it.
    """
    if p < 1:
        raise ValueError(f"p must be positive, got {p}")
    side = math.isqrt(p)
    if side * side != p:
        raise ValueError(f"grid is sqrt(P) x sqrt(P); P must be a perfect square, got {p}")
    if topology == "switched":
        return (4.0 * WORD_BYTES * rows / t_clk) * (side - 1) / side
    if topology == "torus":
        return (2.0 * WORD_BYTES * rows / t_clk) * (side - 1)
    raise ValueError(f"topology must be 'switched' or 'torus', got {topology!r}")


@dataclass(frozen=True)
class CalcTimeTable:
    """Calculation-time predictions over an (N, P) grid.

    cells[i][j] is seconds for n_values[i] on p_values[j], or None where
    the per-node working set would not fit in device memory.
    """

    mu: int
    rows: int
    k: int
    t_clk: float
    device_bytes: int
    n_values: tuple[int, ...]
    p_values: tuple[int, ...]
    cells: tuple[tuple[float | None, ...], ...]

    def cell(self, n: int, p: int) -> float | None:
        return self.cells[self.n_values.index(n)][self.p_values.index(p)]

    def to_csv(self) -> str:
        header = "n," + ",".join(f"p{p}" for p in self.p_values)
        lines = [header]
        for n, row in zip(self.n_values, self.cells):
            cells = ["" if c is None else repr(c) for c in row]
            lines.append(f"{n}," + ",".join(cells))
        return "\n".join(lines) + "\n"

    def to_markdown(self) -> str:
        """Same cell text as to_csv, pipe-table framing."""
        header = "| n | " + " | ".join(f"p{p}" for p in self.p_values) + " |"
        rule = "|" + "---|" * (len(self.p_values) + 1)
        lines = [header, rule]
        for n, row in zip(self.n_values, self.cells):
            cells = ["" if c is None else repr(c) for c in row]
            lines.append(f"| {n} | " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        width = 12
        head = "N \\ P".rjust(6) + "".join(str(p).rjust(width) for p in self.p_values)
        lines = [head]
        for n, row in zip(self.n_values, self.cells):
            cells = "".join(
                ("-" if c is None else f"{c:.4g}").rjust(width) for c in row
            )
            lines.append(str(n).rjust(6) + cells)
        return "\n".join(lines) + "\n"


def predict_table(
    mu: int,
    n_values: tuple[int, ...] = (512, 1024, 2048, 4096, 8192),
    p_values: tuple[int, ...] = (1, 4, 16, 64, 256, 1024),
    rows: int = 4,
    k: int = 1,
    t_clk: float = 1.0 / 180.0e6,
    device_bytes: int = DEVICE_MEMORY_BYTES,
) -> CalcTimeTable:
    """Pipelined-streaming calculation times where the problem fits.

    A cell is populated when the leading-order per-node working set
    2 s N^3 / P fits the device memory, boundary included.
    """
    grid_rows = []
    for n in n_values:
        row: list[float | None] = []
        for p in p_values:
            working_set = 2 * WORD_BYTES * n**3 // p
            if working_set > device_bytes:
                row.append(None)
            else:
                row.append(pipelined_streaming_time(n, p, rows, k, mu, t_clk, form="table"))
        grid_rows.append(tuple(row))
    return CalcTimeTable(
        mu=mu,
        rows=rows,
        k=k,
        t_clk=t_clk,
        device_bytes=device_bytes,
        n_values=tuple(n_values),
        p_values=tuple(p_values),
        cells=tuple(grid_rows),
    )
