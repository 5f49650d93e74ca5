"""Streaming radix-2 pipeline engine with cycle accounting.

The engine consumes 2R complex words per clock on 2R lanes and runs one
decimation-in-frequency butterfly column per stage. At cycle c of a burst,
lane j carries flow-graph row c + j * N/(2R), so the early stages find their
partners across lanes and the late stages find them across time:

* while the pair distance is at least one lane apart the stage is spatial:
  butterflies pick their two lanes directly and the stage boundary is a
  plain one-cycle register;
* once the pair distance drops inside a lane pair the stage is temporal:
  each of the R rows owns two adjacent lanes and a two-register shuffler
  regroups elements that are N/2^(s+1) beats apart into same-cycle pairs.

Summing the element delays (log2 N butterfly columns of l_but, one register
per boundary, shuffler bodies, one output register) gives

    l_FFT = (l_but + 1) * log2(N) + N/(2R) - 1

and the shuffler bodies hold exactly N - 2R words. The engine is built by a
tag-only dry run that checks the pairing pattern of every butterfly against
the flow graph, fills the twiddle ROMs, and measures the latency; data runs
then consume the ROMs like the hardware would.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import is_power_of_two, twiddle

__all__ = [
    "WORD_BYTES",
    "FLOPS_PER_BUTTERFLY",
    "EngineConfig",
    "ShufflerSpec",
    "CycleReport",
    "ButterflyTrace",
    "butterfly",
    "butterfly_trace",
    "DataShuffler",
    "data_shuffle",
    "FftEngine",
    "fft_engine_run",
    "engine_metrics",
    "latency_cycles",
    "fft_radix2",
    "bit_reversed_indices",
]

WORD_BYTES = 8          # one double-precision real; a complex word is two
FLOPS_PER_BUTTERFLY = 10

_MIN_N, _MAX_N = 8, 8192
_MAX_OPERATOR_LATENCY = 14


@dataclass(frozen=True)
class EngineConfig:
    """Geometry and operator latencies of one engine instance.

    l_a and l_c are the two add/subtract bank latencies, l_b the multiplier
    bank latency; the four extra registration cycles are fixed by the
    datapath, so l_but = l_a + l_b + l_c + 4.
    """

    n: int
    rows: int = 1
    l_a: int = 6
    l_b: int = 6
    l_c: int = 6
    t_clk: float = 1.0 / 250.0e6

    def __post_init__(self) -> None:
        if not is_power_of_two(self.n) or not _MIN_N <= self.n <= _MAX_N:
            raise ValueError(
                f"n must be a power of two in [{_MIN_N}, {_MAX_N}], got {self.n}"
            )
        if not is_power_of_two(self.rows) or not 1 <= self.rows <= self.n // 2:
            raise ValueError(
                f"rows must be a power of two in [1, n/2], got {self.rows}"
            )
        for name in ("l_a", "l_b", "l_c"):
            val = getattr(self, name)
            if not isinstance(val, int) or not 0 <= val <= _MAX_OPERATOR_LATENCY:
                raise ValueError(f"{name} must be an integer in [0, 14], got {val!r}")
        if not self.t_clk > 0.0:
            raise ValueError(f"t_clk must be positive, got {self.t_clk}")

    @classmethod
    def from_operator_latency(
        cls, n: int, rows: int, l_op: int, clock_mhz: float
    ) -> "EngineConfig":
        """Build a config from the single published latency knob.

        The knob sets every operator bank at once; multipliers cap at 12
        cycles, so l_op = 14 means adders at 14 with multipliers at 12.
        """
        if not 0 <= l_op <= _MAX_OPERATOR_LATENCY:
            raise ValueError(f"l_op must be in [0, 14], got {l_op}")
        return cls(
            n=n,
            rows=rows,
            l_a=l_op,
            l_b=min(l_op, 12),
            l_c=l_op,
            t_clk=1.0 / (clock_mhz * 1.0e6),
        )

    @property
    def stages(self) -> int:
        return self.n.bit_length() - 1

    @property
    def l_but(self) -> int:
        return self.l_a + self.l_b + self.l_c + 4

    @property
    def lanes(self) -> int:
        return 2 * self.rows

    @property
    def burst_cycles(self) -> int:
        """Cycles one transform occupies on the input (and output) bus."""
        return self.n // self.lanes


def latency_cycles(config: EngineConfig) -> int:
    """Input-to-first-output latency, (l_but + 1) * log2(N) + N/(2R) - 1."""
    return (config.l_but + 1) * config.stages + config.burst_cycles - 1


@dataclass(frozen=True)
class ShufflerSpec:
    """Shape of the reorder element sitting after one temporal stage.

    In a single-row chain the element after stage s holds two shift
    registers of length L(s) = N / 2^(s+1) and delays the stream by
    L(s) + 1 cycles (L shift plus one output registration).
    """

    stage: int
    length: int

    def __post_init__(self) -> None:
        if self.stage < 1:
            raise ValueError(f"stage must be at least 1, got {self.stage}")
        if self.length < 1:
            raise ValueError(
                f"shuffler length must be at least 1, got {self.length}"
            )

    @classmethod
    def for_stage(cls, n: int, stage: int) -> "ShufflerSpec":
        if not is_power_of_two(n) or n < 4:
            raise ValueError(f"n must be a power of two >= 4, got {n}")
        if not 1 <= stage <= n.bit_length() - 2:
            raise ValueError(
                f"stage must be in [1, log2(n) - 1], got {stage} for n={n}"
            )
        return cls(stage=stage, length=n >> (stage + 1))

    @property
    def delay_cycles(self) -> int:
        return self.length + 1

    @property
    def storage_words(self) -> int:
        return 2 * self.length


@dataclass(frozen=True)
class CycleReport:
    """Latency, throughput and arithmetic-rate figures for one engine."""

    n: int
    rows: int
    l_but: int
    t_clk: float
    l_fft_cycles: int
    t_fft_cycles: int

    @property
    def l_fft_seconds(self) -> float:
        return self.l_fft_cycles * self.t_clk

    @property
    def t_fft_seconds(self) -> float:
        return self.t_fft_cycles * self.t_clk

    @property
    def bandwidth_bytes_per_s(self) -> float:
        """Sustained I/O rate: 2R complex words in plus out per clock."""
        return 4.0 * WORD_BYTES * self.rows / self.t_clk

    @property
    def bandwidth_gib_per_s(self) -> float:
        return self.bandwidth_bytes_per_s / 2.0**30

    @property
    def flops_per_s(self) -> float:
        return FLOPS_PER_BUTTERFLY * self.rows * (self.n.bit_length() - 1) / self.t_clk

    @property
    def gflops(self) -> float:
        return self.flops_per_s / 1.0e9


def engine_metrics(config: EngineConfig) -> CycleReport:
    """Closed-form report for a config, no simulation involved."""
    l_fft = latency_cycles(config)
    return CycleReport(
        n=config.n,
        rows=config.rows,
        l_but=config.l_but,
        t_clk=config.t_clk,
        l_fft_cycles=l_fft,
        t_fft_cycles=l_fft + config.burst_cycles,
    )


# ---------------------------------------------------------------------------
# butterfly


def butterfly(x_top: complex, x_bot: complex, w: complex) -> tuple[complex, complex]:
    """One DIF butterfly: the top output is the sum, the bottom the twiddled
    difference."""
    return x_top + x_bot, (x_top - x_bot) * w


@dataclass(frozen=True)
class ButterflyTrace:
    """Every operator value of one butterfly evaluation.

    Stage A is four add/subtracts, stage B four real multiplies, stage C the
    final subtract and add; a1/a3 pass straight through to the top output.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    b1: float
    b2: float
    b3: float
    b4: float
    c1: float
    c2: float
    top: complex
    bottom: complex


def butterfly_trace(x_top: complex, x_bot: complex, w: complex) -> ButterflyTrace:
    a1 = x_top.real + x_bot.real
    a2 = x_top.real - x_bot.real
    a3 = x_top.imag + x_bot.imag
    a4 = x_top.imag - x_bot.imag
    b1 = a2 * w.real
    b2 = a4 * w.imag
    b3 = a2 * w.imag
    b4 = a4 * w.real
    c1 = b1 - b2
    c2 = b3 + b4
    return ButterflyTrace(
        a1, a2, a3, a4, b1, b2, b3, b4, c1, c2, complex(a1, a3), complex(c1, c2)
    )


# ---------------------------------------------------------------------------
# stream reordering


class DataShuffler:
    """Two-lane reorder element made of two length-L registers and a crossbar.

    The bottom input passes through its register before the crossbar and the
    top output passes through its register after it; the crossbar swaps
    lanes whenever the high bit of a modulo-2L beat counter is set. With a
    registered output the element delays the stream by L + 1 cycles while
    turning elements 2L beats apart into same-cycle (top, bottom) pairs.

    The beat counter only advances on valid input, which pins its phase to
    the first word of a burst; idle cycles just drain the registers.
    """

    def __init__(self, length: int):
        if length < 1:
            raise ValueError(f"shuffler length must be at least 1, got {length}")
        self.length = length
        self._pre = deque([None] * length)
        self._post = deque([None] * length)
        self._out = (None, None)
        self._beat = 0

    @property
    def delay(self) -> int:
        return self.length + 1

    @property
    def storage_words(self) -> int:
        return 2 * self.length

    def step(self, top, bottom):
        """Advance one clock; returns the (top, bottom) pair leaving the element."""
        delayed = self._pre.popleft()
        self._pre.append(bottom)
        swap = self._beat >= self.length
        if top is not None:
            self._beat = (self._beat + 1) % (2 * self.length)
        cross_top, cross_bottom = (delayed, top) if swap else (top, delayed)
        aged = self._post.popleft()
        self._post.append(cross_top)
        emitted = self._out
        self._out = (aged, cross_bottom)
        return emitted


def data_shuffle(stream_top, stream_bottom, length: int):
    """Push two equal-length streams through one shuffler and drain it.

    None marks an idle cycle. The returned streams are length + 1 entries
    longer than the inputs so everything in flight comes out.
    """
    if len(stream_top) != len(stream_bottom):
        raise ValueError("input streams must have equal length")
    element = DataShuffler(length)
    out_top: list = []
    out_bottom: list = []
    for top, bottom in zip(stream_top, stream_bottom):
        t, b = element.step(top, bottom)
        out_top.append(t)
        out_bottom.append(b)
    for _ in range(element.delay):
        t, b = element.step(None, None)
        out_top.append(t)
        out_bottom.append(b)
    return out_top, out_bottom


# ---------------------------------------------------------------------------
# engine internals


class _DelayLine:
    """Fixed whole-vector delay; models a pipeline of registers."""

    def __init__(self, delay: int):
        self._q = deque([None] * delay)

    def step(self, item):
        self._q.append(item)
        return self._q.popleft()


class _ShuffleBoundary:
    """One shuffler per row, each owning two adjacent lanes."""

    def __init__(self, rows: int, length: int):
        self.length = length
        self._elements = [DataShuffler(length) for _ in range(rows)]

    def step(self, vec):
        out = []
        any_valid = False
        for r, element in enumerate(self._elements):
            top_in = vec[2 * r] if vec is not None else None
            bot_in = vec[2 * r + 1] if vec is not None else None
            top, bottom = element.step(top_in, bot_in)
            if top is not None:
                any_valid = True
            out.append(top)
            out.append(bottom)
        return out if any_valid else None


@lru_cache(maxsize=None)
def _twiddle_table(n: int) -> tuple[complex, ...]:
    """W_N^k for k in [0, N/2), one per-index evaluation each."""
    return tuple(twiddle(k, n) for k in range(n // 2))


@lru_cache(maxsize=None)
def bit_reversed_indices(n: int) -> tuple[int, ...]:
    bits = n.bit_length() - 1
    return tuple(int(f"{i:0{bits}b}"[::-1], 2) for i in range(n))


def _lane_pairs(stage: int, rows: int) -> list[tuple[int, int]]:
    """Lanes feeding butterfly r at a given stage (1-indexed).

    Early stages pair across lanes at distance 2R/2^s; once that distance
    reaches zero the stage works on each row's own lane pair.
    """
    distance = (2 * rows) >> stage
    if distance >= 1:
        return [
            ((r // distance) * 2 * distance + r % distance,
             (r // distance) * 2 * distance + r % distance + distance)
            for r in range(rows)
        ]
    return [(2 * r, 2 * r + 1) for r in range(rows)]


class FftEngine:
    """Cycle-level model of one R-row streaming pipeline instance."""

    def __init__(self, config: EngineConfig):
        self.config = config
        s_count = config.stages
        self._pairs = [_lane_pairs(s, config.rows) for s in range(1, s_count + 1)]
        # boundary after stage s (1..S-1): spatial register or shuffler bank
        self._boundary_plan: list[tuple[str, int]] = []
        for s in range(1, s_count):
            if (2 * config.rows) >> (s + 1) >= 1:
                self._boundary_plan.append(("cross", 1))
            else:
                self._boundary_plan.append(("shuffle", config.n >> (s + 1)))
        self._rom: list[list[list[complex]]] = [
            [[] for _ in range(config.rows)] for _ in range(s_count)
        ]
        # every shuffle boundary holds one element per row
        self.storage_words = config.rows * sum(
            2 * length for kind, length in self._boundary_plan if kind == "shuffle"
        )
        report = self._simulate(None)
        self.measured_latency_cycles = report.l_fft_cycles
        self.measured_total_cycles = report.t_fft_cycles

    # -- public ------------------------------------------------------------

    def run(self, x) -> tuple[np.ndarray, CycleReport]:
        """Stream one block through the pipeline.

        Returns the natural-order spectrum and the cycle report measured on
        this very run (not the closed form).
        """
        a = np.asarray(x, dtype=np.complex128)
        if a.shape != (self.config.n,):
            raise ValueError(f"expected {self.config.n} input words, got shape {a.shape}")
        # plain complex scalars keep the per-cycle loop off numpy's slow path
        return self._simulate(a.tolist())

    def metrics(self) -> CycleReport:
        return engine_metrics(self.config)

    def twiddle_rom(self, stage: int, row: int) -> tuple[complex, ...]:
        """ROM contents for one butterfly, addressed by pipeline step."""
        return tuple(self._rom[stage - 1][row])

    @property
    def interconnect(self) -> tuple[tuple[str, int], ...]:
        """Boundary elements between stages: ("cross", 1) or ("shuffle", L)."""
        return tuple(self._boundary_plan)

    @property
    def shufflers(self) -> tuple[ShufflerSpec, ...]:
        """The reorder elements of one row chain, in stage order."""
        return tuple(
            ShufflerSpec(stage=s, length=length)
            for s, (kind, length) in enumerate(self._boundary_plan, start=1)
            if kind == "shuffle"
        )

    # -- simulation core -----------------------------------------------------

    def _simulate(self, data) -> tuple[np.ndarray, CycleReport] | CycleReport:
        """Run the pipeline cycle by cycle.

        With data=None this is the construction dry run: slots carry flow
        graph tags only, the wiring of every butterfly is checked against
        the decimation pattern, and the twiddle ROMs are filled. With data
        present the ROMs are consumed instead.
        """
        cfg = self.config
        n, rows, lanes = cfg.n, cfg.rows, cfg.lanes
        burst = cfg.burst_cycles
        s_count = cfg.stages
        dry = data is None
        table = _twiddle_table(n) if dry else None

        pipes = [_DelayLine(cfg.l_but) for _ in range(s_count)]
        boundaries = [
            _DelayLine(1) if kind == "cross" else _ShuffleBoundary(rows, length)
            for kind, length in self._boundary_plan
        ]
        out_reg = _DelayLine(1)
        steps = [[0] * rows for _ in range(s_count)]

        spectrum = np.empty(n, dtype=np.complex128) if not dry else None
        rev = bit_reversed_indices(n)
        collected = 0
        first_out = -1
        last_out = -1
        deadline = latency_cycles(cfg) + burst + 8  # wiring bug tripwire

        for cycle in range(deadline):
            if cycle < burst:
                vec = [(cycle + j * burst, None if dry else data[cycle + j * burst])
                       for j in range(lanes)]
            else:
                vec = None

            for s in range(s_count):
                if vec is not None:
                    sub = n >> s          # sub-transform size at stage s+1
                    half = sub >> 1
                    new = [None] * lanes
                    rom_s = self._rom[s]
                    steps_s = steps[s]
                    for r, (top_lane, bot_lane) in enumerate(self._pairs[s]):
                        top_tag, top_val = vec[top_lane]
                        bot_tag, bot_val = vec[bot_lane]
                        step = steps_s[r]
                        steps_s[r] = step + 1
                        if dry:
                            m = top_tag % sub
                            if m >= half or bot_tag != top_tag + half:
                                raise RuntimeError(
                                    f"stage {s + 1} butterfly {r} wired to tags "
                                    f"({top_tag}, {bot_tag}), breaking the "
                                    f"decimation pattern"
                                )
                            rom_s[r].append(table[m << s])
                            new[top_lane] = (top_tag, None)
                            new[bot_lane] = (bot_tag, None)
                        else:
                            w = rom_s[r][step % burst]
                            new[top_lane] = (top_tag, top_val + bot_val)
                            new[bot_lane] = (bot_tag, (top_val - bot_val) * w)
                    vec = new
                vec = pipes[s].step(vec)
                if s < s_count - 1:
                    vec = boundaries[s].step(vec)

            vec = out_reg.step(vec)
            if vec is not None:
                if first_out < 0:
                    first_out = cycle
                last_out = cycle
                if not dry:
                    for tag, val in vec:
                        spectrum[rev[tag]] = val
                collected += lanes

        if collected != n:
            raise RuntimeError(
                f"pipeline drained {collected} of {n} words; wiring is inconsistent"
            )
        report = CycleReport(
            n=n,
            rows=rows,
            l_but=cfg.l_but,
            t_clk=cfg.t_clk,
            l_fft_cycles=first_out,
            t_fft_cycles=last_out + 1,
        )
        if dry:
            return report
        return spectrum, report


def fft_engine_run(x, config: EngineConfig) -> tuple[np.ndarray, CycleReport]:
    """Build an engine for config and stream one block through it.

    One-shot convenience; hold an FftEngine instance instead when
    transforming many blocks of the same shape.
    """
    return FftEngine(config).run(x)


# ---------------------------------------------------------------------------
# functional fast path


def fft_radix2(data, inverse: bool = False, axis: int = -1) -> np.ndarray:
    """Vectorized radix-2 DIF transform along one axis, natural-order output.

    Runs the same butterfly network with the same twiddle table as the
    cycle-level engine, for callers that need transform results without
    per-cycle accounting. Supports batches: every 1-D slice along `axis` is
    transformed independently.
    """
    a = np.array(data, dtype=np.complex128, copy=True)
    moved = np.moveaxis(a, axis, -1)
    n = moved.shape[-1]
    if n < 2 or not is_power_of_two(n):
        raise ValueError(f"transform length must be a power of two >= 2, got {n}")
    table = np.asarray(_twiddle_table(n), dtype=np.complex128)
    if inverse:
        table = np.conj(table)
    # moveaxis gives a view; the stage loop below relies on reshape being a
    # view as well, which only holds for a contiguous buffer.
    flat = np.ascontiguousarray(moved).reshape(-1, n)
    size = n
    while size >= 2:
        half = size // 2
        blocks = flat.reshape(-1, size)
        w = table[:: n // size][:half]
        top = blocks[:, :half] + blocks[:, half:]
        bottom = (blocks[:, :half] - blocks[:, half:]) * w
        blocks[:, :half] = top
        blocks[:, half:] = bottom
        size = half
    flat = flat[:, list(bit_reversed_indices(n))]
    if inverse:
        flat /= n
    out = flat.reshape(moved.shape)
    return np.moveaxis(out, -1, axis)
