"""Batch front-end: verification suites, prediction tables, simulations.

Three working commands plus one input generator:

* verify    runs the oracle and fixture suites and prints one
            [PASS]/[FAIL] line per check;
* predict   writes the calculation-time grids, machine comparisons and
            network bandwidth curves as delimited files (and figures);
* simulate  runs the distributed transform on a grid file, writing the
            spectrum, the communication ledger and optionally a capture
            file of every frame of a wire-format run;
* make-grid writes input grid files for simulate.

Options come from flags or from a flat key=value config file; flags win.
Exit status is 0 when everything passed, 1 when a verification check or
oracle comparison failed, 2 for unusable configuration.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import run_distributed_3dfft, run_distributed_inverse
from .engine import EngineConfig, FftEngine, engine_metrics, latency_cycles
from .frames import DatapathConfig, LoopbackTransport
from .gridio import read_grid, write_grid
from .numerics import dft_1d, dft_3d, relative_spectrum_error
from .pencil import PencilGrid
from .perf import (
    CalcTimeTable,
    architecture_comparison,
    network_bandwidth,
    predict_table,
)
from .reference_tables import (
    CALC_TIME_GRID,
    CALC_TIME_MU_VALUES,
    CALC_TIME_N_VALUES,
    CALC_TIME_P_VALUES,
    CALC_TIME_WHITELIST,
    ENGINE_TABLE,
    GFLOPS_MISMATCHES,
)

__all__ = ["ExperimentConfig", "main"]

_ORACLE_N_CAP = 32  # dft_3d is O(N^4); larger volumes take minutes


class UsageError(Exception):
    """Configuration that cannot be run; maps to exit status 2."""


@dataclass
class ExperimentConfig:
    """Everything one command invocation depends on."""

    command: str
    n: int = 512
    rows: int = 4
    l_op: int = 6
    f_mhz: float = 180.0
    p_u: int = 1
    p_v: int = 1
    mu: tuple[int, ...] = (1, 3)
    arch: str = "pipelined_streaming"
    k: int = 1
    topology: str = "both"
    device_bytes: int = 8 * 2**30
    seed: int = 0
    tolerance: float = 1.0e-9
    suite: str = "all"
    rate: str = "100G"
    width_bits: int | None = None
    out_dir: str = "."
    fmt: str = "csv"
    grid_path: str | None = None
    out_path: str | None = None
    kind: str = "random"
    components: int = 1
    complex_words: bool = False
    wire: bool = False
    check_oracle: bool = False
    inverse: bool = False
    figures: bool = True
    explicit: frozenset = frozenset()  # keys set by flag or file, not default

    def engine_config(self) -> EngineConfig:
        return EngineConfig.from_operator_latency(self.n, self.rows, self.l_op, self.f_mhz)

    def datapath(self) -> DatapathConfig:
        return DatapathConfig.for_rate(self.rate, self.width_bits)


_BOOL_WORDS = {"1": True, "true": True, "yes": True, "0": False, "false": False, "no": False}


def _read_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = body.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _coerce(name: str, text: str, kind) -> object:
    try:
        if kind is bool:
            flag = _BOOL_WORDS.get(text.lower())
            if flag is None:
                raise ValueError(f"not a boolean: {text!r}")
            return flag
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
        if kind == "mu":
            return tuple(int(part) for part in text.replace(",", " ").split())
        return text
    except ValueError as err:
        raise UsageError(f"config value {name} = {text!r}: {err}") from None


_FIELD_KINDS = {
    "n": int, "rows": int, "l_op": int, "f_mhz": float, "p_u": int, "p_v": int,
    "mu": "mu", "arch": str, "k": int, "topology": str, "device_bytes": int,
    "seed": int, "tolerance": float, "suite": str, "rate": str, "width_bits": int,
    "out_dir": str, "fmt": str, "grid_path": str, "out_path": str, "kind": str,
    "components": int, "complex_words": bool, "wire": bool, "check_oracle": bool,
    "inverse": bool, "figures": bool,
}

# config files accept the flag spellings too
_FIELD_ALIASES = {
    "r": "rows", "f": "f_mhz", "pu": "p_u", "pv": "p_v", "format": "fmt",
    "grid": "grid_path", "out": "out_path", "complex": "complex_words",
}


def _merge_config(args: argparse.Namespace) -> ExperimentConfig:
    """Build the config: flag beats file beats default."""
    raw_values = _read_config_file(args.config) if args.config else {}
    file_values: dict[str, str] = {}
    for key, value in raw_values.items():
        name = _FIELD_ALIASES.get(key, key)
        if name not in _FIELD_KINDS:
            raise UsageError(f"unknown config key {key!r}")
        file_values[name] = value
    merged: dict[str, object] = {"command": args.command}
    for name, kind in _FIELD_KINDS.items():
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            merged[name] = flag_value
        elif name in file_values:
            merged[name] = _coerce(name, file_values[name], kind)
    config = ExperimentConfig(**merged)
    config.explicit = frozenset(merged) - {"command"}
    _validate(config)
    return config


def _validate(config: ExperimentConfig) -> None:
    """Run every downstream constructor that can reject the configuration."""
    try:
        if config.command == "verify":
            if config.suite not in ("fft", "tables", "dist", "all"):
                raise ValueError(f"suite must be fft, tables, dist or all, got {config.suite!r}")
            if config.suite in ("fft", "all"):
                config.engine_config()
            if config.suite in ("dist", "all"):
                _dist_grid(config)
        if config.command == "predict":
            if config.topology not in ("switched", "torus", "both"):
                raise ValueError(
                    f"topology must be switched, torus or both, got {config.topology!r}"
                )
            if config.fmt not in ("csv", "md"):
                raise ValueError(f"format must be csv or md, got {config.fmt!r}")
            if not config.mu or any(m < 1 for m in config.mu):
                raise ValueError(f"mu values must be positive, got {config.mu}")
        if config.command == "simulate":
            if config.grid_path is None:
                raise ValueError("simulate needs --grid")
            config.datapath()
        if config.command == "make-grid":
            if config.out_path is None:
                raise ValueError("make-grid needs --out")
            if config.kind not in ("delta", "constant", "random"):
                raise ValueError(f"kind must be delta, constant or random, got {config.kind!r}")
            if config.components < 1:
                raise ValueError(f"components must be positive, got {config.components}")
    except ValueError as err:
        raise UsageError(str(err)) from None


# ---------------------------------------------------------------------------
# verify


class _Checks:
    """Collects [PASS]/[FAIL] lines and the overall verdict."""

    def __init__(self, out) -> None:
        self.out = out
        self.failures = 0
        self.count = 0

    def record(self, ok: bool, text: str) -> None:
        self.count += 1
        if not ok:
            self.failures += 1
        print(f"[{'PASS' if ok else 'FAIL'}] {text}", file=self.out)


def _verify_fft(config: ExperimentConfig, checks: _Checks) -> None:
    cfg = config.engine_config()
    rng = np.random.default_rng(config.seed)
    x = rng.standard_normal(cfg.n) + 1j * rng.standard_normal(cfg.n)
    engine = FftEngine(cfg)
    spectrum, report = engine.run(x)
    err = relative_spectrum_error(spectrum, dft_1d(x), x)
    checks.record(
        err < config.tolerance,
        f"fft oracle n={cfg.n} r={cfg.rows} l_op={config.l_op}: "
        f"max relative error {err:.3e} (tolerance {config.tolerance:.0e})",
    )
    expected = latency_cycles(cfg)
    checks.record(
        report.l_fft_cycles == expected,
        f"fft latency n={cfg.n} r={cfg.rows}: measured {report.l_fft_cycles} "
        f"cycles, closed form {expected}",
    )


def _trunc(value: float, decimals: int) -> float:
    scale = 10.0**decimals
    return math.floor(value * scale) / scale


def _printed_decimals(value: float) -> int:
    text = repr(value)
    return len(text.split(".")[1]) if "." in text else 0


def _verify_engine_table(checks: _Checks) -> None:
    for row in ENGINE_TABLE:
        cfg = EngineConfig.from_operator_latency(row.n, row.rows, row.l_op, row.f_max_mhz)
        m = engine_metrics(cfg)
        delta = m.l_fft_cycles - row.l_fft_cycles
        cycle_ok = abs(delta) <= 1
        # the published microsecond columns follow the published cycles
        l_us_ok = round(row.l_fft_cycles / row.f_max_mhz, 2) == row.l_fft_us
        t_us_ok = (
            round((row.l_fft_cycles + row.n // (2 * row.rows)) / row.f_max_mhz, 2)
            == row.t_fft_us
        )
        ours_t_us = m.t_fft_cycles / row.f_max_mhz
        t_near_ok = abs(ours_t_us - row.t_fft_us) <= 1.0 / row.f_max_mhz + 0.005
        b_ok = round(m.bandwidth_gib_per_s, 2) == row.b_fft_gib
        key = (row.rows, row.l_op, row.n)
        if key in GFLOPS_MISMATCHES:
            g_ok = row.gflops == GFLOPS_MISMATCHES[key]
            g_note = f"GF published {row.gflops} (known outlier, model {m.gflops:.2f})"
        else:
            g_ok = round(m.gflops, 2) == row.gflops
            g_note = f"GF {m.gflops:.2f} vs {row.gflops}"
        ok = cycle_ok and l_us_ok and t_us_ok and t_near_ok and b_ok and g_ok
        checks.record(
            ok,
            f"engine table r={row.rows} l_op={row.l_op} n={row.n}: cycles "
            f"{m.l_fft_cycles} vs {row.l_fft_cycles} (|d|={abs(delta)}), "
            f"B {m.bandwidth_gib_per_s:.2f} vs {row.b_fft_gib}, {g_note}",
        )


def _calc_cell_matches(computed: float, printed: float) -> bool:
    if abs(computed - printed) <= 0.05 * printed:
        return True
    decimals = _printed_decimals(printed)
    return round(computed, decimals) == printed or _trunc(computed, decimals) == printed


def _verify_calc_grid(checks: _Checks) -> None:
    for mu in CALC_TIME_MU_VALUES:
        table = predict_table(mu)
        for n in CALC_TIME_N_VALUES:
            printed_row = CALC_TIME_GRID[(mu, n)]
            for p, printed in zip(CALC_TIME_P_VALUES, printed_row):
                computed = table.cell(n, p)
                if printed is None or computed is None:
                    ok = printed is None and computed is None
                    checks.record(
                        ok,
                        f"calc grid mu={mu} n={n} p={p}: "
                        + ("masked on both sides" if ok else
                           f"mask disagrees (model {computed}, published {printed})"),
                    )
                    continue
                if (mu, n, p) in CALC_TIME_WHITELIST:
                    ok = printed == CALC_TIME_WHITELIST[(mu, n, p)]
                    checks.record(
                        ok,
                        f"calc grid mu={mu} n={n} p={p}: published {printed} is a "
                        f"known outlier (model {computed:.5g})",
                    )
                    continue
                ok = _calc_cell_matches(computed, printed)
                checks.record(
                    ok,
                    f"calc grid mu={mu} n={n} p={p}: {computed:.5g} vs {printed}",
                )


def _dist_grid(config: ExperimentConfig) -> PencilGrid:
    """Distributed-suite geometry: n=16 on a 2x2 grid unless overridden."""
    n = config.n if "n" in config.explicit else 16
    p_u = config.p_u if "p_u" in config.explicit else 2
    p_v = config.p_v if "p_v" in config.explicit else 2
    if n > _ORACLE_N_CAP:
        raise UsageError(
            f"the dist suite checks against the O(N^4) oracle; use n <= "
            f"{_ORACLE_N_CAP}, or --suite fft for large engine runs"
        )
    return PencilGrid(n=n, p_u=p_u, p_v=p_v)


def _verify_dist(config: ExperimentConfig, checks: _Checks) -> None:
    grid = _dist_grid(config)
    rng = np.random.default_rng(config.seed)
    field = rng.standard_normal((grid.n,) * 3)
    spectrum, _ = run_distributed_3dfft(field, grid)
    err = relative_spectrum_error(spectrum, dft_3d(field), field)
    checks.record(
        err < config.tolerance,
        f"distributed 3d n={grid.n} grid {grid.p_u}x{grid.p_v}: "
        f"max relative error {err:.3e} (tolerance {config.tolerance:.0e})",
    )
    back, _ = run_distributed_inverse(spectrum, grid)
    round_err = float(np.max(np.abs(back - field))) / float(np.linalg.norm(field.ravel()))
    checks.record(
        round_err < config.tolerance,
        f"distributed inverse n={grid.n} grid {grid.p_u}x{grid.p_v}: "
        f"round-trip error {round_err:.3e} (tolerance {config.tolerance:.0e})",
    )


def cmd_verify(config: ExperimentConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    checks = _Checks(out)
    if config.suite in ("fft", "all"):
        _verify_fft(config, checks)
    if config.suite in ("tables", "all"):
        _verify_engine_table(checks)
        _verify_calc_grid(checks)
    if config.suite in ("dist", "all"):
        _verify_dist(config, checks)
    print(
        f"{checks.count - checks.failures} of {checks.count} checks passed",
        file=out,
    )
    return 1 if checks.failures else 0


# ---------------------------------------------------------------------------
# predict


def _comparison_csv(mu: int) -> str:
    lines = ["table,label,time_units,bandwidth_units,ram_units,engines,host_dma,local_dma,net_controllers"]
    for name, rows in (
        ("k1", architecture_comparison(mu, k=1)),
        ("q4", architecture_comparison(mu, fixed_q=4)),
    ):
        for r in rows:
            lines.append(
                f"{name},{r.label},{r.time_units!r},{r.bandwidth_units!r},"
                f"{r.ram_units!r},{r.engines},{r.host_dma},{r.local_dma},"
                f"{r.net_controllers}"
            )
    return "\n".join(lines) + "\n"


def _comparison_md(mu: int) -> str:
    lines = [
        "| table | label | time_units | bandwidth_units | ram_units | engines | host_dma | local_dma | net_controllers |",
        "|---|---|---|---|---|---|---|---|---|",
    ]
    for name, rows in (
        ("k1", architecture_comparison(mu, k=1)),
        ("q4", architecture_comparison(mu, fixed_q=4)),
    ):
        for r in rows:
            lines.append(
                f"| {name} | {r.label} | {r.time_units!r} | {r.bandwidth_units!r} "
                f"| {r.ram_units!r} | {r.engines} | {r.host_dma} | {r.local_dma} "
                f"| {r.net_controllers} |"
            )
    return "\n".join(lines) + "\n"


def _network_rows(config: ExperimentConfig) -> list[tuple[int, int, float | None, float | None]]:
    t_clk = 1.0 / (config.f_mhz * 1.0e6)
    rows = []
    for side in (2, 4, 8, 16, 32, 64):
        p = side * side
        switched = (
            network_bandwidth("switched", p, config.rows, t_clk)
            if config.topology in ("switched", "both")
            else None
        )
        torus = (
            network_bandwidth("torus", p, config.rows, t_clk)
            if config.topology in ("torus", "both")
            else None
        )
        rows.append((p, side, switched, torus))
    return rows


def _network_csv(rows) -> str:
    lines = ["p,sqrt_p,switched_bytes_per_s,torus_bytes_per_s"]
    for p, side, switched, torus in rows:
        s = "" if switched is None else repr(switched)
        t = "" if torus is None else repr(torus)
        lines.append(f"{p},{side},{s},{t}")
    return "\n".join(lines) + "\n"


def _network_md(rows) -> str:
    lines = [
        "| p | sqrt_p | switched_bytes_per_s | torus_bytes_per_s |",
        "|---|---|---|---|",
    ]
    for p, side, switched, torus in rows:
        s = "" if switched is None else repr(switched)
        t = "" if torus is None else repr(torus)
        lines.append(f"| {p} | {side} | {s} | {t} |")
    return "\n".join(lines) + "\n"


def _render_figures(out_dir: Path, tables: list[CalcTimeTable], net_rows) -> list[Path]:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    for table in tables:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for n, row in zip(table.n_values, table.cells):
            points = [(p, c) for p, c in zip(table.p_values, row) if c is not None]
            if points:
                ax.plot(*zip(*points), marker="o", label=f"N={n}")
        ax.set_xscale("log", base=2)
        ax.set_yscale("log")
        ax.set_xlabel("nodes P")
        ax.set_ylabel("calculation time [s]")
        ax.set_title(f"Predicted calculation time, mu={table.mu}")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize="small")
        path = out_dir / f"calc_time_mu{table.mu}.png"
        fig.savefig(path, dpi=120, bbox_inches="tight")
        plt.close(fig)
        written.append(path)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    sides = [side for _, side, _, _ in net_rows]
    switched = [s for _, _, s, _ in net_rows]
    torus = [t for _, _, _, t in net_rows]
    if any(s is not None for s in switched):
        ax.plot(sides, [s * 8e-9 for s in switched], marker="o", label="switched")
    if any(t is not None for t in torus):
        ax.plot(sides, [t * 8e-9 for t in torus], marker="s", label="torus")
    ax.set_xlabel("sqrt(P)")
    ax.set_ylabel("required bandwidth [Gb/s]")
    ax.set_title("Per-node network bandwidth")
    ax.grid(True, alpha=0.3)
    ax.legend()
    path = out_dir / "network_bandwidth.png"
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    written.append(path)
    return written


def cmd_predict(config: ExperimentConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = config.fmt
    t_clk = 1.0 / (config.f_mhz * 1.0e6)
    written: list[Path] = []

    tables = []
    for mu in config.mu:
        table = predict_table(
            mu,
            rows=config.rows,
            k=config.k,
            t_clk=t_clk,
            device_bytes=config.device_bytes,
        )
        tables.append(table)
        path = out_dir / f"calc_time_mu{mu}.{ext}"
        path.write_text(table.to_csv() if ext == "csv" else table.to_markdown())
        written.append(path)

        path = out_dir / f"comparison_mu{mu}.{ext}"
        path.write_text(_comparison_csv(mu) if ext == "csv" else _comparison_md(mu))
        written.append(path)

    net_rows = _network_rows(config)
    path = out_dir / f"network_bandwidth.{ext}"
    path.write_text(_network_csv(net_rows) if ext == "csv" else _network_md(net_rows))
    written.append(path)

    if config.figures:
        written.extend(_render_figures(out_dir, tables, net_rows))

    for path in written:
        print(f"wrote {path}", file=out)
    return 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(config: ExperimentConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        volume = read_grid(config.grid_path)
    except (OSError, ValueError) as err:
        raise UsageError(f"cannot read {config.grid_path}: {err}") from None
    mu, n = volume.shape[0], volume.shape[1]
    try:
        grid = PencilGrid(n=n, p_u=config.p_u, p_v=config.p_v)
    except ValueError as err:
        raise UsageError(str(err)) from None

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    transport = LoopbackTransport(config.datapath()) if config.wire else None

    is_complex = np.iscomplexobj(volume)
    if config.inverse and not is_complex:
        raise UsageError("inverse needs a complex spectrum file")
    if not config.inverse and is_complex:
        raise UsageError("forward input must be real (use make-grid without complex)")

    results = np.empty((mu, n, n, n), dtype=np.complex128)
    ledger_lines = ["component,phase,src_u,src_v,dst_u,dst_v,bytes"]
    failures = 0
    for ci in range(mu):
        try:
            if config.inverse:
                result, ledger = run_distributed_inverse(volume[ci], grid, transport)
            else:
                result, ledger = run_distributed_3dfft(volume[ci], grid, transport)
        except ValueError as err:
            raise UsageError(str(err)) from None
        results[ci] = result
        for m in ledger.messages:
            ledger_lines.append(
                f"{ci},{m.phase},{m.src[0]},{m.src[1]},{m.dst[0]},{m.dst[1]},{m.nbytes}"
            )
        if config.check_oracle:
            if n > _ORACLE_N_CAP:
                raise UsageError(
                    f"--check-oracle runs the O(N^4) oracle; use n <= {_ORACLE_N_CAP}"
                )
            reference = dft_3d(volume[ci], inverse=config.inverse)
            err = relative_spectrum_error(result, reference, volume[ci])
            ok = err < config.tolerance
            failures += 0 if ok else 1
            print(
                f"[{'PASS' if ok else 'FAIL'}] component {ci}: max relative error "
                f"{err:.3e} (tolerance {config.tolerance:.0e})",
                file=out,
            )

    spectrum_path = out_dir / ("volume.grid" if config.inverse else "spectrum.grid")
    write_grid(spectrum_path, results)
    print(f"wrote {spectrum_path}", file=out)

    ledger_path = out_dir / "ledger.csv"
    ledger_path.write_text("\n".join(ledger_lines) + "\n")
    print(f"wrote {ledger_path}", file=out)

    if transport is not None:
        pcap_path = out_dir / "frames.pcap"
        count = transport.write_pcap(pcap_path)
        print(f"wrote {pcap_path} ({count} frames)", file=out)

    return 1 if failures else 0


def cmd_make_grid(config: ExperimentConfig, out=None) -> int:
    out = sys.stdout if out is None else out
    n = config.n
    shape = (config.components, n, n, n)
    if config.kind == "delta":
        field = np.zeros(shape)
        field[:, 0, 0, 0] = 1.0
    elif config.kind == "constant":
        field = np.ones(shape)
    else:
        rng = np.random.default_rng(config.seed)
        field = rng.standard_normal(shape)
    if config.complex_words:
        field = field.astype(np.complex128)
    write_grid(config.out_path, field)
    print(f"wrote {config.out_path}", file=out)
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipefft",
        description="Streaming FFT machine models: verify, predict, simulate.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="flat key=value file; flags win")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", dest="out_dir", default=None)

    p = sub.add_parser("verify", help="run oracle and fixture suites")
    add_common(p)
    p.add_argument("--suite", choices=("fft", "tables", "dist", "all"), default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--r", dest="rows", type=int, default=None)
    p.add_argument("--l-op", dest="l_op", type=int, default=None)
    p.add_argument("--f", dest="f_mhz", type=float, default=None)
    p.add_argument("--pu", dest="p_u", type=int, default=None)
    p.add_argument("--pv", dest="p_v", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)

    p = sub.add_parser("predict", help="write prediction tables and curves")
    add_common(p)
    p.add_argument("--mu", type=int, action="append", default=None)
    p.add_argument("--r", dest="rows", type=int, default=None)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--f", dest="f_mhz", type=float, default=None)
    p.add_argument("--topology", choices=("switched", "torus", "both"), default=None)
    p.add_argument("--device-bytes", dest="device_bytes", type=int, default=None)
    p.add_argument("--format", dest="fmt", choices=("csv", "md"), default=None)
    p.add_argument(
        "--no-figures", dest="figures", action="store_false", default=None,
        help="skip the rendered figures, write only the delimited tables",
    )

    p = sub.add_parser("simulate", help="run the distributed transform on a grid file")
    add_common(p)
    p.add_argument("--grid", dest="grid_path", default=None)
    p.add_argument("--pu", dest="p_u", type=int, default=None)
    p.add_argument("--pv", dest="p_v", type=int, default=None)
    p.add_argument("--inverse", action="store_true", default=None)
    p.add_argument("--wire", action="store_true", default=None,
                   help="route every transfer through the frame codec, write a capture file")
    p.add_argument("--rate", choices=("1G", "10G", "40G", "100G"), default=None)
    p.add_argument("--width-bits", dest="width_bits", type=int, default=None)
    p.add_argument("--check-oracle", dest="check_oracle", action="store_true", default=None)
    p.add_argument("--tolerance", type=float, default=None)

    p = sub.add_parser("make-grid", help="write an input grid file")
    add_common(p)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--components", type=int, default=None,
                   help="field components to generate (the grid file's mu)")
    p.add_argument("--kind", choices=("delta", "constant", "random"), default=None)
    p.add_argument("--complex", dest="complex_words", action="store_true", default=None)
    p.add_argument("--out", dest="out_path", default=None)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if getattr(args, "mu", None) is not None:
        args.mu = tuple(args.mu)
    try:
        config = _merge_config(args)
        handler = {
            "verify": cmd_verify,
            "predict": cmd_predict,
            "simulate": cmd_simulate,
            "make-grid": cmd_make_grid,
        }[config.command]
        return handler(config)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
