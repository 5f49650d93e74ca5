"""Cycle-accounting models of a multi-FPGA 3D FFT machine.

The package splits along the machine's own seams:

* :mod:`pipefft.numerics`  brute-force transform oracles and spectrum helpers;
* :mod:`pipefft.engine`    the parallel-pipelined radix-2 engine, its butterfly
  datapath, reorder buffers and cycle/latency accounting;
* :mod:`pipefft.pencil`    2D pencil decomposition of the volume across P nodes
  and the transpose communication volumes it implies;
* :mod:`pipefft.cluster`   a deterministic distributed 3D transform over the
  pencil layout with a per-message communication ledger;
* :mod:`pipefft.perf`      sequential/pipelined/parallel node models, machine
  comparisons, network bandwidth and the calculation-time grid;
* :mod:`pipefft.frames`    UDP/IPv4/ARP frame codec, datapath word formats,
  ARP cache and a capture-file writer for wire-format runs;
* :mod:`pipefft.gridio`    the binary grid file format the CLI reads and writes;
* :mod:`pipefft.reference_tables`  published measurement and prediction figures
  the verification suites check against.

``pipefft.cli`` ties these together as the ``pipefft`` command.
"""

from .cluster import CommLedger, run_distributed_3dfft, run_distributed_inverse
from .engine import (
    DataShuffler,
    EngineConfig,
    FftEngine,
    ShufflerSpec,
    butterfly,
    data_shuffle,
    engine_metrics,
    fft_engine_run,
    fft_radix2,
    latency_cycles,
)
from .frames import (
    ArpCache,
    DatapathConfig,
    FrameHeaders,
    LoopbackTransport,
    decode_frame,
    encode_frame,
    frame_bytes,
    udp_frame,
    write_pcap,
)
from .gridio import read_grid, write_grid
from .numerics import dft_1d, dft_3d, full_spectrum_of_real, relative_spectrum_error
from .pencil import PencilGrid, memory_occupancy, owner_of, ram_per_node, transpose_map, volumes
from .perf import (
    ArchSpec,
    architecture_comparison,
    network_bandwidth,
    predict_table,
    timeline,
    total_time,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ArchSpec",
    "ArpCache",
    "CommLedger",
    "DataShuffler",
    "DatapathConfig",
    "EngineConfig",
    "FftEngine",
    "FrameHeaders",
    "LoopbackTransport",
    "PencilGrid",
    "ShufflerSpec",
    "architecture_comparison",
    "butterfly",
    "data_shuffle",
    "decode_frame",
    "dft_1d",
    "dft_3d",
    "encode_frame",
    "engine_metrics",
    "fft_engine_run",
    "fft_radix2",
    "frame_bytes",
    "full_spectrum_of_real",
    "latency_cycles",
    "memory_occupancy",
    "network_bandwidth",
    "owner_of",
    "predict_table",
    "ram_per_node",
    "read_grid",
    "relative_spectrum_error",
    "run_distributed_3dfft",
    "run_distributed_inverse",
    "timeline",
    "total_time",
    "transpose_map",
    "udp_frame",
    "volumes",
    "write_grid",
    "write_pcap",
]
