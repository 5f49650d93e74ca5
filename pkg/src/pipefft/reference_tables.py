"""Reference measurement and prediction tables.

These are the published characterization numbers the models in this
package are checked against: one engine row per (rows, operator latency,
transform size) giving the clock reached on hardware and the reported
latency/throughput figures, and one calculation-time grid per component
count for the 1024-node machine sizing study.

The tables live in the package, not in the test tree, because the
``verify`` command re-derives them at runtime. Two entries are known not
to follow the closed forms the rest of the data follows and are listed
here explicitly so every consumer whitelists the same cells.
"""

from __future__ import annotations

from typing import NamedTuple

__all__ = [
    "EngineRow",
    "ENGINE_TABLE",
    "GFLOPS_MISMATCHES",
    "CALC_TIME_N_VALUES",
    "CALC_TIME_P_VALUES",
    "CALC_TIME_MU_VALUES",
    "CALC_TIME_GRID",
    "CALC_TIME_WHITELIST",
]


class EngineRow(NamedTuple):
    """One published engine characterization row.

    f_max_mhz is the clock closure reached for that geometry; the
    latency columns assume t_clk = 1/f_max. Microsecond columns are the
    cycle columns over f_max, rounded to two decimals.
    """

    rows: int
    l_op: int
    n: int
    f_max_mhz: int
    l_fft_cycles: int
    l_fft_us: float
    t_fft_us: float
    b_fft_gib: float
    gflops: float


ENGINE_TABLE: tuple[EngineRow, ...] = tuple(
    EngineRow(*row)
    for row in (
        (1, 3, 512, 250, 382, 1.53, 2.55, 7.45, 22.5),
        (1, 3, 1024, 247, 652, 2.64, 4.71, 7.36, 24.7),
        (1, 3, 2048, 251, 1178, 4.69, 8.77, 7.48, 27.61),
        (1, 3, 4096, 244, 2216, 9.08, 17.48, 7.27, 29.28),
        (1, 3, 8192, 236, 4278, 18.13, 35.48, 7.03, 30.68),
        (1, 6, 512, 348, 463, 1.33, 2.07, 10.37, 31.32),
        (1, 6, 1024, 345, 742, 2.15, 3.63, 10.28, 34.5),
        (1, 6, 2048, 346, 1277, 3.69, 6.65, 10.31, 38.06),
        (1, 6, 4096, 323, 2324, 7.2, 13.54, 9.63, 38.76),
        (1, 6, 8192, 344, 4395, 12.78, 24.68, 10.25, 44.72),
        (1, 9, 512, 379, 544, 1.44, 2.11, 11.3, 34.11),
        (1, 9, 1024, 376, 832, 2.21, 3.57, 11.21, 37.6),
        (1, 9, 2048, 379, 1376, 3.63, 6.33, 11.3, 41.69),
        (1, 9, 4096, 371, 2432, 6.56, 12.08, 11.06, 44.52),
        (1, 9, 8192, 355, 4512, 12.71, 24.25, 10.58, 46.15),
        (1, 14, 512, 380, 661, 1.74, 2.41, 11.32, 34.2),
        (1, 14, 1024, 380, 962, 2.53, 3.88, 11.32, 38.0),
        (1, 14, 2048, 380, 1519, 4.0, 6.69, 11.32, 41.8),
        (1, 14, 4096, 365, 2588, 7.09, 12.7, 10.88, 43.8),
        (1, 14, 8192, 345, 4681, 13.57, 25.44, 10.28, 44.85),
        (2, 3, 512, 238, 254, 1.07, 1.61, 14.19, 42.84),
        (2, 3, 1024, 232, 396, 1.71, 2.81, 13.83, 46.4),
        (2, 3, 2048, 234, 666, 2.85, 5.03, 13.95, 51.48),
        (2, 3, 4096, 230, 1192, 5.18, 9.63, 13.71, 55.2),
        (2, 3, 8192, 244, 2230, 9.14, 17.53, 14.54, 63.44),
        (2, 6, 512, 343, 335, 0.98, 1.35, 20.44, 61.74),
        (2, 6, 1024, 344, 486, 1.41, 2.16, 20.5, 68.8),
        (2, 6, 2048, 345, 765, 2.22, 3.7, 20.56, 75.9),
        (2, 6, 4096, 341, 1300, 3.81, 6.82, 20.33, 81.84),
        (2, 6, 8192, 330, 2347, 7.11, 13.32, 19.67, 85.8),
        (2, 9, 512, 379, 416, 1.1, 1.44, 22.59, 68.22),
        (2, 9, 1024, 378, 576, 1.52, 2.2, 22.53, 75.6),
        (2, 9, 2048, 378, 864, 2.29, 3.64, 22.53, 83.16),
        (2, 9, 4096, 378, 1408, 3.72, 6.43, 22.53, 90.72),
        (2, 9, 8192, 377, 2464, 6.54, 11.97, 22.47, 98.8),
        (2, 14, 512, 380, 533, 1.4, 1.74, 22.65, 68.4),
        (2, 14, 1024, 392, 706, 1.8, 2.45, 23.37, 78.4),
        (2, 14, 2048, 392, 1007, 2.57, 3.88, 23.37, 86.24),
        (2, 14, 4096, 380, 1564, 4.12, 6.81, 22.65, 91.2),
        (2, 14, 8192, 380, 2633, 6.93, 12.32, 22.65, 98.8),
        (4, 3, 512, 226, 190, 0.84, 1.12, 26.94, 81.36),
        (4, 3, 1024, 231, 268, 1.16, 1.71, 27.54, 92.4),
        (4, 3, 2048, 230, 410, 1.78, 2.9, 27.42, 101.2),
        (4, 3, 4096, 222, 680, 3.06, 5.37, 26.46, 106.56),
        (4, 3, 8192, 231, 1206, 5.22, 9.65, 27.54, 120.12),
        (4, 6, 512, 337, 271, 0.8, 0.99, 40.17, 121.32),
        (4, 6, 1024, 337, 358, 1.06, 1.44, 40.17, 134.8),
        (4, 6, 2048, 332, 509, 1.53, 2.3, 39.58, 146.08),
        (4, 6, 4096, 333, 788, 2.37, 3.9, 39.7, 159.84),
        (4, 6, 8192, 254, 1323, 5.21, 9.24, 30.28, 132.08),
        (4, 9, 512, 379, 352, 0.93, 1.1, 45.18, 136.44),
        (4, 9, 1024, 377, 448, 1.19, 1.53, 44.94, 150.8),
        (4, 9, 2048, 376, 608, 1.62, 2.3, 44.82, 165.44),
        (4, 9, 4096, 378, 896, 2.37, 3.72, 45.06, 181.44),
        (4, 9, 8192, 291, 1440, 4.95, 8.47, 34.69, 151.32),
        (4, 14, 512, 379, 469, 1.24, 1.41, 45.18, 136.44),
        (4, 14, 1024, 379, 578, 1.53, 1.86, 45.18, 151.6),
        (4, 14, 2048, 379, 751, 1.98, 2.66, 45.18, 166.76),
        (4, 14, 4096, 384, 1052, 2.74, 4.07, 45.78, 184.32),
        (4, 14, 8192, 308, 1609, 5.22, 8.55, 36.72, 160.16),
    )
)

# (rows, l_op, n) -> published GFLOPS that does not equal
# 10 * R * log2(N) * f_max. The one entry repeats the figure of the row
# below it (the l_op=14 row reaches 380 MHz where this one reaches 377);
# 10*2*13*377e6 gives 98.02.
GFLOPS_MISMATCHES: dict[tuple[int, int, int], float] = {
    (2, 9, 8192): 98.8,
}

CALC_TIME_N_VALUES = (512, 1024, 2048, 4096, 8192)
CALC_TIME_P_VALUES = (1, 4, 16, 64, 256, 1024)
CALC_TIME_MU_VALUES = (1, 3)

# (mu, n) -> seconds per P column, None where the working set exceeds
# the 8 GiB device memory. R=4, k=1, f=180 MHz throughout.
CALC_TIME_GRID: dict[tuple[int, int], tuple[float | None, ...]] = {
    (1, 512): (0.17, 0.047, 0.011, 0.0029, 0.00073, 0.00018),
    (1, 1024): (None, 0.37, 0.093, 0.023, 0.0058, 0.0014),
    (1, 2048): (None, None, 0.74, 0.19, 0.047, 0.012),
    (1, 4096): (None, None, None, None, 0.37, 0.093),
    (1, 8192): (None, None, None, None, None, 0.75),
    (3, 512): (0.37, 0.093, 0.023, 0.0058, 0.0015, 0.00036),
    (3, 1024): (None, 0.75, 0.19, 0.047, 0.012, 0.0029),
    (3, 2048): (None, None, 1.49, 0.37, 0.093, 0.023),
    (3, 4096): (None, None, None, None, 0.75, 0.19),
    (3, 8192): (None, None, None, None, None, 1.49),
}

# (mu, n, p) -> published seconds that matches the closed form neither
# by rounding nor by truncation: the model gives 0.18641 here. Every
# other populated cell reproduces.
CALC_TIME_WHITELIST: dict[tuple[int, int, int], float] = {
    (1, 512, 1): 0.17,
}
