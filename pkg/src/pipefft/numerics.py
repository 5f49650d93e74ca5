"""Direct-sum reference transforms.

Everything in this module is deliberately literal: spectra are evaluated
straight from the defining sums, with roots of unity computed per index.
These routines are the independent oracles that the streaming engine and the
distributed pipeline are checked against, so they share no code with the
fast paths.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "twiddle",
    "dft_1d",
    "dft_3d",
    "pack_real_to_complex",
    "full_spectrum_of_real",
    "relative_spectrum_error",
    "is_power_of_two",
]


def is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


def twiddle(index: int, size: int) -> complex:
    """Root of unity exp(-2*pi*i*index/size), evaluated per index.

    This is the value a ROM entry holds; no recurrence, no table sharing.
    """
    if size <= 0:
        raise ValueError(f"twiddle size must be positive, got {size}")
    angle = -2.0 * math.pi * (index % size) / size
    return complex(math.cos(angle), math.sin(angle))


def _roots(n: int, inverse: bool) -> np.ndarray:
    """All n roots exp(+-2*pi*i*k/n) as one array, one exp per index."""
    sign = 2.0j if inverse else -2.0j
    return np.exp(sign * np.pi * np.arange(n) / n)


def dft_1d(x, inverse: bool = False) -> np.ndarray:
    """Transform by direct evaluation of the defining sum, one bin at a time.

    O(n^2); that is the point. The inverse applies the conjugate kernel and
    divides by n.
    """
    a = np.asarray(x, dtype=np.complex128)
    if a.ndim != 1:
        raise ValueError(f"dft_1d expects a 1-D sequence, got shape {a.shape}")
    n = a.size
    if n == 0:
        raise ValueError("dft_1d of an empty sequence is undefined")
    roots = _roots(n, inverse)
    k = np.arange(n)
    out = np.empty(n, dtype=np.complex128)
    for b in range(n):
        out[b] = a @ roots[(b * k) % n]
    if inverse:
        out /= n
    return out


def _dft_along_axis(a: np.ndarray, axis: int, inverse: bool) -> np.ndarray:
    n = a.shape[axis]
    k = np.arange(n)
    kernel = _roots(n, inverse)[np.outer(k, k) % n]
    if inverse:
        kernel = kernel / n
    moved = np.moveaxis(a, axis, -1)
    # out[..., b] = sum_j moved[..., j] * kernel[b, j]
    return np.moveaxis(moved @ kernel.T, -1, axis)


def dft_3d(field, inverse: bool = False) -> np.ndarray:
    """Triple transform of a 3-D volume, one full direct transform per axis."""
    a = np.asarray(field, dtype=np.complex128)
    if a.ndim != 3 or len(set(a.shape)) != 1:
        raise ValueError(f"dft_3d expects a cubic volume, got shape {a.shape}")
    for axis in range(3):
        a = _dft_along_axis(a, axis, inverse)
    return a


def pack_real_to_complex(x) -> np.ndarray:
    """Spectrum of a real sequence, keeping only the n/2 + 1 meaningful bins.

    Bins above n/2 are the conjugate mirror of bins below it and carry no
    extra information, so a real even-length-n input produces n/2 + 1
    complex outputs.
    """
    a = np.asarray(x, dtype=np.float64)
    if a.ndim != 1:
        raise ValueError(f"pack_real_to_complex expects a 1-D sequence, got shape {a.shape}")
    n = a.size
    if n < 2 or n % 2:
        raise ValueError(f"length must be even and at least 2, got {n}")
    return dft_1d(a.astype(np.complex128))[: n // 2 + 1]


def full_spectrum_of_real(half, n: int) -> np.ndarray:
    """Expand the n/2 + 1 packed bins of a real signal back to all n bins."""
    h = np.asarray(half, dtype=np.complex128)
    if h.ndim != 1 or h.size != n // 2 + 1:
        raise ValueError(f"expected {n // 2 + 1} packed bins, got shape {h.shape}")
    out = np.empty(n, dtype=np.complex128)
    out[: n // 2 + 1] = h
    out[n // 2 + 1 :] = np.conj(h[1 : n // 2][::-1])
    return out


def relative_spectrum_error(candidate, reference, signal) -> float:
    """Largest spectrum deviation, normalized by the input's L2 norm."""
    c = np.asarray(candidate, dtype=np.complex128)
    r = np.asarray(reference, dtype=np.complex128)
    norm = float(np.linalg.norm(np.asarray(signal).ravel()))
    if norm == 0.0:
        return float(np.max(np.abs(c - r))) if c.size else 0.0
    return float(np.max(np.abs(c - r))) / norm
