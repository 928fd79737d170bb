"""Centroid-distance signature and its Fourier descriptor."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NotPowerOfTwo, ZeroDC

N_COEFFICIENTS = 15


@lru_cache(maxsize=32)
def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.intp)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    rev.flags.writeable = False
    return rev


@lru_cache(maxsize=64)
def _twiddles(half: int) -> np.ndarray:
    w = np.exp(-2j * np.pi * np.arange(half) / (2 * half))
    w.flags.writeable = False
    return w


def fft(signal) -> np.ndarray:
    """Iterative radix-2 decimation-in-time FFT along the last axis.

    Unnormalised forward transform, ``F[k] = sum_t x[t] exp(-2 pi i k t / N)``.
    Leading axes are treated as a batch.
    """
    x = np.asarray(signal, dtype=complex)
    n = x.shape[-1] if x.ndim else 0
    if n < 2 or n & (n - 1):
        raise NotPowerOfTwo(f"FFT length must be a power of two >= 2, got {n}")
    lead = x.shape[:-1]
    x = x[..., _bit_reverse(n)]
    half = 1
    while half < n:
        blocks = x.reshape(*lead, n // (2 * half), 2, half)
        even = blocks[..., 0, :]
        odd = blocks[..., 1, :] * _twiddles(half)
        x = np.stack((even + odd, even - odd), axis=-2).reshape(*lead, n)
        half *= 2
    return x


def centroid_distance_signature(boundary) -> np.ndarray:
    """Distance from the centroid to the boundary at each sample angle.

    Equal-angle sampling already measures exactly this, so the sampled radii
    are returned as-is.
    """
    return np.array(boundary.radii, dtype=float)


@dataclass(frozen=True, eq=False)
class FourierDescriptor:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.ndim != 1:
            raise ValueError("coefficients must be 1-D")
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return len(self.coefficients)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.coefficients, dtype=dtype)

    def __eq__(self, other):
        if not isinstance(other, FourierDescriptor):
            return NotImplemented
        return np.array_equal(self.coefficients, other.coefficients)

    __hash__ = None


def descriptor(signature, n_coefficients=N_COEFFICIENTS) -> FourierDescriptor:
    """Spectral magnitudes ``|F[k]| / |F[0]|`` for ``k = 1..n_coefficients``.

    Dividing by the DC magnitude removes scale; keeping magnitudes only
    removes rotation and the choice of starting point.
    """
    r = np.asarray(signature, dtype=float)
    if r.ndim != 1:
        raise ValueError("signature must be 1-D")
    if len(r) <= 2 * n_coefficients:
        raise ValueError(
            f"signature of length {len(r)} is too short for {n_coefficients} coefficients"
        )
    spectrum = fft(r)
    mag = np.abs(spectrum[: n_coefficients + 1])
    if mag[0] == 0:
        raise ZeroDC("signature has zero DC component")
    return FourierDescriptor(mag[1:] / mag[0])
