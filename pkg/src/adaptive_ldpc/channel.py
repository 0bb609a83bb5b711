"""Distributed transmit beamforming over i.i.d. Rayleigh fading with AWGN.

``M`` ideally synchronised nodes send the same BPSK symbol.  Node ``i`` sees a
complex gain ``a_i ~ CN(0, 1)`` and pre-rotates by ``-arg(a_i)``, so the
contributions add as magnitudes.  Each node transmits at amplitude
``1/sqrt(M)`` to keep the total power independent of ``M``; the receiver sees
the real statistic ``r = m g + n`` with ``g = sum|a_i| / sqrt(M)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DtbChannelParams:
    M: int
    ebn0_db: float
    rate: float = 1.0
    bits_per_symbol: int = 1

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("need at least one transmit node")
        if not 0 < self.rate <= 1:
            raise ValueError("rate must lie in (0, 1]")


@dataclass(frozen=True)
class ChannelSample:
    r: np.ndarray
    gain: np.ndarray
    sigma2: float


def rayleigh_taps(M: int, rng: np.random.Generator, size=()) -> np.ndarray:
    """Complex ``CN(0, 1)`` gains of shape ``size + (M,)``."""
    shape = tuple(np.atleast_1d(size)) + (M,) if size != () else (M,)
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def node_amplitude(M: int, es: float = 1.0) -> float:
    """Per-node transmit amplitude; ``M`` nodes together radiate ``es``."""
    return float(np.sqrt(es / M))


def beamform(taps: np.ndarray) -> np.ndarray:
    """Effective real gain after phase pre-compensation and 1/sqrt(M) scaling."""
    aligned = taps * np.exp(-1j * np.angle(taps))
    return aligned.real.sum(axis=-1) * node_amplitude(taps.shape[-1])


def dtb_gain(M: int, rng: np.random.Generator, size=()) -> np.ndarray | float:
    """Draw effective beamforming gains ``g`` (one per channel symbol)."""
    if M < 1:
        raise ValueError("need at least one transmit node")
    shape = tuple(np.atleast_1d(size)) + (M,) if size != () else (M,)
    # |CN(0,1)| is Rayleigh with E|a|^2 = 1; same magnitudes beamform() would sum
    mags = np.hypot(rng.standard_normal(shape), rng.standard_normal(shape)) / np.sqrt(2.0)
    g = mags.sum(axis=-1) * node_amplitude(M)
    return float(g) if size == () else g


def bpsk(bits) -> np.ndarray:
    """Bit 0 -> +1, bit 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)


def transmit_bpsk(bits, g, es: float, sigma2: float, rng: np.random.Generator) -> ChannelSample:
    if es <= 0 or sigma2 <= 0:
        raise ValueError("symbol energy and noise variance must be positive")
    m = np.sqrt(es) * bpsk(bits)
    g = np.broadcast_to(np.asarray(g, dtype=np.float64), m.shape)
    noise = rng.standard_normal(m.shape) * np.sqrt(sigma2)
    return ChannelSample(m * g + noise, g, sigma2)


def ebn0_to_sigma2(ebn0_db: float, rate: float = 1.0, bits_per_symbol: int = 1):
    """Unit symbol energy and per-real-dimension noise variance for an Eb/N0.

    ``rate`` is information bits per transmitted coded bit (K / N_tx), so
    punctured positions, which use no channel energy, are already accounted.
    """
    if not 0 < rate <= 1:
        raise ValueError("rate must lie in (0, 1]")
    ebn0 = 10.0 ** (ebn0_db / 10.0)
    return 1.0, 1.0 / (2.0 * rate * bits_per_symbol * ebn0)
