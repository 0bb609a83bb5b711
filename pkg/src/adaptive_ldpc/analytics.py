"""Closed-form BER expressions for BPSK with and without beamforming."""

from __future__ import annotations

import math

import numpy as np
from scipy import optimize, special


def q_function(x):
    """Gaussian upper-tail probability ``Q(x)``."""
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=np.float64) / 10.0)


def uncoded_dtb_ber(M, ebn0_db):
    """Average BER of uncoded BPSK DTB with ``M`` ideally synchronised nodes.

    Approximates the combined gain as Gaussian, which is accurate for large
    ``M``; for a handful of nodes it is only indicative.
    """
    x = db_to_linear(ebn0_db)
    M = np.asarray(M, dtype=np.float64)
    return q_function(np.sqrt(np.pi * M * x / (2.0 + (4.0 - np.pi) * x)))


def dtb_ber_floor(M):
    """Limit of :func:`uncoded_dtb_ber` as Eb/N0 grows without bound."""
    return q_function(np.sqrt(np.pi * np.asarray(M, dtype=np.float64) / (4.0 - np.pi)))


def required_nodes(ebn0_db: float, target_ber: float) -> float:
    """Real-valued node count at which :func:`uncoded_dtb_ber` equals the target."""
    if not 0 < target_ber < 0.5:
        raise ValueError("target BER must lie in (0, 0.5)")
    x = float(db_to_linear(ebn0_db))
    z = -special.ndtri(target_ber)
    return z * z * (2.0 + (4.0 - np.pi) * x) / (np.pi * x)


def min_nodes(ebn0_db: float, target_ber: float, strict: bool = False) -> int:
    """Number of cooperating nodes needed to reach ``target_ber``.

    By default this is :func:`required_nodes` rounded to the nearest integer
    (at least 1), i.e. the value read off a required-nodes curve.  With
    ``strict=True`` it is the smallest ``M`` whose BER does not exceed the
    target, found by exponential then binary search.
    """
    if not 0 < target_ber < 0.5:
        raise ValueError("target BER must lie in (0, 0.5)")
    if not strict:
        return max(1, math.floor(required_nodes(ebn0_db, target_ber) + 0.5))

    def ok(M):
        return uncoded_dtb_ber(M, ebn0_db) <= target_ber

    hi = 1
    while not ok(hi):
        hi *= 2
    lo = hi // 2
    # ok(hi) holds; lo is 0 or fails
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def siso_rayleigh_ber(ebn0_db):
    """BPSK BER over flat Rayleigh fading with coherent detection."""
    g = db_to_linear(ebn0_db)
    return 0.5 * (1.0 - np.sqrt(g / (1.0 + g)))


def ebn0_for_dtb_ber(M: int, target_ber: float, lo: float = -40.0, hi: float = 60.0) -> float:
    """Eb/N0 in dB where :func:`uncoded_dtb_ber` equals ``target_ber``."""
    if target_ber <= float(dtb_ber_floor(M)):
        raise ValueError(f"target {target_ber} is below the M={M} error floor")
    return optimize.brentq(
        lambda e: math.log(float(uncoded_dtb_ber(M, e))) - math.log(target_ber),
        lo,
        hi,
        xtol=1e-10,
    )


def ebn0_for_siso_ber(target_ber: float) -> float:
    """Inverse of :func:`siso_rayleigh_ber`."""
    if not 0 < target_ber < 0.5:
        raise ValueError("target BER must lie in (0, 0.5)")
    u = 1.0 - 2.0 * target_ber
    return 10.0 * math.log10(u * u / (1.0 - u * u))
