"""GF(2) systematic encoding, channel LLRs and sum-product decoding.

BPSK mapping throughout: bit 0 -> +1, bit 1 -> -1, so a positive LLR favours 0.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .protograph import QCParityCheck

LLR_CLIP = 30.0


@dataclass(frozen=True)
class Codeword:
    full: np.ndarray
    tx: np.ndarray
    message: np.ndarray


@dataclass(frozen=True)
class DecodeResult:
    hard: np.ndarray
    converged: bool
    iterations: int


@dataclass(frozen=True, eq=False)
class EncoderTables:
    """Systematic encoder derived from a parity-check matrix.

    ``info_cols`` hold the message bits; ``parity_cols[i]`` equals the GF(2)
    dot product of row ``i`` of ``parity_map`` with the message.
    """

    n: int
    info_cols: np.ndarray
    parity_cols: np.ndarray
    parity_map: np.ndarray
    tx_cols: np.ndarray

    @property
    def K(self) -> int:
        return len(self.info_cols)


def _matrix(H) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(H, QCParityCheck):
        return H.H, H.punctured_cols
    return np.asarray(H, dtype=np.uint8), np.array([], dtype=np.int64)


def gf2_rref(H: np.ndarray, column_order=None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over GF(2); pivots taken in ``column_order``."""
    A = (np.asarray(H, dtype=np.uint8) & 1).astype(bool)
    m, n = A.shape
    order = range(n) if column_order is None else column_order
    pivots: list[int] = []
    r = 0
    for col in order:
        if r == m:
            break
        nz = np.flatnonzero(A[r:, col])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            A[[r, p]] = A[[p, r]]
        hits = np.flatnonzero(A[:, col])
        hits = hits[hits != r]
        A[hits] ^= A[r]
        pivots.append(int(col))
        r += 1
    return A[:r].astype(np.uint8), pivots


def build_encoder(H) -> EncoderTables:
    """Systematic encoder by one Gaussian elimination over GF(2).

    Punctured columns are offered as pivots first so that, where possible,
    they carry parity rather than message bits.
    """
    M, punctured = _matrix(H)
    if M.size == 0 or not M.any():
        raise ValueError("parity-check matrix is empty or all-zero")
    m, n = M.shape
    rest = [c for c in range(n) if c not in set(punctured.tolist())]
    R, pivots = gf2_rref(M, list(punctured) + rest)
    if len(pivots) < m:
        warnings.warn(
            f"parity-check matrix has rank {len(pivots)} < {m} rows; "
            f"dimension is {n - len(pivots)}",
            stacklevel=2,
        )
    pivot_set = set(pivots)
    info = np.array([c for c in range(n) if c not in pivot_set], dtype=np.int64)
    tx = np.setdiff1d(np.arange(n), punctured)
    return EncoderTables(
        n, info, np.array(pivots, dtype=np.int64), R[:, info].astype(np.uint8), tx
    )


def encode(tables: EncoderTables, message) -> Codeword:
    """Encode one message (length K) or a batch (shape ``(B, K)``)."""
    msg = np.asarray(message, dtype=np.uint8)
    if msg.shape[-1] != tables.K:
        raise ValueError(f"message length {msg.shape[-1]} != K={tables.K}")
    full = np.zeros(msg.shape[:-1] + (tables.n,), dtype=np.uint8)
    full[..., tables.info_cols] = msg
    if len(tables.parity_cols):
        parity = (msg.astype(np.int64) @ tables.parity_map.T.astype(np.int64)) & 1
        full[..., tables.parity_cols] = parity
    return Codeword(full, full[..., tables.tx_cols], msg)


def syndrome(H, bits) -> np.ndarray:
    M, _ = _matrix(H)
    return (np.asarray(bits, dtype=np.int64) @ M.T.astype(np.int64)) & 1


def channel_llr(r, a, sigma2):
    """Bit LLR ``2 r a / sigma2`` for BPSK with known real gain ``a``."""
    if np.any(np.asarray(sigma2) <= 0):
        raise ValueError("noise variance must be positive")
    return 2.0 * np.asarray(r) * np.asarray(a) / np.asarray(sigma2)


class BPDecoder:
    """Flooding sum-product decoder in the LLR domain (tanh rule).

    Messages live on the edges of ``H``; the check update uses the product of
    ``tanh(x/2)`` over the other edges, with magnitudes clipped at
    ``LLR_CLIP``.  Decisions are hard-limited with ties going to bit 0.
    """

    def __init__(self, H):
        M, _ = _matrix(H)
        self.H = M
        self.m, self.n = M.shape
        chk, var = np.nonzero(M)  # row-major: edges grouped by check
        self.chk = chk
        self.var = var
        self.E = len(chk)
        new_row = np.r_[True, chk[1:] != chk[:-1]] if self.E else np.zeros(0, bool)
        self.row_starts = np.flatnonzero(new_row)
        self.edge_row = np.cumsum(new_row) - 1
        self.to_var = sparse.csr_matrix(
            (np.ones(self.E), (np.arange(self.E), var)), shape=(self.E, self.n)
        )

    def _check_update(self, q: np.ndarray) -> np.ndarray:
        # q: (B, E) variable-to-check messages grouped by check (row-major)
        t = np.tanh(np.clip(q, -LLR_CLIP, LLR_CLIP) / 2.0)
        zero = t == 0.0
        t_nz = np.where(zero, 1.0, t)
        sign_neg = t_nz < 0
        logmag = np.log(np.abs(t_nz))
        tot_log = self._per_check(logmag)
        tot_neg = self._per_check(sign_neg.astype(np.int64))
        tot_zero = self._per_check(zero.astype(np.int64))
        ext_log = tot_log - logmag
        ext_neg = (tot_neg - sign_neg) & 1
        ext_zero = tot_zero - zero
        mag = np.where(ext_zero > 0, 0.0, np.exp(ext_log))
        mag = np.minimum(mag, np.tanh(LLR_CLIP / 2.0))
        prod = np.where(ext_neg == 1, -mag, mag)
        return 2.0 * np.arctanh(prod)

    def _per_check(self, x: np.ndarray) -> np.ndarray:
        """Sum over each check's edges, broadcast back onto the edges."""
        return np.add.reduceat(x, self.row_starts, axis=1)[:, self.edge_row]

    def decode(self, llr, max_iter: int = 50):
        """Decode ``llr`` of shape ``(n,)`` or ``(B, n)``.

        Returns ``(hard, converged, iterations)`` arrays for batches, or a
        :class:`DecodeResult` for a single vector.
        """
        llr = np.asarray(llr, dtype=np.float64)
        single = llr.ndim == 1
        L = np.atleast_2d(llr)
        if L.shape[1] != self.n:
            raise ValueError(f"LLR length {L.shape[1]} != {self.n}")
        if max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        B = L.shape[0]
        hard = (L < 0).astype(np.uint8)
        converged = np.zeros(B, dtype=bool)
        iters = np.zeros(B, dtype=np.int64)
        active = np.arange(B)
        q = L[:, self.var]
        for it in range(1, max_iter + 1):
            r = self._check_update(q)
            post = L[active] + (self.to_var.T @ r.T).T
            q = post[:, self.var] - r
            h = (post < 0).astype(np.uint8)
            hard[active] = h
            iters[active] = it
            ok = ~self._syndrome_any(h)
            converged[active[ok]] = True
            if ok.all():
                break
            keep = ~ok
            active = active[keep]
            q = q[keep]
        if single:
            return DecodeResult(hard[0], bool(converged[0]), int(iters[0]))
        return hard, converged, iters

    def _syndrome_any(self, h: np.ndarray) -> np.ndarray:
        bits = h[:, self.var].astype(np.int64)
        par = np.add.reduceat(bits, self.row_starts, axis=1) & 1
        return par.any(axis=1)


def bp_decode(H, llr, max_iter: int = 50) -> DecodeResult:
    """Single-frame convenience wrapper around :class:`BPDecoder`."""
    return BPDecoder(H).decode(np.asarray(llr, dtype=np.float64), max_iter)
