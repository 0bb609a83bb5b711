"""
Encoding and belief-propagation decoding
========================================

The (7,4) Hamming code as a sanity check, then a punctured protograph code
sent through a fading beamforming channel.
"""

import itertools

import numpy as np

from adaptive_ldpc.channel import dtb_gain, ebn0_to_sigma2, transmit_bpsk
from adaptive_ldpc.codec import BPDecoder, build_encoder, channel_llr, encode, syndrome
from adaptive_ldpc.formats import hamming74
from adaptive_ldpc.optimizer import CgaParams, construct
from adaptive_ldpc.protograph import CodeSpec

H = hamming74()
tables = build_encoder(H)
msgs = np.array(list(itertools.product([0, 1], repeat=4)), dtype=np.uint8)
words = encode(tables, msgs).full
print("Hamming codebook:", len(words), "words, all syndromes zero:", not syndrome(H, words).any())

# One weak, wrong bit gets corrected
llr = np.where(words[5] == 0, 4.0, -4.0)
llr[2] *= -0.2
print("sent ", words[5], "\ngot  ", BPDecoder(H).decode(llr).hard)

# A short protograph code; column 1 of each copy is never transmitted
code = construct(CodeSpec(240, "1/2", seed=1), CgaParams(max_evaluations=3000))
tables = build_encoder(code)
print(f"code: n={code.n} N_tx={code.N_tx} K={tables.K} punctured={len(code.punctured_cols)}")

rng = np.random.default_rng(5)
M, ebn0 = 4, -1.0
es, sigma2 = ebn0_to_sigma2(ebn0, tables.K / code.N_tx)
cw = encode(tables, rng.integers(0, 2, (200, tables.K), dtype=np.uint8))
g = dtb_gain(M, rng, cw.tx.shape)
rx = transmit_bpsk(cw.tx, g, es, sigma2, rng)

# Punctured positions enter the decoder with zero LLR
llr = np.zeros(cw.full.shape)
llr[:, tables.tx_cols] = channel_llr(rx.r, rx.gain, sigma2)
hard, converged, iters = BPDecoder(code).decode(llr, max_iter=50)
raw = np.mean((rx.r < 0) != cw.tx)
ber = np.mean(hard[:, tables.info_cols] != cw.message)
print(f"M={M}, {ebn0} dB: channel BER {raw:.3f} -> decoded BER {ber:.2e}, "
      f"{converged.mean():.0%} converged, mean {iters.mean():.1f} iterations")
