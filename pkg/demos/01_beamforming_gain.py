"""
How many nodes does an uncoded beamforming link need?
======================================================

Closed-form error rates for BPSK over Rayleigh fading, with and without
distributed beamforming, checked against a quick Monte Carlo run.
"""

import numpy as np

from adaptive_ldpc.analytics import (
    ebn0_for_dtb_ber,
    ebn0_for_siso_ber,
    min_nodes,
    siso_rayleigh_ber,
    uncoded_dtb_ber,
)
from adaptive_ldpc.harness import Link, StopRule, run_point

# A single Rayleigh link is slow to improve: one decade of BER costs 10 dB
for e in (10, 20, 30, 40):
    print(f"SISO  {e:>2} dB  BER {float(siso_rayleigh_ber(e)):.2e}")

# With M phase-aligned nodes the combined gain hardens quickly
ebn0 = np.array([-6.0, -3.0, 0.0, 3.0])
for M in (2, 6, 10, 28):
    row = "  ".join(f"{b:.1e}" for b in uncoded_dtb_ber(M, ebn0))
    print(f"M={M:<3} {row}")

# Nodes needed for 1e-5 across a grid of Eb/N0 values
for e in (-6, -3, 0, 3.6):
    print(f"{e:>5} dB -> {min_nodes(e, 1e-5)} nodes")

# Gain of ten nodes over a single link at 1e-5
e10 = ebn0_for_dtb_ber(10, 1e-5)
print(f"10 nodes reach 1e-5 at {e10:.2f} dB, a {ebn0_for_siso_ber(1e-5) - e10:.1f} dB gain")

# The closed form assumes many nodes; a Monte Carlo point at M=10 agrees
rec = run_point(Link(None, frame_bits=5000), 10, ebn0_for_dtb_ber(10, 1e-3),
                StopRule(min_bit_errors=500, max_frames=2000), seed=1)
print(f"simulated M=10: BER {rec.ber:.2e} (target 1e-3) from {rec.bits} bits")
