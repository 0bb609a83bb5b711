"""
From a protograph to a quasi-cyclic parity-check matrix
=======================================================

The AR4JA base graph, its higher-rate extensions, and what circulant shifts
do to the girth of the lifted code.
"""

import numpy as np

from adaptive_ldpc.optimizer import repair_collisions
from adaptive_ldpc.protograph import (
    ShiftAssignment,
    ar4ja_base,
    extend_for_rate,
    family_rate,
    lift,
    lift_shifts,
    lifting_order,
    additional_nodes_for_rate,
)
from adaptive_ldpc.tanner import girth_of_matrix, qc_girth

base = ar4ja_base()
print(base.mult)
print("punctured column:", base.punctured, " design rate:", base.design_rate)

# Appending node pairs raises the rate: (n_R + 1) / (n_R + 3)
for n_R in range(5):
    p = extend_for_rate(base, family_rate(n_R))
    print(f"n_R={n_R}  rate {p.design_rate}  protomatrix {p.rows}x{p.cols}")

# Block length picks the lifting order
R = family_rate(1)
v = lifting_order(480, additional_nodes_for_rate(R))
print("lifting order for N=480, R=1/2:", v)

# Trivial shifts copy every protograph cycle (multi-edges take 0, 1, 2)
trivial = lift(base, ShiftAssignment.zeros(base, v))
print("trivial shifts:", qc_girth(trivial), "girth,", qc_girth(trivial).multiplicity, "four-cycles")

# Random shifts usually do better, and the fast path agrees with plain BFS
rng = np.random.default_rng(0)
shifts = repair_collisions(base, v, rng.integers(0, v, base.n_edges))
code = lift_shifts(base, v, shifts)
print("random shifts:", qc_girth(code), "| BFS:", girth_of_matrix(code.H))
print("H is", code.H.shape, "with", int(code.H.sum()), "ones")
