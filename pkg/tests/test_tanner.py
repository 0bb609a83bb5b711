import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_ldpc.protograph import (
    ProtoMatrix,
    ShiftAssignment,
    ar4ja_base,
    extend_for_rate,
    family_rate,
    lift,
    lift_shifts,
)
from adaptive_ldpc.optimizer import repair_collisions, truncate_columns
from adaptive_ldpc.tanner import (
    GirthReport,
    UnsupportedStructureError,
    from_parity_check,
    girth,
    girth_of_matrix,
    qc_girth,
    shift_girth,
)
from conftest import brute_force_cycles, random_bipartite


def test_hamming_graph_counts(hamming_H):
    g = from_parity_check(hamming_H)
    assert (g.V, g.C, g.n_edges) == (7, 3, int(hamming_H.sum()))
    assert g.n_edges == 11
    assert all(0 <= v < 7 and 0 <= c < 3 for v, c in g.edges)


def test_empty_and_identity_graphs():
    assert from_parity_check(np.zeros((2, 2), int)).n_edges == 0
    g = from_parity_check(np.eye(5, dtype=int))
    assert g.n_edges == 5
    assert all(len(a) == 1 for a in g.var_adj)


def test_hamming_girth_four(hamming_H):
    rep = girth(from_parity_check(hamming_H))
    assert rep.girth == 4
    assert (rep.girth, rep.multiplicity) == brute_force_cycles(hamming_H)


def test_printed_multi_edge_matrix_has_girth_four():
    printed = np.array([[1, 0, 1, 1, 1, 1, 0, 1], [1, 1, 1, 0, 0, 1, 1, 1]] * 2)
    assert girth_of_matrix(printed).girth == 4


def test_tree_is_acyclic():
    # path graph v0 - c0 - v1 - c1 - v2 plus a pendant v3 on c1
    H = np.array([[1, 1, 0, 0], [0, 1, 1, 1]])
    rep = girth_of_matrix(H)
    assert rep.acyclic and rep.girth is None and str(rep) == "acyclic"


def test_single_six_cycle():
    H = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    rep = girth_of_matrix(H)
    assert (rep.girth, rep.multiplicity) == (6, 1)


def test_bfs_matches_brute_force_on_random_graphs():
    rng = np.random.default_rng(20240611)
    for _ in range(100):
        H = random_bipartite(rng)
        rep = girth_of_matrix(H)
        assert (rep.girth, rep.multiplicity) == brute_force_cycles(H)


def test_bfs_matches_brute_force_on_dense_graphs():
    rng = np.random.default_rng(5)
    for _ in range(20):
        H = random_bipartite(rng, max_nodes=14, density=0.6)
        rep = girth_of_matrix(H)
        assert (rep.girth, rep.multiplicity) == brute_force_cycles(H)


def _random_qc(rng):
    if rng.random() < 0.5:
        p = extend_for_rate(ar4ja_base(), family_rate(int(rng.integers(0, 3))))
    else:
        rows, cols = int(rng.integers(2, 4)), int(rng.integers(3, 6))
        mult = rng.integers(0, 3, (rows, cols))
        mult[:, 0] = np.maximum(mult[:, 0], 1)
        mult[0, :] = np.maximum(mult[0, :], 1)
        p = ProtoMatrix(mult)
    v = int(rng.integers(3, 12))
    shifts = repair_collisions(p, v, rng.integers(0, v, p.n_edges))
    return lift_shifts(p, v, shifts)


def test_qc_girth_matches_bfs_on_random_qc_matrices():
    rng = np.random.default_rng(77)
    for _ in range(50):
        code = _random_qc(rng)
        fast = qc_girth(code, max_len=20)
        slow = girth_of_matrix(code.H)
        if slow.girth is not None and slow.girth <= 20:
            assert (fast.girth, fast.multiplicity) == (slow.girth, slow.multiplicity)
        else:
            assert fast.capped


def test_two_by_two_example():
    # alternating shift sum 0 - 0 + 1 - 0 = 1 is nonzero mod 3: no 4-cycle
    p = ProtoMatrix(np.ones((2, 2), int))
    rep = shift_girth(p, 3, [0, 0, 0, 1])
    assert rep.girth >= 6
    assert rep == girth_of_matrix(lift_shifts(p, 3, [0, 0, 0, 1]).H)


def test_two_by_two_exhaustive():
    # every node has degree 2, so each lift is a union of cycles; the best
    # assignments close one 12-cycle through all nodes
    p = ProtoMatrix(np.ones((2, 2), int))
    girths = {
        s: shift_girth(p, 3, s, max_len=12).girth
        for s in itertools.product(range(3), repeat=4)
    }
    for s, g in girths.items():
        four = (s[0] - s[1] + s[3] - s[2]) % 3 == 0
        assert (g == 4) == four
    assert max(girths.values()) == 12


def test_zero_shifts_copy_protograph_four_cycle():
    p = ProtoMatrix(np.ones((2, 3), int))
    assert shift_girth(p, 7, np.zeros(6, int)).girth == 4


def test_capped_report():
    # a single 1x1 cell lifts to a perfect matching: no cycles at all
    rep = shift_girth(ProtoMatrix([[1, 1]]), 4, [0, 1], max_len=8)
    assert rep.capped and rep.girth == 10 and str(rep) == ">= 10"


def test_qc_girth_rejects_non_circulant():
    p = ProtoMatrix([[1]])
    code = lift(p, ShiftAssignment(3, {(0, 0): ((1, 0, 2),)}))
    with pytest.raises(UnsupportedStructureError):
        qc_girth(code)


def test_qc_girth_rejects_truncated():
    p = ar4ja_base()
    code = truncate_columns(lift_shifts(p, 7, np.arange(p.n_edges) % 7), 2)
    with pytest.raises(UnsupportedStructureError):
        qc_girth(code)


def test_shift_girth_rejects_odd_limit():
    with pytest.raises(ValueError):
        shift_girth(ar4ja_base(), 5, np.zeros(15, int), max_len=7)


def test_report_ordering():
    assert GirthReport(4, 10) < GirthReport(4, 2) < GirthReport(6, 50)
    assert GirthReport(6, 1) < GirthReport(None)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_girth_even_and_permutation_invariant(seed):
    rng = np.random.default_rng(seed)
    H = random_bipartite(rng, max_nodes=30)
    rep = girth_of_matrix(H)
    assert rep.girth is None or rep.girth % 2 == 0
    perm = girth_of_matrix(H[rng.permutation(H.shape[0])][:, rng.permutation(H.shape[1])])
    assert (perm.girth, perm.multiplicity) == (rep.girth, rep.multiplicity)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_removing_edges_never_decreases_girth(seed):
    rng = np.random.default_rng(seed)
    H = random_bipartite(rng, max_nodes=30)
    ones = np.argwhere(H)
    if len(ones) == 0:
        return
    r, c = ones[rng.integers(len(ones))]
    H2 = H.copy()
    H2[r, c] = 0
    inf = float("inf")
    g1 = girth_of_matrix(H).girth or inf
    g2 = girth_of_matrix(H2).girth or inf
    assert g2 >= g1
