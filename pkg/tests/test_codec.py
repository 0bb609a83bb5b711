import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptive_ldpc.codec import (
    BPDecoder,
    bp_decode,
    build_encoder,
    channel_llr,
    encode,
    gf2_rref,
    syndrome,
)
from adaptive_ldpc.optimizer import CgaParams, construct
from adaptive_ldpc.protograph import CodeSpec

SMALL = CgaParams(virtual_population=20, max_evaluations=400, restarts=2)


@pytest.fixture(scope="module")
def small_code():
    return construct(CodeSpec(96, "1/2", 4), SMALL)


@pytest.fixture(scope="module")
def small_tables(small_code):
    return build_encoder(small_code)


def test_hamming_encoder(hamming_H, hamming_codewords):
    tables, words = hamming_codewords
    assert tables.K == 4 and len(tables.parity_cols) == 3
    assert not syndrome(hamming_H, words).any()
    assert len({w.tobytes() for w in words}) == 16
    # systematic: message bits appear unchanged in the info positions
    msgs = np.array(list(itertools.product([0, 1], repeat=4)), dtype=np.uint8)
    assert np.array_equal(words[:, tables.info_cols], msgs)


def test_hamming_codebook_is_the_null_space(hamming_H, hamming_codewords):
    _, words = hamming_codewords
    every = np.array(list(itertools.product([0, 1], repeat=7)))
    null = every[~syndrome(hamming_H, every).any(axis=1)]
    assert {w.tobytes() for w in null.astype(np.uint8)} == {w.tobytes() for w in words}


def test_identity_has_no_information():
    tables = build_encoder(np.eye(6, dtype=np.uint8))
    assert tables.K == 0
    assert not encode(tables, np.zeros(0, np.uint8)).full.any()


def test_zero_matrix_rejected():
    with pytest.raises(ValueError):
        build_encoder(np.zeros((3, 5), np.uint8))


def test_rank_deficiency_warns():
    H = np.array([[1, 1, 0, 0], [0, 1, 1, 0], [1, 0, 1, 0], [0, 0, 1, 1]])
    with pytest.warns(UserWarning, match="rank 3"):
        tables = build_encoder(H)
    assert tables.K == 1


def test_gf2_rref_pivots():
    R, piv = gf2_rref(np.array([[1, 1, 0], [1, 1, 0], [0, 1, 1]]))
    assert piv == [0, 1]
    assert np.array_equal(R, [[1, 0, 1], [0, 1, 1]])


def test_message_length_checked(hamming_codewords):
    tables, _ = hamming_codewords
    with pytest.raises(ValueError):
        encode(tables, [1, 0, 1])


def test_constructed_code_full_rank(small_code, small_tables):
    assert small_tables.K == small_code.K
    assert set(small_tables.parity_cols) >= set(small_code.punctured_cols.tolist())


def test_zero_message_gives_zero_codeword(small_tables):
    cw = encode(small_tables, np.zeros(small_tables.K, np.uint8))
    assert not cw.full.any() and len(cw.tx) == 96


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_encode_is_linear_and_valid(small_code, small_tables, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.integers(0, 2, (2, small_tables.K), dtype=np.uint8)
    ca, cb = encode(small_tables, a), encode(small_tables, b)
    assert not syndrome(small_code, ca.full).any()
    assert np.array_equal(encode(small_tables, a ^ b).full, ca.full ^ cb.full)
    assert np.array_equal(ca.tx, np.delete(ca.full, small_code.punctured_cols))


def test_batch_encode_matches_single(small_tables):
    rng = np.random.default_rng(0)
    msgs = rng.integers(0, 2, (5, small_tables.K), dtype=np.uint8)
    batch = encode(small_tables, msgs).full
    for m, row in zip(msgs, batch):
        assert np.array_equal(encode(small_tables, m).full, row)


def test_channel_llr_examples():
    assert channel_llr(1, 1, 1) == 2
    assert channel_llr(0.8, 1.2, 0.5) == pytest.approx(3.84)
    assert channel_llr(-0.8, 1.2, 0.5) == -channel_llr(0.8, 1.2, 0.5)
    with pytest.raises(ValueError):
        channel_llr(1, 1, 0)


def _noiseless_llr(code, full, mag=20.0):
    llr = np.where(full == 0, mag, -mag).astype(float)
    llr[code.punctured_cols] = 0.0
    return llr


def test_noiseless_decode_with_punctured_erasures(small_code, small_tables):
    rng = np.random.default_rng(1)
    dec = BPDecoder(small_code)
    for _ in range(20):
        cw = encode(small_tables, rng.integers(0, 2, small_tables.K, dtype=np.uint8))
        res = dec.decode(_noiseless_llr(small_code, cw.full))
        assert res.converged and res.iterations <= 2
        assert np.array_equal(res.hard, cw.full)
        assert np.array_equal(res.hard[small_tables.info_cols], cw.message)


def test_all_zero_llr_is_deterministic(small_code):
    res = bp_decode(small_code, np.zeros(small_code.n), max_iter=5)
    # ties decide 0, which is a codeword
    assert res.converged and res.iterations == 1 and not res.hard.any()


def test_max_iter_validated(hamming_H):
    with pytest.raises(ValueError):
        bp_decode(hamming_H, np.ones(7), max_iter=0)
    with pytest.raises(ValueError):
        bp_decode(hamming_H, np.ones(6))


def test_single_error_corrected(hamming_H, hamming_codewords):
    _, words = hamming_codewords
    cw = words[11]
    for pos in range(7):
        llr = np.where(cw == 0, 5.0, -5.0)
        llr[pos] = -0.5 * np.sign(llr[pos])
        res = bp_decode(hamming_H, llr)
        assert np.array_equal(res.hard, cw)


def test_converged_implies_zero_syndrome(small_code, small_tables):
    rng = np.random.default_rng(2)
    dec = BPDecoder(small_code)
    msgs = rng.integers(0, 2, (200, small_tables.K), dtype=np.uint8)
    full = encode(small_tables, msgs).full
    llr = 2.0 * (1 - 2.0 * full + rng.normal(0, 0.9, full.shape)) / 0.81
    llr[:, small_code.punctured_cols] = 0.0
    hard, conv, iters = dec.decode(llr, max_iter=20)
    assert conv.any() and not conv.all()
    assert not syndrome(small_code, hard[conv]).any()
    assert syndrome(small_code, hard[~conv]).any(axis=1).all()
    assert (iters[~conv] == 20).all()


def test_batch_decode_matches_single(small_code):
    rng = np.random.default_rng(3)
    dec = BPDecoder(small_code)
    llr = rng.normal(1.5, 2.0, (6, small_code.n))
    hard, conv, iters = dec.decode(llr, max_iter=15)
    for i in range(6):
        r = dec.decode(llr[i], max_iter=15)
        assert np.array_equal(r.hard, hard[i])
        assert (r.converged, r.iterations) == (conv[i], iters[i])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), lam=st.floats(0.01, 100))
def test_check_message_signs_scale_invariant(small_code, seed, lam):
    rng = np.random.default_rng(seed)
    dec = BPDecoder(small_code)
    L = rng.normal(0, 3, (1, small_code.n))
    q = L[:, dec.var]
    assert np.array_equal(
        np.sign(dec._check_update(q)), np.sign(dec._check_update(lam * q))
    )


def test_posterior_decisions_not_scale_invariant():
    # the tanh rule is nonlinear: scaling can flip a first-iteration decision
    H = np.array([[1, 1, 1]])
    L = np.array([0.5, 1.0, -1.0])
    assert bp_decode(H, L, max_iter=1).hard[0] == 0
    assert bp_decode(H, 10 * L, max_iter=1).hard[0] == 1


def test_bp_matches_ml_on_hamming(hamming_H, hamming_codewords):
    _, words = hamming_codewords
    rng = np.random.default_rng(8)
    rate = 4 / 7
    sigma2 = 1 / (2 * rate * 10 ** (8 / 10))
    trials = 10_000
    idx = rng.integers(0, 16, trials)
    x = 1.0 - 2.0 * words[idx]
    r = x + rng.normal(0, np.sqrt(sigma2), x.shape)
    llr = channel_llr(r, 1.0, sigma2)
    hard, _, _ = BPDecoder(hamming_H).decode(llr)
    # ML over the codebook: maximum correlation with the BPSK images
    ml = words[np.argmax(r @ (1.0 - 2.0 * words).T, axis=1)]
    agree = np.all(hard == ml, axis=1).mean()
    assert agree >= 0.99
