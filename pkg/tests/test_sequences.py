import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_samples
from lorlab.measure import INF, GridFunction, LorentzExponents, indicator, lorentz_norm_of_moduli
from lorlab.sequences import (
    ELL_TO_L,
    L_TO_ELL,
    FunctionSequence,
    SeqEmbeddingQuery,
    decide_seq_embedding,
    norm_Lpr_of_lq,
    norm_lq_of_Lpr,
    power_sequence,
    random_sequence,
    seq_lattice,
    verify_seq_embedding,
)

matrices = st.integers(min_value=0, max_value=2**32 - 1).map(
    lambda s: np.abs(np.random.default_rng(s).standard_normal((5, 24))) ** 3)
qs = st.sampled_from([0.5, 1.0, 2.0, 3.0, INF])


def test_rejects_empty_and_mismatched():
    with pytest.raises(ValueError):
        FunctionSequence([])
    with pytest.raises(ValueError):
        FunctionSequence([GridFunction([1, 2]), GridFunction([1, 2, 3])])


def test_disjoint_indicators():
    fs = FunctionSequence([indicator(4, 1, offset=0), indicator(4, 1, offset=2)])
    e = LorentzExponents(1, 1)
    assert norm_lq_of_Lpr(fs, 1, e) == pytest.approx(2.0)


@pytest.mark.parametrize("q", [0.5, 1, 3, INF])
def test_singleton(rng, q):
    g = GridFunction(random_samples(rng, 50), 0.02)
    fs = FunctionSequence([g])
    e = LorentzExponents(1.5, 2.5)
    ref = lorentz_norm_of_moduli(g.modulus(), 0.02, 1.5, 2.5)
    assert norm_lq_of_Lpr(fs, q, e) == pytest.approx(ref, rel=1e-12)
    assert norm_Lpr_of_lq(fs, q, e) == pytest.approx(ref, rel=1e-12)


def test_outer_norm_against_direct_sum(rng):
    arr = np.stack([random_samples(rng, 40) for _ in range(8)])
    fs = FunctionSequence.from_array(arr, 0.1)
    e = LorentzExponents(0.8, 3.0)
    direct = sum(lorentz_norm_of_moduli(row, 0.1, 0.8, 3.0) ** 0.5 for row in arr) ** 2
    assert norm_lq_of_Lpr(fs, 0.5, e) == pytest.approx(direct, rel=1e-12)


def test_inner_norm_disjoint_union(rng):
    arr = np.zeros((3, 30))
    for k in range(3):
        arr[k, 10 * k : 10 * k + 10] = random_samples(rng, 10, ties=False)
    fs = FunctionSequence.from_array(arr, 0.5)
    e = LorentzExponents(2.0, 1.0)
    union = lorentz_norm_of_moduli(arr.sum(axis=0), 0.5, 2.0, 1.0)
    for q in (0.5, 2.0, INF):
        assert norm_Lpr_of_lq(fs, q, e) == pytest.approx(union, rel=1e-12)


@pytest.mark.parametrize("q", [0.5, 1, 2, 4])
def test_identical_members(rng, q):
    g = random_samples(rng, 32)
    fs = FunctionSequence.from_array(np.tile(g, (6, 1)))
    e = LorentzExponents(2.0, 3.0)
    assert norm_Lpr_of_lq(fs, q, e) == pytest.approx(6 ** (1 / q) * lorentz_norm_of_moduli(g, 1.0, 2.0, 3.0), rel=1e-12)


@given(matrices, qs, st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([0.5, 2.0, INF]),
       st.floats(min_value=0.2, max_value=3.0))
def test_power_identities(arr, q, p, r, sigma):
    fs = FunctionSequence.from_array(arr, 0.25)
    e = LorentzExponents(p, r)
    ps = power_sequence(fs, sigma)
    for norm in (norm_lq_of_Lpr, norm_Lpr_of_lq):
        assert norm(ps, q / sigma, e.scaled(sigma)) == pytest.approx(norm(fs, q, e) ** sigma, rel=1e-10)


@given(matrices, st.sampled_from([0.5, 1.0, 2.0]), st.sampled_from([0.5, 1.0, 2.0]))
def test_target_monotone_in_q_and_r(arr, q, r):
    fs = FunctionSequence.from_array(arr)
    e = LorentzExponents(1.5, r)
    big = LorentzExponents(1.5, 2 * r)
    for norm in (norm_lq_of_Lpr, norm_Lpr_of_lq):
        base = norm(fs, q, e)
        assert norm(fs, 2 * q, e) <= base * (1 + 1e-12)
        assert norm(fs, q, big) <= base * (1 + 1e-12)


def test_decision_examples():
    assert decide_seq_embedding(SeqEmbeddingQuery(2, 1, 1, 3, 2, ELL_TO_L))
    assert not decide_seq_embedding(SeqEmbeddingQuery(2, 2, 3, 2, 3, ELL_TO_L))
    assert not decide_seq_embedding(SeqEmbeddingQuery(2, 2, 1, 2, 1, L_TO_ELL))


def test_query_validation():
    with pytest.raises(ValueError):
        SeqEmbeddingQuery(INF, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        SeqEmbeddingQuery(1, 1, 1, 1, 1, "sideways")


def test_lattice_size():
    assert len(seq_lattice([1, 2, INF])) == 2 * 2 * 3**4


def test_random_sequence_shape(rng):
    fs = random_sequence(rng, 8, 64)
    assert len(fs) == 8 and fs.cell_mass == 1 / 64
    assert np.any(fs.moduli() > 0)


def test_disjoint_sequence_ratio_one():
    q = SeqEmbeddingQuery(2, 2, 2, 2, 2)
    arr = np.zeros((4, 16))
    for k in range(4):
        arr[k, 4 * k : 4 * k + 3] = [3.0, 1.0, 0.5]
    fs = FunctionSequence.from_array(arr)
    src = norm_lq_of_Lpr(fs, 2, LorentzExponents(2, 2))
    tgt = norm_Lpr_of_lq(fs, 2, LorentzExponents(2, 2))
    assert tgt / src == pytest.approx(1.0, rel=1e-12)
    assert decide_seq_embedding(q)


def test_verify_stable_in_small_regime():
    # q <= r <= p regime
    q = SeqEmbeddingQuery(2, 1, 1, 2, 2)
    vals = [verify_seq_embedding(q, 16, m) for m in (8, 32, 128)]
    assert max(vals) / min(vals) <= 2


def test_verify_refuses_false_claim():
    with pytest.raises(ValueError):
        verify_seq_embedding(SeqEmbeddingQuery(2, 2, 3, 2, 3), 4, 8)
