from __future__ import annotations

from itertools import product

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convisd.algebra import get_field, weight
from convisd.convcode import (
    ConvCode,
    PolyVector,
    SlidingBlockCode,
    block_codewords_up_to,
    column_distance,
    compute_degree,
    encode,
    exact_support_solutions,
    low_weight_codewords,
    sliding_block,
    sliding_generator,
    sliding_parity,
    syndrome,
)
from convisd.errors import DimensionMismatch, NoParityCheck, NotDelayFree, TooLarge
from convisd.polymat import PolyMatrix
from oracles import all_codewords, naive_field

GF2 = get_field(2)


def code_of(entries, q=2, parity=True):
    return ConvCode.from_generator(PolyMatrix.from_entries(get_field(q), entries), with_parity=parity)


RATE_HALF = [[[1, 1, 1], [1, 0, 1]]]


@st.composite
def delay_free_codes(draw, qs=(2, 3, 4)):
    q = draw(st.sampled_from(qs))
    gf = get_field(q)
    k = draw(st.integers(1, 2))
    n = draw(st.integers(k + 1, 4))
    memory = draw(st.integers(0, 3))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    from convisd.algebra import rank

    while True:
        coeffs = gf.random((memory + 1, k, n), rng)
        if rank(gf, coeffs[0]) == k and (memory == 0 or coeffs[-1].any()):
            return ConvCode.from_generator(PolyMatrix(gf, coeffs, shape=(k, n)))


def test_encode_example():
    code = code_of(RATE_HALF)
    c = encode(code, PolyVector(GF2, [[1]]))
    assert c.coeffs.tolist() == [[1, 1], [1, 0], [1, 1]]
    assert c.weight == 5


def test_encode_rejects_wrong_message_size():
    with pytest.raises(DimensionMismatch):
        encode(code_of(RATE_HALF), PolyVector(GF2, [[1, 0]]))


@given(delay_free_codes(), st.integers(0, 2**32 - 1))
def test_encode_is_linear_and_matches_direct_product(code, seed):
    gf = code.field
    rng = np.random.default_rng(seed)
    a = PolyVector(gf, gf.random((4, code.k), rng))
    b = PolyVector(gf, gf.random((4, code.k), rng))
    assert encode(code, a + b) == encode(code, a) + encode(code, b)
    # direct coefficient convolution
    c = encode(code, a)
    for t in range(c.length):
        acc = np.zeros(code.n, dtype=np.int64)
        for j in range(code.memory + 1):
            if 0 <= t - j < a.length:
                acc = gf.add(acc, gf.matmul(a.coeff(t - j), code.coeff(j)))
        assert np.array_equal(c.coeff(t), acc)


@given(delay_free_codes(), st.integers(0, 2**32 - 1))
def test_codewords_have_zero_syndrome(code, seed):
    if code.parity is None:
        return
    gf = code.field
    m = PolyVector(gf, gf.random((5, code.k), np.random.default_rng(seed)))
    assert not syndrome(code, encode(code, m)).coeffs.any()


def test_code_properties():
    code = code_of(RATE_HALF)
    assert (code.n, code.k, code.memory) == (2, 1, 2)
    assert code.delay_free and code.full_rank
    assert code.degree == 2
    assert compute_degree(code_of([[[1], [0, 1]], [[], [1, 0, 1]]])) == 2
    assert compute_degree(code_of([[[1], [0, 1]], [[0, 1], [1, 0, 1]]])) == 0
    assert not code_of([[[0, 1], [0, 1, 1]]]).delay_free


def test_compute_degree_budget():
    with pytest.raises(TooLarge):
        compute_degree(code_of(RATE_HALF), budget=1)


def test_column_distances_example():
    code = code_of(RATE_HALF)
    assert column_distance(code, 0) == 2
    assert column_distance(code, 1) == 3
    assert column_distance(code, 2) == 3
    assert column_distance(code, 4) == 4


def _column_distance_oracle(code, gamma):
    gf = code.field
    F = naive_field(gf)
    best = None
    for msg in product(range(gf.q), repeat=code.k * (gamma + 1)):
        m = np.array(msg).reshape(gamma + 1, code.k)
        if not m[0].any():
            continue
        c = encode(code, PolyVector(gf, m))
        w = weight(c.coeffs[: gamma + 1])
        best = w if best is None else min(best, w)
    assert F.q == gf.q
    return best


@given(delay_free_codes(qs=(2, 3)), st.integers(0, 2))
def test_column_distance_matches_enumeration(code, gamma):
    if code.field.q ** (code.k * (gamma + 1)) > 3000:
        return
    assert column_distance(code, gamma) == _column_distance_oracle(code, gamma)


@given(delay_free_codes(qs=(2,)), st.integers(0, 3))
def test_column_distance_is_nondecreasing(code, gamma):
    if 2 ** (code.k * (gamma + 2)) > 5000:
        return
    assert column_distance(code, gamma) <= column_distance(code, gamma + 1)


def test_column_distance_needs_delay_free():
    with pytest.raises(NotDelayFree):
        column_distance(code_of([[[0, 1], [0, 1, 1]]]), 1)
    with pytest.raises(TooLarge):
        column_distance(code_of(RATE_HALF), 30, budget=100)


def test_sliding_generator_example():
    code = code_of(RATE_HALF)
    g1 = sliding_generator(code, 1, 1)
    assert g1.tolist() == [[1, 1, 0, 0], [1, 0, 1, 1]]
    g0 = sliding_generator(code, 1, 0)
    assert g0.tolist() == [[1, 1, 1, 0], [0, 0, 1, 1]]
    assert not sliding_generator(code, 1, 2).any()


def test_sliding_parity_example():
    code = ConvCode(
        PolyMatrix.from_entries(GF2, [[[1], [0, 1]]]),
        PolyMatrix.from_entries(GF2, [[[0, 1], [1]]]),
    )
    assert sliding_parity(code, 1).tolist() == [[0, 1, 0, 0], [1, 0, 0, 1]]
    with pytest.raises(NoParityCheck):
        sliding_parity(code_of(RATE_HALF, parity=False), 1)


@given(delay_free_codes(), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_block_equations_hold(code, gamma, seed):
    """Each window of a codeword is the sum of block messages times sliding generators."""
    gf = code.field
    block = sliding_block(code, gamma)
    s = 4
    m = PolyVector(gf, gf.random((s * (gamma + 1), code.k), np.random.default_rng(seed)))
    c_blocks = encode(code, m).blocks(gamma, s + len(block.residuals))
    m_blocks = m.blocks(gamma, s)
    for j in range(s):
        acc = np.zeros(block.N, dtype=np.int64)
        for i in range(j + 1):
            acc = gf.add(acc, gf.matmul(m_blocks[j - i], block.residual(i)))
        assert np.array_equal(acc, c_blocks[j])


@given(delay_free_codes(), st.integers(0, 3))
def test_sliding_parity_annihilates_window_generator(code, gamma):
    if code.parity is None:
        return
    block = sliding_block(code, gamma)
    gf = code.field
    assert not gf.matmul(block.g0, block.h0.T).any()
    assert block.N == code.n * (gamma + 1) and block.K == code.k * (gamma + 1)
    assert len(block.residuals) == -(-(code.memory + 1) // (gamma + 1))


def test_low_weight_codewords_example():
    block = sliding_block(code_of(RATE_HALF), 2)
    words = low_weight_codewords(block, 4)
    assert [c.tolist() for c, _ in words] == [
        [0, 0, 0, 0, 1, 1],
        [0, 0, 1, 1, 0, 1],
        [0, 0, 1, 1, 1, 0],
        [1, 1, 1, 0, 0, 0],
        [1, 1, 0, 1, 0, 1],
        [1, 1, 0, 1, 1, 0],
    ]
    for c, m in words:
        assert np.array_equal(GF2.matmul(m, block.g0), c)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_low_weight_codewords_match_enumeration(q):
    gf = get_field(q)
    F = naive_field(gf)
    rng = np.random.default_rng(q)
    for _ in range(6):
        g = gf.random((3, 7), rng)
        words = block_codewords_up_to(gf, g, 3)
        expected = sorted(
            (c for c in all_codewords(F, g) if 0 < sum(1 for x in c if x) <= 3),
            key=lambda c: (sum(1 for x in c if x), c),
        )
        assert [tuple(int(x) for x in c) for c, _ in words] == expected


def test_low_weight_budget():
    block = sliding_block(code_of(RATE_HALF), 20)
    with pytest.raises(TooLarge):
        low_weight_codewords(block, 10, budget=1000)


def test_exact_support_solutions():
    gf = get_field(3)
    h = np.array([[1, 1, 0], [0, 1, 1]])
    sols = exact_support_solutions(gf, h, [0, 1, 2], np.array([0, 0]))
    assert [s.tolist() for s in sols] == [[1, 2, 1], [2, 1, 2]]
    assert exact_support_solutions(gf, h, [], np.array([1, 0])) == []


def test_polyvector_blocks_and_json():
    v = PolyVector(GF2, [[1, 0], [0, 1], [1, 1]])
    assert v.blocks(1).tolist() == [[1, 0, 0, 1], [1, 1, 0, 0]]
    assert PolyVector.from_blocks(GF2, v.blocks(1), 2) == v
    assert PolyVector.from_json(GF2, v.to_json(), 2) == v
    assert v.degree == 2 and v.weight == 4
    assert PolyVector.zeros(GF2, 3).degree == -1
    with pytest.raises(DimensionMismatch):
        v.padded(1)


def test_convcode_json_roundtrip():
    code = code_of([[[1], [0, 1]], [[0, 1], [1, 0, 1]]], q=4)
    back = ConvCode.from_json(code.to_json())
    assert back.generator == code.generator and back.field is code.field


def test_sliding_block_without_parity_uses_nullspace():
    code = code_of(RATE_HALF, parity=False)
    block = sliding_block(code, 1)
    assert block.h0 is None
    h = block.parity_matrix()
    assert h.shape == (2, 4) and not GF2.matmul(block.g0, h.T).any()
    assert isinstance(block, SlidingBlockCode)
