from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, strategies as st

from convisd import algebra
from convisd.algebra import GF, get_field, pack_bits, unpack_bits, weight
from convisd.errors import IndexOutOfRange, NoSolution, SizeMismatch
from oracles import naive_field, naive_rank

FIELDS = [2, 3, 4, 5, 7, 8, 9, 16, 25, 27, 64, 256]


@pytest.mark.parametrize("q", FIELDS)
def test_tables_match_schoolbook_arithmetic(q):
    gf = get_field(q)
    F = naive_field(gf)
    a, b = np.meshgrid(np.arange(q), np.arange(q))
    a, b = a.ravel(), b.ravel()
    if q > 64:
        pick = np.random.default_rng(q).choice(a.size, 3000, replace=False)
        a, b = a[pick], b[pick]
    mul, add = gf.mul(a, b), gf.add(a, b)
    for x, y, m, s in zip(a.tolist(), b.tolist(), mul.tolist(), add.tolist()):
        assert m == F.mul(x, y)
        assert s == F.add(x, y)


@pytest.mark.parametrize("q", FIELDS)
def test_field_axioms(q):
    gf = get_field(q)
    x = np.arange(q)
    nz = x[1:]
    assert np.all(gf.mul(nz, gf.inv(nz)) == 1)
    assert np.all(gf.add(x, gf.neg(x)) == 0)
    assert np.all(gf.sub(x, x) == 0)
    assert np.all(gf.div(nz, nz) == 1)
    # the multiplicative group is cyclic of order q - 1
    assert len(set(gf.mul(nz, nz).tolist())) <= q - 1
    with pytest.raises(ZeroDivisionError):
        gf.inv(0)


@given(st.sampled_from([2, 3, 4, 8, 9, 16]), st.data())
def test_distributive_and_associative(q, data):
    gf = get_field(q)
    a, b, c = (data.draw(st.integers(0, q - 1)) for _ in range(3))
    assert gf.mul(a, gf.add(b, c)) == gf.add(gf.mul(a, b), gf.mul(a, c))
    assert gf.mul(a, gf.mul(b, c)) == gf.mul(gf.mul(a, b), c)
    assert gf.add(a, gf.add(b, c)) == gf.add(gf.add(a, b), c)


def test_invalid_field_sizes():
    for q in (0, 1, 6, 12, 100):
        with pytest.raises(ValueError):
            GF(q)
    with pytest.raises(ValueError):
        GF(1 << 17)


def test_field_metadata():
    meta = get_field(64).metadata()
    assert meta["q"] == 64 and meta["p"] == 2 and meta["m"] == 6
    assert meta["modulus"][-1] == 1 and len(meta["modulus"]) == 7
    assert get_field(7).metadata()["modulus"] is None


def test_field_cache_shares_instances():
    assert get_field(8) is get_field(8)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200))
def test_pack_roundtrip(bits):
    row = np.array(bits)
    assert np.array_equal(unpack_bits(pack_bits(row), len(bits)), row)


def test_weight():
    assert weight(np.array([0, 3, 0, 1])) == 2
    assert weight(np.zeros(5)) == 0


def _random_matrix(gf, rows, cols, rng, rank=None):
    m = gf.random((rows, cols), rng)
    if rank is not None:
        a = gf.random((rows, rank), rng)
        b = gf.random((rank, cols), rng)
        m = gf.matmul(a, b)
    return m


@pytest.mark.parametrize("q", [2, 3, 4, 7, 8, 9, 64])
def test_rank_matches_oracle(q):
    gf = get_field(q)
    F = naive_field(gf)
    rng = np.random.default_rng(q)
    for trial in range(25):
        rows, cols = rng.integers(1, 7, size=2)
        r = int(rng.integers(0, min(rows, cols) + 1))
        m = _random_matrix(gf, rows, cols, rng, rank=r if trial % 2 else None)
        assert algebra.rank(gf, m) == naive_rank(F, m)


@pytest.mark.parametrize("q", [2, 3, 4, 64])
def test_rref_transform_and_form(q):
    gf = get_field(q)
    rng = np.random.default_rng(7 + q)
    for _ in range(20):
        m = gf.random((int(rng.integers(1, 6)), int(rng.integers(1, 9))), rng)
        reduced, transform, pivots = algebra.rref(gf, m)
        assert np.array_equal(gf.matmul(transform, m), reduced)
        assert algebra.rank(gf, transform) == m.shape[0]
        for r, c in enumerate(pivots):
            col = np.zeros(m.shape[0], dtype=np.int64)
            col[r] = 1
            assert np.array_equal(reduced[:, c], col)
        assert not reduced[len(pivots):].any()
        assert pivots == sorted(pivots)


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_solve_left(q):
    gf = get_field(q)
    rng = np.random.default_rng(q)
    for _ in range(30):
        k, n = int(rng.integers(1, 5)), int(rng.integers(4, 9))
        a = gf.random((k, n), rng)
        x = gf.random(k, rng)
        b = gf.matmul(x, a)
        sol = algebra.solve_left(gf, a, b)
        assert np.array_equal(gf.matmul(sol, a), b)


def test_solve_left_no_solution_and_shape():
    gf = get_field(2)
    a = np.array([[1, 0, 0], [0, 1, 0]])
    with pytest.raises(NoSolution):
        algebra.solve_left(gf, a, np.array([0, 0, 1]))
    with pytest.raises(SizeMismatch):
        algebra.solve_left(gf, a, np.array([1, 0]))


@pytest.mark.parametrize("q", [2, 3, 4, 64])
def test_nullspace_dimension_and_kernel(q):
    gf = get_field(q)
    rng = np.random.default_rng(q + 1)
    for _ in range(20):
        a = gf.random((int(rng.integers(1, 5)), int(rng.integers(2, 8))), rng)
        ns = algebra.nullspace(gf, a)
        assert ns.shape[0] == a.shape[1] - algebra.rank(gf, a)
        if ns.size:
            assert not gf.matmul(a, ns.T).any()
            assert algebra.rank(gf, ns) == ns.shape[0]


@pytest.mark.parametrize("q", [2, 5, 8])
def test_inverse(q):
    gf = get_field(q)
    rng = np.random.default_rng(q)
    done = 0
    while done < 10:
        m = gf.random((4, 4), rng)
        if algebra.rank(gf, m) < 4:
            with pytest.raises(NoSolution):
                algebra.inverse(gf, m)
            continue
        inv = algebra.inverse(gf, m)
        assert np.array_equal(gf.matmul(m, inv), np.eye(4, dtype=np.int64))
        done += 1


def test_submatrix_columns():
    m = np.arange(12).reshape(3, 4)
    assert np.array_equal(algebra.submatrix_columns(m, [3, 1]), m[:, [1, 3]])
    with pytest.raises(IndexOutOfRange):
        algebra.submatrix_columns(m, [4])
    with pytest.raises(SizeMismatch):
        algebra.submatrix_columns(m, [1, 1])


def test_information_set():
    gf = get_field(2)
    g = np.array([[1, 0, 1, 1], [0, 1, 1, 0]])
    assert algebra.is_information_set(gf, g, [0, 1])
    assert algebra.is_information_set(gf, g, [1, 2])
    assert not algebra.is_information_set(gf, g, [0, 3])
    with pytest.raises(SizeMismatch):
        algebra.is_information_set(gf, g, [0])


def test_sum_and_matmul_consistency():
    for q in (2, 3, 4, 9):
        gf = get_field(q)
        rng = np.random.default_rng(q)
        a, b = gf.random((3, 5), rng), gf.random((5, 2), rng)
        F = naive_field(gf)
        out = gf.matmul(a, b)
        for i in range(3):
            for j in range(2):
                acc = 0
                for t in range(5):
                    acc = F.add(acc, F.mul(int(a[i, t]), int(b[t, j])))
                assert out[i, j] == acc
        assert np.array_equal(gf.sum(a, axis=0), gf.matmul(np.ones((1, 3), dtype=np.int64), a)[0])
