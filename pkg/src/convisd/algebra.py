"""Finite fields F_q and dense linear algebra over them.

Field elements are plain integers ``0..q-1``. For a prime ``q`` they are
residues; for ``q = p**m`` the integer's base-``p`` digits are the
coefficients of a polynomial in ``x`` reduced modulo a fixed primitive
polynomial. Matrices and vectors are numpy ``int64`` arrays; the field is
always passed explicitly.

GF(2) elimination runs on Python-int bitsets, which is an order of
magnitude faster than vectorised numpy row operations at the sizes used by
the attack (a few hundred columns).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np

from .errors import IndexOutOfRange, NoSolution, SizeMismatch

# Conventional primitive polynomials over F_2 (bit i = coefficient of x^i).
_BINARY_PRIMITIVE = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}

MAX_Q = 1 << 16


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"field size must be >= 2, got {q}")
    p = next(d for d in range(2, q + 1) if q % d == 0)
    m, rest = 0, q
    while rest % p == 0:
        rest //= p
        m += 1
    if rest != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, m


def _digits(a: int, p: int, m: int) -> list[int]:
    out = []
    for _ in range(m):
        a, d = divmod(a, p)
        out.append(d)
    return out


def _times_x(a: int, p: int, m: int, low: list[int]) -> int:
    """Multiply the element encoded by ``a`` by ``x`` modulo ``x^m + low``."""
    d = _digits(a, p, m)
    top = d[-1]
    shifted = [0] + d[:-1]
    if top:
        shifted = [(c - top * f) % p for c, f in zip(shifted, low)]
    return sum(c * p**i for i, c in enumerate(shifted))


def _exp_table(p: int, m: int, low: list[int]) -> np.ndarray | None:
    """Powers of ``x``; ``None`` when ``x`` is not a generator."""
    q = p**m
    table = np.empty(q - 1, dtype=np.int64)
    a = 1
    for i in range(q - 1):
        if i and a == 1:
            return None
        table[i] = a
        a = _times_x(a, p, m, low)
    return table if a == 1 else None


def _find_modulus(p: int, m: int) -> tuple[list[int], np.ndarray]:
    if p == 2 and m in _BINARY_PRIMITIVE:
        low = _digits(_BINARY_PRIMITIVE[m], 2, m)
        table = _exp_table(p, m, low)
        if table is not None:
            return low, table
    # Smallest monic primitive polynomial, lexicographic on (c_0, ..., c_{m-1}) read high to low.
    for coeffs in product(range(p), repeat=m):
        low = list(reversed(coeffs))
        if low[0] == 0:
            continue
        table = _exp_table(p, m, low)
        if table is not None:
            return low, table
    raise ValueError(f"no primitive polynomial found for p={p}, m={m}")


class GF:
    """The finite field with ``q`` elements (q a prime power, q <= 2^16).

    Use :func:`get_field` to obtain shared instances.
    """

    def __init__(self, q: int):
        if q > MAX_Q:
            raise ValueError(f"field size {q} exceeds supported maximum {MAX_Q}")
        p, m = _factor_prime_power(q)
        self.q, self.p, self.m = q, p, m
        self.modulus: list[int] | None = None
        if m == 1:
            self._inv = np.array([0] + [pow(a, p - 2, p) for a in range(1, p)], dtype=np.int64)
        else:
            low, exp = _find_modulus(p, m)
            # monic modulus x^m + sum low_i x^i, stored low to high including the leading 1
            self.modulus = [int(c) for c in low] + [1]
            self._exp = exp
            self._log = np.zeros(q, dtype=np.int64)
            self._log[exp] = np.arange(q - 1)
            self._pw = p ** np.arange(m, dtype=np.int64)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))

    def metadata(self) -> dict:
        """Description of the element encoding, for reports."""
        return {
            "q": self.q,
            "p": self.p,
            "m": self.m,
            "modulus": self.modulus,
            "encoding": "residue" if self.m == 1 else "polynomial-basis digits base p, low degree first",
        }

    # -- elementwise arithmetic -------------------------------------------------

    def add(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.m == 1:
            return (a + b) % self.p
        da = (a[..., None] // self._pw) % self.p
        db = (b[..., None] // self._pw) % self.p
        return (((da + db) % self.p) * self._pw).sum(axis=-1)

    def neg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.m == 1:
            return (-a) % self.p
        da = (a[..., None] // self._pw) % self.p
        return (((-da) % self.p) * self._pw).sum(axis=-1)

    def sub(self, a, b):
        if self.p == 2:
            return self.add(a, b)
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a * b) % self.p
        r = self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        if self.m == 1:
            return self._inv[a]
        return self._exp[(-self._log[a]) % (self.q - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def sum(self, a, axis=None):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        if self.m == 1:
            return np.sum(a, axis=axis) % self.p
        d = (a[..., None] // self._pw) % self.p
        ax = axis if axis is None or axis >= 0 else axis - 1
        if ax is None:
            d = d.reshape(-1, self.m)
            ax = 0
        return ((np.sum(d, axis=ax) % self.p) * self._pw).sum(axis=-1)

    def matmul(self, a, b):
        a, b = np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)
        if self.m == 1:
            return (a @ b) % self.p
        vec_a, vec_b = a.ndim == 1, b.ndim == 1
        a2 = a[None, :] if vec_a else a
        b2 = b[:, None] if vec_b else b
        out = np.zeros((a2.shape[0], b2.shape[1]), dtype=np.int64)
        for i in range(a2.shape[1]):
            out = self.add(out, self.mul(a2[:, i : i + 1], b2[i : i + 1, :]))
        if vec_a and vec_b:
            return out[0, 0]
        if vec_a:
            return out[0]
        if vec_b:
            return out[:, 0]
        return out

    def random(self, shape, rng: np.random.Generator, nonzero: bool = False):
        if nonzero:
            return rng.integers(1, self.q, size=shape, dtype=np.int64)
        return rng.integers(0, self.q, size=shape, dtype=np.int64)


@lru_cache(maxsize=None)
def get_field(q: int) -> GF:
    return GF(q)


def weight(v) -> int:
    """Hamming weight of a vector (or of all entries of an array)."""
    return int(np.count_nonzero(v))


# -- GF(2) bitset helpers -------------------------------------------------------


def pack_bits(row) -> int:
    """Pack a 0/1 vector into an int, bit i holding entry i."""
    row = np.asarray(row, dtype=np.uint8)
    if row.size == 0:
        return 0
    return int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little")


def unpack_bits(x: int, width: int) -> np.ndarray:
    if width == 0:
        return np.zeros(0, dtype=np.int64)
    nbytes = (width + 7) // 8
    bits = np.unpackbits(np.frombuffer(x.to_bytes(nbytes, "little"), dtype=np.uint8), bitorder="little")
    return bits[:width].astype(np.int64)


def _rref_bits(rows: list[int], ncols: int) -> tuple[list[int], list[int]]:
    """In-place Gauss-Jordan on bitset rows; pivots searched in columns < ncols."""
    pivots = []
    r = 0
    nrows = len(rows)
    for c in range(ncols):
        if r == nrows:
            break
        bit = 1 << c
        for i in range(r, nrows):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        prow = rows[r]
        for j in range(nrows):
            if j != r and rows[j] & bit:
                rows[j] ^= prow
        pivots.append(c)
        r += 1
    return rows, pivots


# -- dense linear algebra --------------------------------------------------------


def rref(gf: GF, m) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Reduced row echelon form with the transform that produces it.

    Returns ``(reduced, transform, pivots)`` with ``transform @ m == reduced``
    over the field and ``pivots`` the pivot columns in increasing order.
    """
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2:
        raise ValueError("rref expects a 2-d matrix")
    rows, cols = m.shape
    if rows == 0:
        return m.copy(), np.zeros((0, 0), dtype=np.int64), []
    if gf.q == 2:
        packed = [pack_bits(m[i]) | (1 << (cols + i)) for i in range(rows)]
        packed, pivots = _rref_bits(packed, cols)
        full = np.array([unpack_bits(x, cols + rows) for x in packed], dtype=np.int64)
        return full[:, :cols], full[:, cols:], pivots

    work = np.concatenate([m % gf.q, np.eye(rows, dtype=np.int64)], axis=1)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(work[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            work[[r, i]] = work[[i, r]]
        work[r] = gf.mul(work[r], gf.inv(work[r, c]))
        col = work[:, c].copy()
        col[r] = 0
        others = np.flatnonzero(col)
        if others.size:
            work[others] = gf.sub(work[others], gf.mul(col[others, None], work[r][None, :]))
        pivots.append(c)
        r += 1
    return work[:, :cols], work[:, cols:], pivots


def rank(gf: GF, m) -> int:
    m = np.asarray(m, dtype=np.int64)
    if m.size == 0:
        return 0
    if gf.q == 2:
        _, pivots = _rref_bits([pack_bits(r) for r in m], m.shape[1])
        return len(pivots)
    return len(rref(gf, m)[2])


def solve_left(gf: GF, a, b) -> np.ndarray:
    """Solve ``x @ a == b`` for a row vector ``x``.

    Free variables are set to zero. Raises :class:`NoSolution` when ``b`` is
    not in the row space of ``a``.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    k, n = a.shape
    if b.shape != (n,):
        raise SizeMismatch(f"right-hand side has shape {b.shape}, expected ({n},)")
    aug = np.concatenate([a.T, b[:, None]], axis=1)
    if gf.q == 2:
        packed, pivots = _rref_bits([pack_bits(r) for r in aug], k + 1)
        if pivots and pivots[-1] == k:
            raise NoSolution("vector is not in the row space")
        x = np.zeros(k, dtype=np.int64)
        top = 1 << k
        for row, c in zip(packed, pivots):
            x[c] = 1 if row & top else 0
        return x
    reduced, _, pivots = rref(gf, aug)
    if pivots and pivots[-1] == k:
        raise NoSolution("vector is not in the row space")
    x = np.zeros(k, dtype=np.int64)
    for i, c in enumerate(pivots):
        x[c] = reduced[i, k]
    return x


def nullspace(gf: GF, a) -> np.ndarray:
    """Basis (as rows) of ``{x : a @ x == 0}``."""
    a = np.asarray(a, dtype=np.int64)
    rows, cols = a.shape
    reduced, _, pivots = rref(gf, a)
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = gf.neg(reduced[r, f])
    return basis


def inverse(gf: GF, m) -> np.ndarray:
    m = np.asarray(m, dtype=np.int64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise SizeMismatch("inverse needs a square matrix")
    _, transform, pivots = rref(gf, m)
    if len(pivots) != m.shape[0]:
        raise NoSolution("matrix is singular")
    return transform


def submatrix_columns(m, idx) -> np.ndarray:
    """Columns of ``m`` indexed by ``idx``, in increasing column order."""
    m = np.asarray(m)
    cols = sorted(int(i) for i in idx)
    if len(set(cols)) != len(cols):
        raise SizeMismatch("column indices must be distinct")
    if cols and (cols[0] < 0 or cols[-1] >= m.shape[1]):
        raise IndexOutOfRange(f"column index out of range for {m.shape[1]} columns")
    return m[:, cols]


def is_information_set(gf: GF, g, idx) -> bool:
    g = np.asarray(g, dtype=np.int64)
    idx = list(idx)
    if len(idx) != g.shape[0]:
        raise SizeMismatch(f"information set must have {g.shape[0]} elements, got {len(idx)}")
    return rank(gf, submatrix_columns(g, idx)) == g.shape[0]
