"""Polynomial matrices over F_q[z].

A :class:`PolyMatrix` stores its coefficient matrices as one array of shape
``(degree + 1, rows, cols)``; index ``i`` along the first axis is the
coefficient of ``z**i``. Trailing zero coefficients are always stripped, so
the zero matrix has an empty first axis and ``degree == -1``.

Hermite forms are computed by Euclidean column reduction. Every column
operation is mirrored on a running unimodular transform and, inverted, on
its inverse, so the supercode factorization comes for free.
"""

from __future__ import annotations

import numpy as np

from .algebra import GF, get_field, rank
from .errors import DimensionMismatch, NotLeftPrime, NotSquare, RankDeficient

# -- scalar polynomials (1-d coefficient arrays, low degree first) -------------------


def ptrim(a: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(a)
    return a[: nz[-1] + 1] if nz.size else a[:0]


def pdeg(a: np.ndarray) -> int:
    return len(a) - 1


def padd(gf: GF, a, b) -> np.ndarray:
    n = max(len(a), len(b))
    out = np.zeros(n, dtype=np.int64)
    out[: len(a)] = a
    out[: len(b)] = gf.add(out[: len(b)], b)
    return ptrim(out)


def psub(gf: GF, a, b) -> np.ndarray:
    return padd(gf, a, gf.neg(b))


def pmul(gf: GF, a, b) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if gf.m == 1:
        return ptrim(np.convolve(a, b) % gf.p)
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for i in np.flatnonzero(a):
        seg = out[i : i + len(b)]
        out[i : i + len(b)] = gf.add(seg, gf.mul(a[i], b))
    return ptrim(out)


def pdivmod(gf: GF, a, b) -> tuple[np.ndarray, np.ndarray]:
    if len(b) == 0:
        raise ZeroDivisionError("polynomial division by zero")
    r = np.array(a, dtype=np.int64)
    db = pdeg(b)
    if pdeg(r) < db:
        return np.zeros(0, dtype=np.int64), ptrim(r)
    quot = np.zeros(pdeg(r) - db + 1, dtype=np.int64)
    lead_inv = gf.inv(b[-1])
    for i in range(pdeg(r) - db, -1, -1):
        c = r[i + db]
        if c:
            f = gf.mul(c, lead_inv)
            quot[i] = f
            r[i : i + db + 1] = gf.sub(r[i : i + db + 1], gf.mul(f, b))
    return ptrim(quot), ptrim(r[:db])


def pscale(gf: GF, a, c) -> np.ndarray:
    return ptrim(gf.mul(a, c))


# -- polynomial matrices ---------------------------------------------------------


class PolyMatrix:
    """Matrix over F_q[z] in coefficient-matrix representation."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: GF | int, coeffs, shape: tuple[int, int] | None = None):
        self.field = get_field(field) if isinstance(field, int) else field
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.size == 0:
            if shape is None:
                if arr.ndim != 3:
                    raise ValueError("shape is required for an empty coefficient list")
                shape = arr.shape[1:]
            arr = np.zeros((0, *shape), dtype=np.int64)
        if arr.ndim != 3:
            raise ValueError("coefficients must have shape (degree+1, rows, cols)")
        if np.any(arr < 0) or np.any(arr >= self.field.q):
            raise ValueError("coefficient outside the field")
        nz = np.flatnonzero(arr.reshape(arr.shape[0], arr.shape[1] * arr.shape[2]).any(axis=1))
        self.coeffs = arr[: nz[-1] + 1] if nz.size else arr[:0]

    # construction helpers

    @classmethod
    def zeros(cls, field, rows: int, cols: int) -> PolyMatrix:
        return cls(field, np.zeros((0, rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, field, n: int) -> PolyMatrix:
        return cls(field, np.eye(n, dtype=np.int64)[None])

    @classmethod
    def constant(cls, field, m) -> PolyMatrix:
        return cls(field, np.asarray(m, dtype=np.int64)[None])

    @classmethod
    def from_entries(cls, field, entries) -> PolyMatrix:
        """Build from a nested list ``entries[i][j]`` of coefficient lists."""
        gf = get_field(field) if isinstance(field, int) else field
        rows, cols = len(entries), len(entries[0])
        deg = max((len(e) for row in entries for e in row), default=0)
        arr = np.zeros((deg, rows, cols), dtype=np.int64)
        for i, row in enumerate(entries):
            if len(row) != cols:
                raise DimensionMismatch("ragged entries")
            for j, e in enumerate(row):
                arr[: len(e), i, j] = e
        return cls(gf, arr, shape=(rows, cols))

    def entries(self) -> list[list[np.ndarray]]:
        r, c = self.shape
        return [[ptrim(self.coeffs[:, i, j].copy()) for j in range(c)] for i in range(r)]

    # basic properties

    @property
    def shape(self) -> tuple[int, int]:
        return self.coeffs.shape[1], self.coeffs.shape[2]

    @property
    def rows(self) -> int:
        return self.coeffs.shape[1]

    @property
    def cols(self) -> int:
        return self.coeffs.shape[2]

    @property
    def degree(self) -> int:
        """Largest exponent with a nonzero coefficient; ``-1`` marks the zero matrix."""
        return self.coeffs.shape[0] - 1

    @property
    def is_zero(self) -> bool:
        return self.coeffs.shape[0] == 0

    def coeff(self, i: int) -> np.ndarray:
        """Coefficient matrix of ``z**i`` (zero outside the stored range)."""
        if 0 <= i < self.coeffs.shape[0]:
            return self.coeffs[i]
        return np.zeros(self.shape, dtype=np.int64)

    def at_zero(self) -> np.ndarray:
        return self.coeff(0)

    @property
    def T(self) -> PolyMatrix:
        return PolyMatrix(self.field, self.coeffs.transpose(0, 2, 1), shape=self.shape[::-1])

    def rows_slice(self, sl) -> PolyMatrix:
        sub = self.coeffs[:, sl, :]
        return PolyMatrix(self.field, sub, shape=sub.shape[1:])

    def cols_slice(self, sl) -> PolyMatrix:
        sub = self.coeffs[:, :, sl]
        return PolyMatrix(self.field, sub, shape=sub.shape[1:])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PolyMatrix)
            and self.field == other.field
            and self.shape == other.shape
            and np.array_equal(self.coeffs, other.coeffs)
        )

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        return poly_mul(self, other)

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} + {other.shape}")
        d = max(self.coeffs.shape[0], other.coeffs.shape[0])
        a = np.zeros((d, *self.shape), dtype=np.int64)
        a[: self.coeffs.shape[0]] = self.coeffs
        a[: other.coeffs.shape[0]] = self.field.add(a[: other.coeffs.shape[0]], other.coeffs)
        return PolyMatrix(self.field, a, shape=self.shape)

    def __repr__(self) -> str:
        return f"PolyMatrix(q={self.field.q}, shape={self.shape}, degree={self.degree})"

    def pretty(self) -> str:
        def fmt(p):
            if len(p) == 0:
                return "0"
            terms = []
            for i, c in enumerate(p):
                if c:
                    mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                    coef = str(c) if (c != 1 or i == 0) else ""
                    terms.append(coef + mono)
            return "+".join(terms)

        return "\n".join("[" + ", ".join(fmt(p) for p in row) + "]" for row in self.entries())


def _from_entry_lists(gf: GF, ents, rows: int, cols: int) -> PolyMatrix:
    deg = max((len(e) for row in ents for e in row), default=0)
    arr = np.zeros((deg, rows, cols), dtype=np.int64)
    for i in range(rows):
        for j in range(cols):
            e = ents[i][j]
            arr[: len(e), i, j] = e
    return PolyMatrix(gf, arr, shape=(rows, cols))


def poly_mul(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Product over F_q[z] (convolution of the coefficient matrices)."""
    if a.field != b.field:
        raise DimensionMismatch("operands live over different fields")
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    gf = a.field
    shape = (a.rows, b.cols)
    if a.is_zero or b.is_zero:
        return PolyMatrix.zeros(gf, *shape)
    da, db = a.coeffs.shape[0], b.coeffs.shape[0]
    out = np.zeros((da + db - 1, *shape), dtype=np.int64)
    if gf.m == 1:
        for i in range(da):
            out[i : i + db] += np.matmul(a.coeffs[i], b.coeffs)
        out %= gf.p
    else:
        for i in range(da):
            for j in range(db):
                out[i + j] = gf.add(out[i + j], gf.matmul(a.coeffs[i], b.coeffs[j]))
    return PolyMatrix(gf, out, shape=shape)


# -- column reduction -------------------------------------------------------------


class _Reducer:
    """Euclidean column reduction of ``g`` with transform tracking.

    Maintains ``g_work == g @ u`` and ``u @ u_inv == I`` throughout.
    """

    def __init__(self, g: PolyMatrix, track: bool = True):
        self.gf = g.field
        self.k, self.n = g.shape
        self.g = g.entries()
        self.track = track
        empty = np.zeros(0, dtype=np.int64)
        one = np.ones(1, dtype=np.int64)
        if track:
            self.u = [[one if i == j else empty for j in range(self.n)] for i in range(self.n)]
            self.u_inv = [[one if i == j else empty for j in range(self.n)] for i in range(self.n)]
        self.det_u = 1  # product of the unit factors introduced so far

    def swap(self, i: int, j: int):
        if i == j:
            return
        for row in self.g:
            row[i], row[j] = row[j], row[i]
        if self.track:
            for row in self.u:
                row[i], row[j] = row[j], row[i]
            self.u_inv[i], self.u_inv[j] = self.u_inv[j], self.u_inv[i]
        self.det_u = int(self.gf.neg(self.det_u))

    def scale(self, i: int, c: int):
        gf = self.gf
        for row in self.g:
            row[i] = pscale(gf, row[i], c)
        if self.track:
            for row in self.u:
                row[i] = pscale(gf, row[i], c)
            ci = int(gf.inv(c))
            self.u_inv[i] = [pscale(gf, p, ci) for p in self.u_inv[i]]
        self.det_u = int(gf.mul(self.det_u, c))

    def axpy(self, j: int, f: np.ndarray, i: int):
        """column_j -= f * column_i (and the matching inverse row update)."""
        gf = self.gf
        for row in self.g:
            if len(row[i]):
                row[j] = psub(gf, row[j], pmul(gf, f, row[i]))
        if self.track:
            for row in self.u:
                if len(row[i]):
                    row[j] = psub(gf, row[j], pmul(gf, f, row[i]))
            # u_inv row_i += f * row_j
            ri, rj = self.u_inv[i], self.u_inv[j]
            self.u_inv[i] = [padd(gf, a, pmul(gf, f, b)) if len(b) else a for a, b in zip(ri, rj)]

    def run(self, strict: bool) -> list[int | None]:
        """Reduce row by row; returns the pivot column of each row (None if none)."""
        gf = self.gf
        pivots: list[int | None] = []
        pc = 0
        for r in range(self.k):
            row = self.g[r]
            while True:
                live = [j for j in range(pc, self.n) if len(row[j])]
                if not live:
                    break
                best = min(live, key=lambda j: (pdeg(row[j]), j))
                self.swap(pc, best)
                rest = [j for j in range(pc + 1, self.n) if len(row[j])]
                if not rest:
                    break
                for j in rest:
                    quo, _ = pdivmod(gf, row[j], row[pc])
                    self.axpy(j, quo, pc)
            if pc >= self.n or not len(row[pc]):
                if strict:
                    raise RankDeficient(f"row {r} is dependent on the rows above it")
                pivots.append(None)
                continue
            lead = int(row[pc][-1])
            if lead != 1:
                self.scale(pc, int(gf.inv(lead)))
            for j in range(pc):
                if len(row[j]) and pdeg(row[j]) >= pdeg(row[pc]):
                    quo, _ = pdivmod(gf, row[j], row[pc])
                    self.axpy(j, quo, pc)
            pivots.append(pc)
            pc += 1
        return pivots


def row_hermite_form(g: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
    """Row Hermite form ``h = g @ u`` with ``u`` unimodular.

    ``h`` is lower triangular in its first ``k`` columns and zero beyond, with
    monic diagonal entries that strictly dominate the degrees to their left.
    """
    h, u, _ = _hermite(g)
    return h, u


def _hermite(g: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix, PolyMatrix]:
    k, n = g.shape
    if k > n:
        raise RankDeficient(f"{k} rows cannot have full row rank in {n} columns")
    red = _Reducer(g)
    red.run(strict=True)
    gf = g.field
    return (
        _from_entry_lists(gf, red.g, k, n),
        _from_entry_lists(gf, red.u, n, n),
        _from_entry_lists(gf, red.u_inv, n, n),
    )


def poly_rank(g: PolyMatrix) -> int:
    """Rank over the rational function field F_q(z)."""
    red = _Reducer(g, track=False)
    return sum(p is not None for p in red.run(strict=False))


def determinant(u: PolyMatrix) -> np.ndarray:
    """Determinant as a scalar polynomial coefficient array."""
    if u.rows != u.cols:
        raise NotSquare(f"determinant of a {u.shape} matrix")
    gf = u.field
    if u.rows == 0:
        return np.ones(1, dtype=np.int64)
    red = _Reducer(u, track=False)
    pivots = red.run(strict=False)
    if any(p is None for p in pivots):
        return np.zeros(0, dtype=np.int64)
    det = np.ones(1, dtype=np.int64)
    for i in range(u.rows):
        det = pmul(gf, det, red.g[i][i])
    return pscale(gf, det, int(gf.inv(red.det_u)))


def is_unimodular(u: PolyMatrix) -> bool:
    if u.rows != u.cols:
        raise NotSquare(f"unimodularity of a {u.shape} matrix")
    d = determinant(u)
    return len(d) == 1


def is_left_prime(g: PolyMatrix) -> bool:
    """True iff the row Hermite form is ``(I_k | 0)``."""
    h, _ = row_hermite_form(g)
    k = g.rows
    target = np.zeros((1, k, g.cols), dtype=np.int64)
    target[0, :, :k] = np.eye(k, dtype=np.int64)
    return np.array_equal(h.coeffs, target)


def parity_check(g: PolyMatrix) -> PolyMatrix:
    """Left-prime ``H(z)`` with ``H @ g.T == 0`` and ``H(0)`` of full rank."""
    k, n = g.shape
    h, u, _ = _hermite(g)
    if not _is_identity_form(h):
        raise NotLeftPrime("generator is not left prime; use supercode_factorization")
    par = u.cols_slice(slice(k, n)).T
    if rank(g.field, par.at_zero()) != n - k:
        # Unreachable for a left-prime H; kept as a hard guard.
        raise NotLeftPrime("parity check has a rank-deficient constant term")
    return par


def supercode_factorization(g: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
    """Split ``g = l @ u1`` with ``u1`` left prime.

    ``u1`` generates the smallest non-catastrophic code containing the code
    of ``g``. For a left-prime ``g`` this returns ``(I, g)``.
    """
    k, n = g.shape
    h, _, u_inv = _hermite(g)
    if _is_identity_form(h):
        return PolyMatrix.identity(g.field, k), g
    return h.cols_slice(slice(0, k)), u_inv.rows_slice(slice(0, k))


def _is_identity_form(h: PolyMatrix) -> bool:
    k = h.rows
    return h.degree == 0 and np.array_equal(h.coeffs[0][:, :k], np.eye(k, dtype=np.int64)) and not h.coeffs[0][:, k:].any()
