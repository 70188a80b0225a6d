"""Convolutional codes, their sliding block views, and small enumerations."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from itertools import combinations, product
from math import comb

import numpy as np

from . import algebra
from .algebra import GF, get_field, pack_bits, weight
from .errors import DimensionMismatch, NoParityCheck, NotLeftPrime, NotDelayFree, TooLarge
from .polymat import PolyMatrix, determinant, parity_check, poly_rank, row_hermite_form

DEFAULT_BUDGET = 10**7


class PolyVector:
    """Row vector over F_q[z] stored as a ``(length, n)`` coefficient array.

    The stored length is kept as given (including trailing zero coefficients)
    so that serialisation round-trips exactly.
    """

    __slots__ = ("field", "coeffs")

    def __init__(self, field: GF | int, coeffs, n: int | None = None):
        self.field = get_field(field) if isinstance(field, int) else field
        arr = np.asarray(coeffs, dtype=np.int64)
        if arr.size == 0:
            if n is None and arr.ndim == 2:
                n = arr.shape[1]
            if n is None:
                raise ValueError("n is required for an empty PolyVector")
            arr = np.zeros((0, n), dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("PolyVector coefficients must be 2-d (length, n)")
        self.coeffs = arr

    @classmethod
    def zeros(cls, field, n: int, length: int = 0) -> PolyVector:
        return cls(field, np.zeros((length, n), dtype=np.int64), n=n)

    @classmethod
    def from_flat(cls, field, flat, n: int) -> PolyVector:
        flat = np.asarray(flat, dtype=np.int64)
        if flat.size % n:
            raise DimensionMismatch(f"flat length {flat.size} is not a multiple of {n}")
        return cls(field, flat.reshape(-1, n), n=n)

    @property
    def n(self) -> int:
        return self.coeffs.shape[1]

    @property
    def length(self) -> int:
        return self.coeffs.shape[0]

    @property
    def weight(self) -> int:
        return weight(self.coeffs)

    @property
    def degree(self) -> int:
        nz = np.flatnonzero(self.coeffs.any(axis=1))
        return int(nz[-1]) if nz.size else -1

    def coeff(self, i: int) -> np.ndarray:
        if 0 <= i < self.length:
            return self.coeffs[i]
        return np.zeros(self.n, dtype=np.int64)

    def padded(self, length: int) -> PolyVector:
        if length < self.length:
            if self.coeffs[length:].any():
                raise DimensionMismatch(f"cannot truncate a vector of degree {self.degree} to {length} coefficients")
            return PolyVector(self.field, self.coeffs[:length], n=self.n)
        out = np.zeros((length, self.n), dtype=np.int64)
        out[: self.length] = self.coeffs
        return PolyVector(self.field, out, n=self.n)

    def trimmed(self) -> PolyVector:
        return PolyVector(self.field, self.coeffs[: self.degree + 1], n=self.n)

    def flat(self) -> np.ndarray:
        return self.coeffs.reshape(-1)

    def blocks(self, gamma: int, s: int | None = None) -> np.ndarray:
        """Split into ``s`` blocks of ``gamma + 1`` coefficients, zero padded."""
        step = gamma + 1
        if s is None:
            s = max(1, -(-max(self.degree + 1, 1) // step))
        return self.padded(s * step).coeffs.reshape(s, step * self.n)

    @classmethod
    def from_blocks(cls, field, blocks, n: int) -> PolyVector:
        return cls.from_flat(field, np.asarray(blocks).reshape(-1), n)

    def __add__(self, other: PolyVector) -> PolyVector:
        L = max(self.length, other.length)
        return PolyVector(self.field, self.field.add(self.padded(L).coeffs, other.padded(L).coeffs), n=self.n)

    def __sub__(self, other: PolyVector) -> PolyVector:
        L = max(self.length, other.length)
        return PolyVector(self.field, self.field.sub(self.padded(L).coeffs, other.padded(L).coeffs), n=self.n)

    def __eq__(self, other) -> bool:
        """Equality as polynomial vectors (trailing zero coefficients ignored)."""
        if not isinstance(other, PolyVector) or other.n != self.n or other.field != self.field:
            return False
        L = max(self.length, other.length)
        return np.array_equal(self.padded(L).coeffs, other.padded(L).coeffs)

    def __repr__(self) -> str:
        return f"PolyVector(q={self.field.q}, n={self.n}, length={self.length}, weight={self.weight})"

    def to_json(self) -> list:
        return self.coeffs.tolist()

    @classmethod
    def from_json(cls, field, data, n: int) -> PolyVector:
        return cls(field, np.asarray(data, dtype=np.int64).reshape(-1, n), n=n)


@dataclass(frozen=True, eq=False)
class ConvCode:
    """An (n, k) convolutional code given by a generator matrix.

    ``parity`` is present only for left-prime generators (non-catastrophic
    codes); use :meth:`from_generator` to fill it in automatically.
    """

    generator: PolyMatrix
    parity: PolyMatrix | None = None

    def __post_init__(self):
        k, n = self.generator.shape
        if k > n:
            raise DimensionMismatch(f"k={k} exceeds n={n}")
        if self.parity is not None and self.parity.shape != (n - k, n):
            raise DimensionMismatch(f"parity check has shape {self.parity.shape}, expected {(n - k, n)}")

    @classmethod
    def from_generator(cls, g: PolyMatrix, with_parity: bool = True) -> ConvCode:
        if not with_parity:
            return cls(g)
        try:
            return cls(g, parity_check(g))
        except NotLeftPrime:
            return cls(g)

    @property
    def field(self) -> GF:
        return self.generator.field

    @property
    def n(self) -> int:
        return self.generator.cols

    @property
    def k(self) -> int:
        return self.generator.rows

    @property
    def memory(self) -> int:
        return max(self.generator.degree, 0)

    @cached_property
    def delay_free(self) -> bool:
        return algebra.rank(self.field, self.generator.at_zero()) == self.k

    @cached_property
    def full_rank(self) -> bool:
        return self.delay_free or poly_rank(self.generator) == self.k

    @cached_property
    def degree(self) -> int:
        return compute_degree(self)

    @cached_property
    def hermite(self) -> tuple[PolyMatrix, PolyMatrix]:
        """``(h, u)`` with ``h = G u`` in row Hermite form."""
        return row_hermite_form(self.generator)

    def coeff(self, i: int) -> np.ndarray:
        return self.generator.coeff(i)

    def to_json(self) -> dict:
        g = self.generator
        return {"q": self.field.q, "n": self.n, "k": self.k, "coeffs": g.coeffs.tolist()}

    @classmethod
    def from_json(cls, data: dict, with_parity: bool = True) -> ConvCode:
        q, n, k = int(data["q"]), int(data["n"]), int(data["k"])
        coeffs = np.asarray(data["coeffs"], dtype=np.int64).reshape(-1, k, n)
        g = PolyMatrix(get_field(q), coeffs, shape=(k, n))
        if g.coeffs.shape[0] != coeffs.shape[0]:
            raise ValueError("trailing zero coefficient matrices are not canonical")
        return cls.from_generator(g, with_parity=with_parity)


@dataclass(eq=False)
class SlidingBlockCode:
    """Window view of a convolutional code: the [N, K] code generated by ``g0``."""

    field: GF
    n: int
    k: int
    gamma: int
    g0: np.ndarray
    residuals: list[np.ndarray]
    h0: np.ndarray | None = None
    _parity: np.ndarray | None = dc_field(default=None, repr=False)

    @property
    def N(self) -> int:
        return self.n * (self.gamma + 1)

    @property
    def K(self) -> int:
        return self.k * (self.gamma + 1)

    def residual(self, i: int) -> np.ndarray:
        """``G~_i``; ``g0`` for ``i == 0`` and zero past the stored range."""
        if i == 0:
            return self.g0
        if 1 <= i <= len(self.residuals):
            return self.residuals[i - 1]
        return np.zeros((self.K, self.N), dtype=np.int64)

    def parity_matrix(self) -> np.ndarray:
        """A parity-check matrix of the block code (``h0`` if known)."""
        if self.h0 is not None:
            return self.h0
        if self._parity is None:
            self._parity = algebra.nullspace(self.field, self.g0)
        return self._parity


def poly_vec_mul(gf: GF, vec: np.ndarray, mat: np.ndarray) -> np.ndarray:
    """Coefficients of ``v(z) M(z)`` for ``vec`` of shape (L, a) and ``mat`` of shape (d, a, b)."""
    L, d = vec.shape[0], mat.shape[0]
    if L == 0 or d == 0:
        return np.zeros((0, mat.shape[2]), dtype=np.int64)
    out = np.zeros((L + d - 1, mat.shape[2]), dtype=np.int64)
    if gf.m == 1:
        for j in range(d):
            out[j : j + L] += vec @ mat[j]
        return out % gf.p
    for j in range(d):
        out[j : j + L] = gf.add(out[j : j + L], gf.matmul(vec, mat[j]))
    return out


def encode(code: ConvCode, message: PolyVector) -> PolyVector:
    """``c(z) = m(z) G(z)``; the result has ``message.length + memory`` coefficients."""
    if message.n != code.k:
        raise DimensionMismatch(f"message has {message.n} components, code expects {code.k}")
    gf = code.field
    L = message.length
    if L == 0 or code.generator.is_zero:
        return PolyVector.zeros(gf, code.n, max(L + code.memory, 0))
    return PolyVector(gf, poly_vec_mul(gf, message.coeffs, code.generator.coeffs), n=code.n)


def syndrome(code: ConvCode, word: PolyVector) -> PolyVector:
    """``H(z) w(z)^T`` as a row vector; zero iff ``w`` is a codeword."""
    if code.parity is None:
        raise NoParityCheck("code has no parity-check matrix")
    ht = code.parity.coeffs.transpose(0, 2, 1)
    return PolyVector(code.field, poly_vec_mul(code.field, word.coeffs, ht), n=code.n - code.k)


def sliding_generator(code: ConvCode, gamma: int, i: int) -> np.ndarray:
    """``G~^gamma_i``: block ``(r, c)`` is ``G_{i(gamma+1) + c - r}`` (zero outside ``0..memory``)."""
    if gamma < 0 or i < 0:
        raise ValueError("gamma and i must be non-negative")
    k, n = code.k, code.n
    out = np.zeros((k * (gamma + 1), n * (gamma + 1)), dtype=np.int64)
    g = code.generator
    for r in range(gamma + 1):
        for c in range(gamma + 1):
            idx = i * (gamma + 1) + c - r
            if 0 <= idx <= g.degree:
                out[r * k : (r + 1) * k, c * n : (c + 1) * n] = g.coeffs[idx]
    return out


def sliding_parity(code: ConvCode, gamma: int) -> np.ndarray:
    """Lower block-triangular ``H~^gamma_0`` with ``H_0`` on the diagonal."""
    if code.parity is None:
        raise NoParityCheck("code has no parity-check matrix (catastrophic or not computed)")
    h = code.parity
    r_, n = h.shape
    out = np.zeros((r_ * (gamma + 1), n * (gamma + 1)), dtype=np.int64)
    for r in range(gamma + 1):
        for c in range(r + 1):
            out[r * r_ : (r + 1) * r_, c * n : (c + 1) * n] = h.coeff(r - c)
    return out


def sliding_block(code: ConvCode, gamma: int) -> SlidingBlockCode:
    count = -(-(code.memory + 1) // (gamma + 1))
    return SlidingBlockCode(
        field=code.field,
        n=code.n,
        k=code.k,
        gamma=gamma,
        g0=sliding_generator(code, gamma, 0),
        residuals=[sliding_generator(code, gamma, i) for i in range(1, count + 1)],
        h0=sliding_parity(code, gamma) if code.parity is not None else None,
    )


def _iter_messages(q: int, K: int, chunk: int = 1 << 14):
    """All vectors of F_q^K in lexicographic order, as row chunks."""
    total = q**K
    digits = q ** np.arange(K - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield (idx[:, None] // digits) % q


def column_distance(code: ConvCode, gamma: int, budget: int = DEFAULT_BUDGET) -> int:
    """Minimum weight of ``(m_0..m_gamma) G~_0`` over messages with ``m_0 != 0``."""
    if not code.delay_free:
        raise NotDelayFree("column distance via the sliding generator needs a delay-free code")
    gf, k = code.field, code.k
    K = k * (gamma + 1)
    if gf.q**K > budget:
        raise TooLarge(f"{gf.q}^{K} messages exceed the budget {budget}")
    g0 = sliding_generator(code, gamma, 0)
    best = None
    for msgs in _iter_messages(gf.q, K):
        msgs = msgs[msgs[:, :k].any(axis=1)]
        if not len(msgs):
            continue
        w = np.count_nonzero(gf.matmul(msgs, g0), axis=1).min()
        best = int(w) if best is None else min(best, int(w))
    return best


def compute_degree(code: ConvCode, budget: int = 10**5) -> int:
    """Degree of the code: the largest degree of a full-size minor of the generator."""
    k, n = code.k, code.n
    if comb(n, k) > budget:
        raise TooLarge(f"C({n},{k}) minors exceed the budget {budget}")
    best = -1
    for cols in combinations(range(n), k):
        d = determinant(code.generator.cols_slice(list(cols)))
        best = max(best, len(d) - 1)
    return best


def _enumeration_cost(q: int, N: int, w_max: int) -> int:
    return sum(comb(N, w) * (q - 1) ** w for w in range(w_max + 1))


def exact_support_solutions(gf: GF, h: np.ndarray, support, target: np.ndarray) -> list[np.ndarray]:
    """All ``x`` with ``supp(x) == support`` and ``h @ x == target``."""
    support = list(support)
    N = h.shape[1]
    w = len(support)
    if w == 0:
        return [np.zeros(N, dtype=np.int64)] if not np.any(target) else []
    hs = h[:, support]
    try:
        part = algebra.solve_left(gf, hs.T, target)
    except algebra.NoSolution:
        return []
    kern = algebra.nullspace(gf, hs)
    out = []
    for coefs in product(range(gf.q), repeat=kern.shape[0]):
        x = part
        if kern.shape[0]:
            x = gf.add(part, gf.sum(gf.mul(np.asarray(coefs)[:, None], kern), axis=0))
        if np.all(x != 0):
            full = np.zeros(N, dtype=np.int64)
            full[support] = x
            out.append(full)
    return out


def low_weight_codewords(block: SlidingBlockCode, w_max: int, budget: int = DEFAULT_BUDGET):
    """All nonzero codewords of weight <= ``w_max`` of the block code, with messages.

    Sorted by (weight, lexicographic).
    """
    return block_codewords_up_to(block.field, block.g0, w_max, budget, parity=block.parity_matrix())


def block_codewords_up_to(gf: GF, g0, w_max: int, budget: int = DEFAULT_BUDGET, parity=None):
    """Nonzero codewords of weight <= ``w_max`` of the code generated by ``g0``.

    Supports are enumerated and checked against a parity-check matrix, so the
    cost depends on N and ``w_max`` but not on the dimension.
    """
    g0 = np.asarray(g0, dtype=np.int64)
    N = g0.shape[1]
    if _enumeration_cost(gf.q, N, w_max) > budget:
        raise TooLarge(f"enumerating weight <= {w_max} words of length {N} exceeds the budget {budget}")
    h = algebra.nullspace(gf, g0) if parity is None else np.asarray(parity, dtype=np.int64)
    words = [c for c in _support_search(gf, h, np.zeros(h.shape[0], dtype=np.int64), w_max) if c.any()]
    words.sort(key=lambda c: (weight(c), tuple(c)))
    return [(c, algebra.solve_left(gf, g0, c)) for c in words]


def _support_search(gf: GF, h: np.ndarray, syndrome: np.ndarray, w_max: int) -> list[np.ndarray]:
    """All vectors of weight <= ``w_max`` with ``h @ x == syndrome``."""
    N = h.shape[1]
    if gf.q == 2:
        return _support_search_gf2(h, syndrome, w_max)
    out = []
    for w in range(0, min(w_max, N) + 1):
        for S in combinations(range(N), w):
            out.extend(exact_support_solutions(gf, h, S, syndrome))
    return out


def _support_search_gf2(h: np.ndarray, syndrome: np.ndarray, w_max: int) -> list[np.ndarray]:
    N = h.shape[1]
    cols = [pack_bits(h[:, j]) for j in range(N)]
    target = pack_bits(syndrome)
    by_value: dict[int, list[int]] = {}
    for j, c in enumerate(cols):
        by_value.setdefault(c, []).append(j)
    out = []
    if target == 0:
        out.append(np.zeros(N, dtype=np.int64))
    for w in range(1, min(w_max, N) + 1):
        for head in combinations(range(N), w - 1):
            acc = target
            for j in head:
                acc ^= cols[j]
            last = head[-1] if head else -1
            for j in by_value.get(acc, ()):
                if j > last:
                    x = np.zeros(N, dtype=np.int64)
                    x[list(head) + [j]] = 1
                    out.append(x)
    return out
