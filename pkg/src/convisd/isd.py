"""Prange information-set decoding with a fixed iteration budget.

Instead of stopping at the first low-weight error, :func:`prange_collect`
runs a fixed number of iterations and keeps every distinct error of weight
at most ``w_max`` in discovery order. Over GF(2) the eliminations run on
int bitsets; systematic forms are cached per information set because the
sequential attack decodes many residuals against the same block generator.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from . import algebra
from .algebra import GF, pack_bits, unpack_bits, weight
from .convcode import _enumeration_cost, _support_search
from .errors import NoSolution, RankDeficient, SizeMismatch, TooLarge

_CACHE_LIMIT = 200_000


@dataclass(frozen=True)
class IsdConfig:
    w_max: int
    iterations: int = 1
    seed: int = 0
    dedup: bool = True
    exhaustive: bool = False

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.w_max < 0:
            raise ValueError("w_max must be >= 0")


class SolutionList:
    """Discovery-ordered (error, message) pairs with optional deduplication."""

    def __init__(self, dedup: bool = True):
        self.dedup = dedup
        self.entries: list[tuple[np.ndarray, np.ndarray]] = []
        self._seen: set[bytes] = set()

    def append(self, error: np.ndarray, message: np.ndarray) -> bool:
        key = np.asarray(error, dtype=np.int64).tobytes()
        if self.dedup and key in self._seen:
            return False
        self._seen.add(key)
        self.entries.append((error, message))
        return True

    def __contains__(self, error) -> bool:
        return np.asarray(error, dtype=np.int64).tobytes() in self._seen

    def position(self, error) -> int | None:
        """1-based position of ``error`` in the list, or None."""
        key = np.asarray(error, dtype=np.int64).tobytes()
        if key not in self._seen:
            return None
        for i, (e, _) in enumerate(self.entries):
            if e.tobytes() == key:
                return i + 1
        return None

    def errors(self) -> list[np.ndarray]:
        return [e for e, _ in self.entries]

    def error_set(self) -> set[tuple[int, ...]]:
        return {tuple(int(x) for x in e) for e, _ in self.entries}

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __bool__(self) -> bool:
        return bool(self.entries)


class Outcome(NamedTuple):
    subset: tuple[int, ...]
    info_set: bool
    error: np.ndarray | None
    message: np.ndarray | None


class Prange:
    """Prange iterations against a fixed full-rank generator ``g0``."""

    def __init__(self, gf: GF, g0):
        self.gf = gf
        self.g0 = np.asarray(g0, dtype=np.int64)
        self.K, self.N = self.g0.shape
        if algebra.rank(gf, self.g0) != self.K:
            raise RankDeficient("generator of the block code must have full row rank")
        self._cache: dict[tuple[int, ...], object] = {}
        if gf.q == 2:
            self._rows = [pack_bits(self.g0[i]) | (1 << (self.N + i)) for i in range(self.K)]
            self._mask = (1 << self.N) - 1

    # -- per information set preprocessing --

    def _systematic(self, subset: tuple[int, ...]):
        hit = self._cache.get(subset, self)
        if hit is not self:
            return hit
        form = self._systematic_gf2(subset) if self.gf.q == 2 else self._systematic_generic(subset)
        if len(self._cache) >= _CACHE_LIMIT:
            self._cache.clear()
        self._cache[subset] = form
        return form

    def _systematic_gf2(self, subset):
        rows = list(self._rows)
        K = self.K
        for r, c in enumerate(subset):
            bit = 1 << c
            for i in range(r, K):
                if rows[i] & bit:
                    break
            else:
                return None
            rows[r], rows[i] = rows[i], rows[r]
            prow = rows[r]
            for j in range(K):
                if j != r and rows[j] & bit:
                    rows[j] ^= prow
        return rows

    def _systematic_generic(self, subset):
        gi = self.g0[:, list(subset)]
        try:
            return algebra.inverse(self.gf, gi)
        except NoSolution:
            return None

    # -- random information sets --

    def draw(self, rng: np.random.Generator):
        """Greedy information set: first K independent columns of a random column order.

        Returns ``(subset, form)`` with ``subset[i]`` the pivot column of row ``i``.
        """
        perm = rng.permutation(self.N)
        if self.gf.q == 2:
            rows = list(self._rows)
            K = self.K
            subset = []
            r = 0
            for c in perm.tolist():
                bit = 1 << c
                for i in range(r, K):
                    if rows[i] & bit:
                        break
                else:
                    continue
                rows[r], rows[i] = rows[i], rows[r]
                prow = rows[r]
                for j in range(K):
                    if j != r and rows[j] & bit:
                        rows[j] ^= prow
                subset.append(c)
                r += 1
                if r == K:
                    break
            return tuple(subset), rows
        _, transform, pivots = algebra.rref(self.gf, self.g0[:, perm])
        return tuple(int(perm[p]) for p in pivots), transform

    # -- decoding --

    def decode(self, received, subset: tuple[int, ...], form=None) -> Outcome:
        """One Prange step for a size-K subset (uses ``form`` from :meth:`draw` if given)."""
        if form is None:
            form = self._systematic(subset)
        if form is None:
            return Outcome(subset, False, None, None)
        gf = self.gf
        if gf.q == 2:
            r = received if isinstance(received, int) else pack_bits(received)
            acc = 0
            for i, c in enumerate(subset):
                if (r >> c) & 1:
                    acc ^= form[i]
            e = r ^ (acc & self._mask)
            return Outcome(subset, True, e, acc >> self.N)
        received = np.asarray(received, dtype=np.int64)
        m = gf.matmul(received[list(subset)], form)
        e = gf.sub(received, gf.matmul(m, self.g0))
        return Outcome(subset, True, e, m)

    def _steps(self, r, cfg: IsdConfig, rng):
        if cfg.exhaustive:
            for subset in combinations(range(self.N), self.K):
                yield self.decode(r, subset)
            return
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.iterations):
            subset, form = self.draw(rng)
            yield self.decode(r, subset, form)

    def _as_arrays(self, out: Outcome) -> Outcome:
        if out.info_set and self.gf.q == 2:
            return Outcome(out.subset, True, unpack_bits(out.error, self.N), unpack_bits(out.message, self.K))
        return out

    def iterate(self, received, subsets: Iterable[tuple[int, ...]]) -> Iterator[Outcome]:
        """Yield one outcome per given subset, with errors/messages as arrays."""
        r = pack_bits(received) if self.gf.q == 2 else np.asarray(received, dtype=np.int64)
        for subset in subsets:
            yield self._as_arrays(self.decode(r, subset))

    def sample(self, received, cfg: IsdConfig, rng: np.random.Generator | None = None) -> Iterator[Outcome]:
        """Yield the raw outcome of every iteration :meth:`collect` would run."""
        r = pack_bits(received) if self.gf.q == 2 else np.asarray(received, dtype=np.int64)
        for out in self._steps(r, cfg, rng):
            yield self._as_arrays(out)

    def collect(self, received, cfg: IsdConfig, rng: np.random.Generator | None = None) -> SolutionList:
        received = np.asarray(received, dtype=np.int64)
        if received.shape != (self.N,):
            raise SizeMismatch(f"received word has shape {received.shape}, expected ({self.N},)")
        out = SolutionList(cfg.dedup)
        if self.gf.q == 2:
            r = pack_bits(received)
            seen: set[int] = set()
            for res in self._steps(r, cfg, rng):
                if not res.info_set or res.error.bit_count() > cfg.w_max:
                    continue
                if cfg.dedup and res.error in seen:
                    continue
                seen.add(res.error)
                out.append(unpack_bits(res.error, self.N), unpack_bits(res.message, self.K))
            return out
        for res in self._steps(received, cfg, rng):
            if res.info_set and weight(res.error) <= cfg.w_max:
                out.append(res.error, res.message)
        return out


def prange_collect(gf: GF, g0, received, cfg: IsdConfig) -> SolutionList:
    """Run ``cfg.iterations`` Prange rounds (or every K-subset in exhaustive mode).

    Each random round pivots on a random column order, so it always lands on
    an information set; in exhaustive mode subsets that are not information
    sets are skipped.
    """
    return Prange(gf, g0).collect(received, cfg)


def brute_force_decode(gf: GF, g0, received, w_max: int, budget: int = 10**7, parity=None) -> SolutionList:
    """Every error of weight <= ``w_max`` leaving a codeword, sorted by (weight, lex)."""
    g0 = np.asarray(g0, dtype=np.int64)
    received = np.asarray(received, dtype=np.int64)
    K, N = g0.shape
    if _enumeration_cost(gf.q, N, w_max) > budget:
        raise TooLarge(f"brute force over weight <= {w_max} in length {N} exceeds the budget {budget}")
    h = algebra.nullspace(gf, g0) if parity is None else np.asarray(parity, dtype=np.int64)
    syndrome = gf.matmul(h, received)
    errors = _support_search(gf, h, syndrome, w_max)
    errors.sort(key=lambda e: (weight(e), tuple(e)))
    out = SolutionList()
    for e in errors:
        out.append(e, algebra.solve_left(gf, g0, gf.sub(received, e)))
    return out


def augment_low_weight(gf: GF, solutions: SolutionList, lows, w_max: int) -> SolutionList:
    """Append ``e' + c`` for every listed ``e'`` and low-weight codeword ``c``.

    New entries go to the tail in (original order, then ``lows`` order). The
    message paired with ``e' + c`` is ``m' - m_c``.
    """
    out = SolutionList(solutions.dedup)
    for e, m in solutions:
        out.append(e, m)
    if not lows:
        return out
    for e, m in solutions.entries:
        for c, mc in lows:
            x = gf.add(e, c)
            if weight(x) <= w_max and x.tobytes() not in out._seen:
                out.append(x, gf.sub(m, mc))
    return out
