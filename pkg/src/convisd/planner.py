"""Closed-form analytics for parameter selection.

Combinatorial quantities are exact ``Fraction`` values; floats appear only
where an exponential or logarithm is involved.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .errors import NonPositiveInput, WeightTooLarge

GRID_Q = 64
GRID_N = 62


@dataclass(frozen=True)
class BlockProfile:
    q: int
    N: int
    K: int
    s: int
    t_e: int
    epsilon: int
    t_override: int | None = None

    @property
    def t(self) -> int:
        if self.t_override is not None:
            return self.t_override
        return -(-self.t_e // self.s)

    @property
    def w_max(self) -> int:
        return self.t + self.epsilon


def weight_enumerator(q: int, N: int, w_max: int) -> list[int]:
    """Number of words of each weight ``0..min(w_max, N)`` in F_q^N."""
    return [(q - 1) ** w * comb(N, w) for w in range(min(w_max, N) + 1)]


def _truncated_mul(a: Sequence[int], b: Sequence[int], cap: int) -> list[int]:
    out = [0] * min(len(a) + len(b) - 1, cap + 1)
    for i, x in enumerate(a):
        if not x or i > cap:
            continue
        for j, y in enumerate(b[: cap + 1 - i]):
            out[i + j] += x * y
    return out


def exceedance_count(q: int, block_sizes: Sequence[int], w_max: int, t_e: int) -> int:
    """Number of weight-``t_e`` words with every block weight at most ``w_max``."""
    acc = [1]
    for n in block_sizes:
        acc = _truncated_mul(acc, weight_enumerator(q, n, w_max), t_e)
    return acc[t_e] if t_e < len(acc) else 0


def block_probability_for_sizes(q: int, block_sizes: Sequence[int], t_e: int, w_max: int) -> Fraction:
    """P[every block weight <= w_max] for a uniform weight-``t_e`` error over the blocks."""
    total = sum(block_sizes)
    if t_e > total or t_e < 0:
        raise ValueError(f"weight {t_e} does not fit in {total} positions")
    good = exceedance_count(q, block_sizes, w_max, t_e)
    return Fraction(good, (q - 1) ** t_e * comb(total, t_e))


def block_weight_probability(p: BlockProfile) -> Fraction:
    """Probability that a uniform weight-``t_e`` error has all ``s`` block weights <= t + epsilon."""
    if p.t_e > p.s * p.w_max:
        return Fraction(0)
    return block_probability_for_sizes(p.q, [p.N] * p.s, p.t_e, p.w_max)


def tail_bound(N: int, s: int, t: int, epsilon: int) -> float:
    """Union bound ``s exp(-2 alpha (epsilon + 1))`` with ``alpha = (epsilon + 1) / (s t)``, clamped to 1."""
    if epsilon < 0 or s * t < 1:
        raise ValueError("need epsilon >= 0 and s*t >= 1")
    alpha = (epsilon + 1) / (s * t)
    return min(1.0, s * math.exp(-2 * alpha * (epsilon + 1)))


def workfactor(N: int, K: int, w: int) -> Fraction:
    """Expected Prange iterations ``C(N, w) / C(N-K, w)``."""
    if w > N - K:
        raise WeightTooLarge(f"w={w} exceeds N-K={N - K}")
    return Fraction(comb(N, w), comb(N - K, w))


def workfactor_ratio(N: int, K: int, t: int, epsilon: int) -> Fraction:
    return workfactor(N, K, t + epsilon) / workfactor(N, K, t)


def workfactor_ratio_product(N: int, K: int, t: int, epsilon: int) -> Fraction:
    """Same ratio via the telescoped product of ``(N-t-j)/(N-K-t-j)``."""
    if t + epsilon > N - K:
        raise WeightTooLarge(f"w={t + epsilon} exceeds N-K={N - K}")
    out = Fraction(1)
    for j in range(epsilon):
        out *= Fraction(N - t - j, N - K - t - j)
    return out


def success_probability(N: int, K: int, w: int, W: int, s: int) -> float:
    """Lower bound ``(1 - (1 - 1/WF_w)^W)^s`` on finding a weight-w error at all s steps."""
    if W < 1 or s < 1:
        raise ValueError("W and s must be >= 1")
    p = 1 / workfactor(N, K, w)
    if p == 1:
        return 1.0
    miss = math.exp(W * math.log1p(-float(p)))
    return math.exp(s * math.log1p(-miss)) if miss < 1 else 0.0


def iterations_for_target(N: int, K: int, w: int, s: int, target: float) -> int:
    """Smallest W with ``success_probability(N, K, w, W, s) >= target``."""
    if not 0 < target < 1:
        raise ValueError("target must lie strictly between 0 and 1")
    p = float(1 / workfactor(N, K, w))
    if p >= 1:
        return 1
    # closed-form guess, then a local monotone correction for rounding
    per_step = math.exp(math.log(target) / s)
    guess = math.log1p(-per_step) / math.log1p(-p) if per_step < 1 else 1.0
    W = max(1, math.ceil(guess) if math.isfinite(guess) else 1)
    while W > 1 and success_probability(N, K, w, W - 1, s) >= target:
        W -= 1
    while success_probability(N, K, w, W, s) < target:
        W += 1
    return W


def expected_solutions(q: int, N: int, K: int, t: int, epsilon: int) -> float:
    """``1 + sum_{w <= t+eps} (q-1)^w C(N, w) / q^(N-K)``."""
    if t + epsilon > N:
        raise ValueError("t + epsilon exceeds N")
    return float(1 + Fraction(sum(weight_enumerator(q, N, t + epsilon)), q ** (N - K)))


def _c(n: int, r: int) -> int:
    return comb(n, r) if 0 <= r <= n and n >= 0 else 0


def lost_probability(q: int, N: int, t_e: int, t_c: int) -> Fraction:
    """P[wt(e + c) == wt(e)] for fixed e of weight t_e and uniform c of weight t_c."""
    if q < 2 or t_c < 1 or t_e < 0:
        raise ValueError("need q >= 2, t_c >= 1, t_e >= 0")
    total = Fraction(0)
    for z in range(t_c // 2 + 1):
        num = _c(t_e, z) * _c(N - t_e, z) * _c(t_e - z, t_c - 2 * z) * (q - 2) ** (t_c - 2 * z)
        if num:
            total += Fraction(num, _c(N, t_c) * (q - 1) ** (t_c - z))
    return total


def time_to_bits(seconds: float, clock_ghz: float = 3.4) -> float:
    """``log2(cycles * 8 * 64)`` for a running time on a machine of the given clock."""
    if seconds <= 0 or clock_ghz <= 0:
        raise NonPositiveInput("seconds and clock must be positive")
    return math.log2(clock_ghz * 1e9 * seconds * 8 * 64)


# ---------------------------------------------------------------------------
# tables


def fmt(x) -> str:
    return format(float(x), ".15g")


def epsilon_probability_rows(q, N, s, t_e, epsilons: Iterable[int]) -> list[tuple[int, Fraction]]:
    return [(e, block_weight_probability(BlockProfile(q, N, 0, s, t_e, e))) for e in epsilons]


def epsilon_ratio_rows(N, K, t, epsilons: Iterable[int]) -> list[tuple[int, Fraction]]:
    return [(e, workfactor_ratio(N, K, t, e)) for e in epsilons]


def lost_table(q=GRID_Q, N=GRID_N, t_es=range(1, 6), t_cs=range(1, 4)) -> list[tuple[int, int, Fraction]]:
    return [(te, tc, lost_probability(q, N, te, tc)) for tc in t_cs for te in t_es]


def to_csv(header: str, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header.split(","))
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (Fraction, float)) else x for x in row])
    return buf.getvalue()


def probability_csv(rows) -> str:
    return to_csv("epsilon,probability", rows)


def ratio_csv(rows) -> str:
    return to_csv("epsilon,wf_ratio", rows)


def lost_csv(rows) -> str:
    return to_csv("te,tc,prob", rows)
