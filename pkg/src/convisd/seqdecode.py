"""Sequential list decoding of a convolutional ciphertext.

The received word is cut into blocks of ``gamma + 1`` time steps. Block ``j``
is decoded in the sliding block code after subtracting the contribution of
the messages already chosen for blocks ``0..j-1``; every candidate error of
the block becomes a branch of a depth-first search.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import algebra
from .algebra import GF, weight
from .convcode import (
    ConvCode,
    PolyVector,
    SlidingBlockCode,
    encode,
    low_weight_codewords,
    poly_vec_mul,
    sliding_block,
    syndrome,
)
from .errors import NoSolution, NotDelayFree, NotInCode
from .isd import IsdConfig, Prange, SolutionList, augment_low_weight
from .planner import time_to_bits
from .polymat import pdivmod, psub, pmul, ptrim

FOUND = "found"
NOT_FOUND = "not_found"
BUDGET_EXCEEDED = "budget_exceeded"


@dataclass(frozen=True)
class AttackParams:
    gamma: int
    t_e: int | None
    epsilon: int
    W: int
    w_low: int = 0
    seed: int = 0
    t: int | None = None
    cheat: bool = False
    max_nodes: int = 10**6
    exhaustive: bool = False
    s: int | None = None
    clock_ghz: float = 3.4

    def __post_init__(self):
        if self.gamma < 0 or self.epsilon < 0 or self.W < 1 or self.w_low < 0:
            raise ValueError("gamma, epsilon, w_low must be >= 0 and W >= 1")
        if self.t_e is None and self.t is None:
            raise ValueError("the per-block weight t is required when t_e is unknown")

    def blocks_for(self, received: PolyVector) -> int:
        step = self.gamma + 1
        need = -(-max(received.length, 1) // step)
        if self.s is None:
            return need
        if self.s < need and received.coeffs[self.s * step :].any():
            raise ValueError(f"s={self.s} blocks do not cover the received word")
        return self.s

    def per_block(self, s: int) -> int:
        if self.t is not None:
            return self.t
        return -(-self.t_e // s)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "t_e": self.t_e,
            "epsilon": self.epsilon,
            "W": self.W,
            "w_low": self.w_low,
            "seed": self.seed,
            "t": self.t,
            "cheat": self.cheat,
            "max_nodes": self.max_nodes,
            "exhaustive": self.exhaustive,
            "s": self.s,
        }


@dataclass
class WorkEstimate:
    positions: list[int | None]
    list_sizes: list[int]
    rank_sum: int
    complete: bool
    isd_seconds: float
    estimated_seconds: float
    bits: float | None

    def to_json(self) -> dict:
        return {
            "positions": ["Missing" if p is None else p for p in self.positions],
            "list_sizes": self.list_sizes,
            "rank_sum": self.rank_sum,
            "complete": self.complete,
        }

    def timing_json(self) -> dict:
        return {"isd_seconds": self.isd_seconds, "estimated_seconds": self.estimated_seconds, "bits": self.bits}


@dataclass
class AttackResult:
    status: str
    error: PolyVector | None
    message: PolyVector | None
    nodes: int
    s: int
    t: int
    nodes_per_depth: list[int]
    branch_list_sizes: list[int]
    seconds: float = 0.0
    isd_seconds: float = 0.0
    estimate: WorkEstimate | None = dc_field(default=None)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "nodes": self.nodes,
            "s": self.s,
            "t": self.t,
            "nodes_per_depth": self.nodes_per_depth,
            "branch_list_sizes": self.branch_list_sizes,
            "error": None if self.error is None else self.error.to_json(),
            "message": None if self.message is None else self.message.to_json(),
        }
        if self.estimate is not None:
            out["estimate"] = self.estimate.to_json()
        return out

    def timing_json(self) -> dict:
        out = {"seconds": self.seconds, "isd_seconds": self.isd_seconds}
        if self.estimate is not None:
            out.update(self.estimate.timing_json())
        return out


# ---------------------------------------------------------------------------
# verification and message recovery


def recover_message(code: ConvCode, codeword: PolyVector) -> PolyVector:
    """The unique ``m`` with ``m G = codeword``; raises NotInCode otherwise.

    Uses the row Hermite form ``G u = (L | 0)``: a word ``c`` is a codeword
    iff ``c u`` vanishes past column ``k`` and ``(c u)[:k]`` is divisible on
    the right by the lower-triangular ``L``.
    """
    gf = code.field
    k, n = code.k, code.n
    if codeword.n != n:
        raise NotInCode(f"word has {codeword.n} components, code length is {n}")
    c = codeword.trimmed()
    if c.length == 0:
        return PolyVector.zeros(gf, k)
    h, u = code.hermite
    y = poly_vec_mul(gf, c.coeffs, u.coeffs) if not u.is_zero else np.zeros((0, n), dtype=np.int64)
    if y[:, k:].any():
        raise NotInCode("word is not in the row space of the generator")
    ent = h.entries()
    ys = [ptrim(y[:, j].copy()) for j in range(k)]
    m: list[np.ndarray] = [np.zeros(0, dtype=np.int64)] * k
    for j in range(k - 1, -1, -1):
        acc = ys[j]
        for i in range(j + 1, k):
            acc = psub(gf, acc, pmul(gf, m[i], ent[i][j]))
        quo, rem = pdivmod(gf, acc, ent[j][j])
        if len(rem):
            raise NotInCode("word is not in the row space of the generator")
        m[j] = quo
    L = max((len(x) for x in m), default=0)
    coeffs = np.zeros((L, k), dtype=np.int64)
    for j, x in enumerate(m):
        coeffs[: len(x), j] = x
    msg = PolyVector(gf, coeffs, n=k)
    if encode(code, msg) != codeword:
        raise NotInCode("recovered message does not reproduce the word")
    return msg


def is_codeword(code: ConvCode, word: PolyVector) -> bool:
    if code.parity is not None:
        return not syndrome(code, word).coeffs.any()
    try:
        recover_message(code, word)
    except NotInCode:
        return False
    return True


def verify(code: ConvCode, received: PolyVector, error: PolyVector) -> bool:
    """True iff ``received - error`` is a codeword of ``code``."""
    if received.n != code.n or error.n != code.n:
        return False
    return is_codeword(code, received - error)


# ---------------------------------------------------------------------------
# the search


class _Decoder:
    """Shared state of one attack: block code, ISD engine, low-weight words."""

    def __init__(self, code: ConvCode, params: AttackParams):
        self.code = code
        self.params = params
        self.gf: GF = code.field
        self.block: SlidingBlockCode = sliding_block(code, params.gamma)
        self.engine = Prange(self.gf, self.block.g0)
        self.lows = low_weight_codewords(self.block, params.w_low) if params.w_low > 0 else []
        self.isd_seconds = 0.0
        self.isd_calls = 0

    def residual(self, r_blocks: np.ndarray, messages: list[np.ndarray], j: int) -> np.ndarray:
        """``r~_j - sum_{i>=1} m~_{j-i} G~_i`` given the chosen block messages."""
        gf = self.gf
        out = r_blocks[j].copy()
        for i in range(1, len(self.block.residuals) + 1):
            if j - i < 0:
                break
            out = gf.sub(out, gf.matmul(messages[j - i], self.block.residual(i)))
        return out

    def candidates(self, residual: np.ndarray, w_max: int, depth: int) -> SolutionList:
        p = self.params
        cfg = IsdConfig(w_max=w_max, iterations=p.W, seed=p.seed, exhaustive=p.exhaustive)
        rng = np.random.default_rng([p.seed, depth])
        t0 = time.perf_counter()
        lst = self.engine.collect(residual, cfg, rng)
        if self.lows:
            lst = augment_low_weight(self.gf, lst, self.lows, w_max)
        self.isd_seconds += time.perf_counter() - t0
        self.isd_calls += 1
        return lst


def _decoding_code(code: ConvCode, supercode: ConvCode | None) -> ConvCode:
    if code.delay_free:
        return code
    if supercode is None:
        raise NotDelayFree("generator is not delay-free; supply a delay-free supercode")
    if not supercode.delay_free:
        raise NotDelayFree("supercode generator is not delay-free")
    if supercode.n != code.n:
        raise ValueError("supercode must have the same length as the code")
    return supercode


def attack(
    code: ConvCode,
    received: PolyVector,
    params: AttackParams,
    supercode: ConvCode | None = None,
    planted: PolyVector | None = None,
) -> AttackResult:
    """Depth-first sequential decoding; returns the first verified decomposition.

    With ``params.cheat`` set, only the branch of the planted error is walked
    and the result carries a :class:`WorkEstimate`.
    """
    t_start = time.perf_counter()
    dec = _Decoder(_decoding_code(code, supercode), params)
    s = params.blocks_for(received)
    t = params.per_block(s)
    if params.cheat:
        if planted is None:
            raise ValueError("cheat mode needs the planted error")
        est, msg = _walk_planted(dec, code, received, planted, params, s, t)
        status = FOUND if est.complete and msg is not None else NOT_FOUND
        return AttackResult(
            status,
            planted if status == FOUND else None,
            msg if status == FOUND else None,
            dec.isd_calls,
            s,
            t,
            [1] * len(est.list_sizes),
            est.list_sizes,
            time.perf_counter() - t_start,
            dec.isd_seconds,
            est,
        )

    gf, n, step = dec.gf, code.n, params.gamma + 1
    r_blocks = received.blocks(params.gamma, s)
    w_max = t + params.epsilon
    t_e = params.t_e
    nodes_per_depth = [0] * s

    def expand(depth, messages):
        nodes_per_depth[depth] += 1
        return dec.candidates(dec.residual(r_blocks, messages, depth), w_max, depth)

    def finish(status, errs=None, msgs=None, sizes=None):
        e = m = None
        if errs is not None:
            e = PolyVector.from_flat(gf, np.concatenate(errs), n)
            m = recover_message(code, received - e)
        return AttackResult(
            status,
            e,
            m,
            dec.isd_calls,
            s,
            t,
            nodes_per_depth,
            sizes or [],
            time.perf_counter() - t_start,
            dec.isd_seconds,
        )

    frames: list[list] = [[expand(0, []), 0]]
    errs: list[np.ndarray] = []
    msgs: list[np.ndarray] = []
    acc = 0
    while frames:
        depth = len(frames) - 1
        frame = frames[-1]
        lst, idx = frame
        if idx >= len(lst):
            frames.pop()
            if errs:
                acc -= weight(errs.pop())
                msgs.pop()
            continue
        frame[1] += 1
        e, m = lst[idx]
        w = weight(e)
        if t_e is not None and acc + w > t_e:
            continue
        errs.append(e)
        msgs.append(m)
        acc += w
        if depth == s - 1:
            if _accept(dec, code, received, errs, msgs, step):
                return finish(FOUND, errs, msgs, [len(f[0]) for f in frames])
        elif dec.isd_calls >= params.max_nodes:
            return finish(BUDGET_EXCEEDED)
        else:
            child = expand(depth + 1, msgs)
            if child:
                frames.append([child, 0])
                continue
        acc -= weight(errs.pop())
        msgs.pop()
    return finish(NOT_FOUND)


def _accept(dec: _Decoder, code: ConvCode, received: PolyVector, errs, msgs, step) -> bool:
    gf = dec.gf
    e = PolyVector.from_flat(gf, np.concatenate(errs), code.n)
    if dec.code is code:
        # the block messages already give a codeword of the window; check the tail too
        m = PolyVector.from_flat(gf, np.concatenate(msgs), code.k)
        if encode(code, m) == received - e:
            return True
    return verify(code, received, e)


def _walk_planted(dec: _Decoder, code, received, planted, params, s, t):
    """Follow the planted branch, recording where each block error appears."""
    gf = dec.gf
    r_blocks = received.blocks(params.gamma, s)
    e_blocks = planted.blocks(params.gamma, s)
    w_max = t + params.epsilon
    positions: list[int | None] = []
    sizes: list[int] = []
    msgs: list[np.ndarray] = []
    for j in range(s):
        res = dec.residual(r_blocks, msgs, j)
        lst = dec.candidates(res, w_max, j)
        pos = lst.position(e_blocks[j])
        positions.append(pos)
        sizes.append(len(lst))
        if pos is not None:
            msgs.append(lst[pos - 1][1])
            continue
        try:
            msgs.append(algebra.solve_left(gf, dec.block.g0, gf.sub(res, e_blocks[j])))
        except NoSolution:
            break
    rank_sum = sum(p for p in positions if p is not None)
    complete = len(positions) == s and all(p is not None for p in positions)
    mean = dec.isd_seconds / max(dec.isd_calls, 1)
    seconds = rank_sum * mean
    bits = time_to_bits(seconds, params.clock_ghz) if seconds > 0 else None
    msg = None
    if complete and verify(code, received, planted):
        msg = recover_message(code, received - planted)
    return WorkEstimate(positions, sizes, rank_sum, complete, dec.isd_seconds, seconds, bits), msg


def estimate_work(
    code: ConvCode,
    received: PolyVector,
    planted: PolyVector,
    params: AttackParams,
    supercode: ConvCode | None = None,
) -> WorkEstimate:
    """Rank-sum work estimate along the planted branch."""
    dec = _Decoder(_decoding_code(code, supercode), params)
    s = params.blocks_for(received)
    est, _ = _walk_planted(dec, code, received, planted, params, s, params.per_block(s))
    return est
