"""Toy McEliece-style instances over F_q[z] and batch experiments.

Keys are ``G' = U(z) G(z) P`` with a random delay-free ``G``, a random
unimodular ``U`` built from elementary row operations, and a column
permutation ``P``. The secret factors are kept apart from the public data so
that attack code never sees them.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from . import algebra
from .algebra import GF, get_field
from .convcode import ConvCode, PolyVector, encode
from .errors import DimensionMismatch, InconsistentSpec
from .planner import block_probability_for_sizes, time_to_bits
from .polymat import PolyMatrix
from .seqdecode import AttackParams, attack

UNIFORM = "uniform_total_weight"
PATTERN = "per_block_weights"


@dataclass(frozen=True)
class PublicKey:
    code: ConvCode
    memory_requested: int

    @property
    def q(self) -> int:
        return self.code.field.q

    @property
    def n(self) -> int:
        return self.code.n

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def memory(self) -> int:
        return self.code.memory

    @property
    def delay_free(self) -> bool:
        return self.code.delay_free

    def to_json(self) -> dict:
        return self.code.to_json()


@dataclass(frozen=True)
class SecretWitness:
    g: PolyMatrix
    u: PolyMatrix
    perm: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "q": self.g.field.q,
            "g": self.g.coeffs.tolist(),
            "u": self.u.coeffs.tolist(),
            "perm": list(self.perm),
        }


def _random_generator(gf: GF, n: int, k: int, memory: int, rng) -> PolyMatrix:
    while True:
        g0 = gf.random((k, n), rng)
        if algebra.rank(gf, g0) == k:
            break
    coeffs = [g0] + [gf.random((k, n), rng) for _ in range(memory)]
    while memory > 0 and not coeffs[-1].any():
        coeffs[-1] = gf.random((k, n), rng)
    return PolyMatrix(gf, np.stack(coeffs), shape=(k, n))


def _random_unimodular(gf: GF, k: int, ops: int, degree: int, rng) -> PolyMatrix:
    u = PolyMatrix.identity(gf, k)
    done = 0
    while done < ops:
        kind = int(rng.integers(3)) if k > 1 else 1
        e = np.zeros((max(degree, 0) + 1, k, k), dtype=np.int64)
        e[0] = np.eye(k, dtype=np.int64)
        if kind == 0:
            i, j = rng.choice(k, 2, replace=False)
            e[0][[i, j]] = e[0][[j, i]]
        elif kind == 1:
            i = int(rng.integers(k))
            e[0][i, i] = int(rng.integers(1, gf.q))
        else:
            i, j = rng.choice(k, 2, replace=False)
            d = int(rng.integers(0, degree + 1))
            e[d][i, j] = gf.add(e[d][i, j], int(rng.integers(1, gf.q)))
        cand = PolyMatrix(gf, e, shape=(k, k)) @ u
        if cand.degree > degree:
            continue
        u = cand
        done += 1
    return u


def keygen(
    q: int,
    n: int,
    k: int,
    memory: int,
    seed: int,
    u_ops: int = 20,
    u_degree: int = 2,
    delay_free: bool = True,
) -> tuple[PublicKey, SecretWitness]:
    """Random public key ``U G P``; the public memory is at most ``memory + u_degree``.

    With ``delay_free=False`` the key is further multiplied on the left by
    ``diag(z, 1, ..., 1)``, giving a full-rank key whose constant term is
    rank deficient (a code that must be attacked through a supercode).
    """
    if not 0 < k < n or memory < 0:
        raise ValueError("need 0 < k < n and memory >= 0")
    gf = get_field(q)
    rng = np.random.default_rng([seed, 0x6B])
    g = _random_generator(gf, n, k, memory, rng)
    u = _random_unimodular(gf, k, u_ops, u_degree, rng) if memory > 0 else PolyMatrix.identity(gf, k)
    if memory == 0:
        # keep the degenerate case constant: scramble with an invertible matrix only
        while True:
            m = gf.random((k, k), rng)
            if algebra.rank(gf, m) == k:
                u = PolyMatrix.constant(gf, m)
                break
    perm = tuple(int(x) for x in rng.permutation(n))
    pub = (u @ g).cols_slice(list(perm))
    if not delay_free:
        d = np.zeros((2, k, k), dtype=np.int64)
        d[0] = np.eye(k, dtype=np.int64)
        d[0][0, 0] = 0
        d[1][0, 0] = 1
        pub = PolyMatrix(gf, d, shape=(k, k)) @ pub
    code = ConvCode.from_generator(pub)
    return PublicKey(code, memory), SecretWitness(g, u, perm)


@dataclass(frozen=True)
class ErrorSpec:
    mode: str
    t_e: int
    degree_bound: int
    block_weights: tuple[int, ...] | None = None

    def __post_init__(self):
        self.validate()

    def validate(self, n: int | None = None):
        if self.mode not in (UNIFORM, PATTERN):
            raise InconsistentSpec(f"unknown error mode {self.mode!r}")
        if self.degree_bound < 0 or self.t_e < 0:
            raise InconsistentSpec("degree_bound and t_e must be >= 0")
        if self.mode == PATTERN:
            pat = self.block_weights
            if not pat or any(w < 0 for w in pat):
                raise InconsistentSpec("pattern mode needs non-negative block weights")
            if self.pattern_total() != self.t_e:
                raise InconsistentSpec(f"pattern totals {self.pattern_total()} but t_e is {self.t_e}")
            if n is not None and max(pat) > n:
                raise InconsistentSpec(f"a block weight exceeds the block length {n}")
        elif n is not None and self.t_e > n * (self.degree_bound + 1):
            raise InconsistentSpec("t_e exceeds the number of coordinates")

    def pattern_total(self) -> int:
        pat = self.block_weights
        return sum(pat[b % len(pat)] for b in range(self.degree_bound + 1))

    def to_json(self) -> dict:
        out = {"mode": self.mode, "t_e": self.t_e, "degree_bound": self.degree_bound}
        if self.block_weights is not None:
            out["block_weights"] = list(self.block_weights)
        return out

    @classmethod
    def from_json(cls, data: dict) -> ErrorSpec:
        bw = data.get("block_weights")
        return cls(data["mode"], int(data["t_e"]), int(data["degree_bound"]), tuple(bw) if bw is not None else None)


def sample_error(spec: ErrorSpec, n: int, seed: int, field: GF | int = 2) -> PolyVector:
    """Random error of degree <= ``spec.degree_bound`` following ``spec``."""
    gf = get_field(field) if isinstance(field, int) else field
    spec.validate(n)
    rng = np.random.default_rng([seed, 0xE7])
    L = spec.degree_bound + 1
    flat = np.zeros(L * n, dtype=np.int64)
    if spec.mode == UNIFORM:
        pos = rng.choice(L * n, spec.t_e, replace=False)
        flat[pos] = rng.integers(1, gf.q, size=spec.t_e)
    else:
        pat = spec.block_weights
        for b in range(L):
            w = pat[b % len(pat)]
            pos = b * n + rng.choice(n, w, replace=False)
            flat[pos] = rng.integers(1, gf.q, size=w)
    return PolyVector.from_flat(gf, flat, n)


def random_message(public: PublicKey, degree: int, seed: int) -> PolyVector:
    gf = public.code.field
    rng = np.random.default_rng([seed, 0x3D])
    return PolyVector(gf, gf.random((max(degree + 1, 0), public.k), rng), n=public.k)


def encrypt(public: PublicKey | ConvCode, message: PolyVector, spec: ErrorSpec, seed: int):
    """``r = m G' + e``; returns ``(r, e)``."""
    code = public.code if isinstance(public, PublicKey) else public
    if message.n != code.k:
        raise DimensionMismatch(f"message has {message.n} components, key expects {code.k}")
    e = sample_error(spec, code.n, seed, code.field)
    c = encode(code, message)
    L = max(c.length, e.length)
    return c.padded(L) + e.padded(L), e


def block_weights_of(error: PolyVector, gamma: int, s: int) -> list[int]:
    gf_blocks = error.blocks(gamma, s)
    return [int(np.count_nonzero(b)) for b in gf_blocks]


def predicted_discard(q: int, n: int, gamma: int, degree_bound: int, t_e: int, w_max: int) -> float:
    """Exact probability that a uniform error has some block above ``w_max``.

    The final window may be shorter than ``n (gamma + 1)`` when the error
    length is not a multiple of the window.
    """
    L = degree_bound + 1
    step = gamma + 1
    sizes = [n * min(step, L - i) for i in range(0, L, step)]
    return float(1 - block_probability_for_sizes(q, sizes, t_e, w_max))


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentConfig:
    q: int
    n: int
    k: int
    memory: int
    t_e: int
    degree_bound: int
    gamma: int
    epsilon: int
    W: int
    w_low: int = 0
    key_seed: int = 0
    seeds: list[int] = dc_field(default_factory=lambda: list(range(20)))
    mode: str = UNIFORM
    block_weights: list[int] | None = None
    message_degree: int | None = None
    t: int | None = None
    cheat: bool = False
    max_nodes: int = 10**6
    u_degree: int = 2
    clock_ghz: float = 3.4
    jobs: int = 1

    def to_json(self) -> dict:
        out = asdict(self)
        out.pop("jobs")
        return out

    def config_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _instance(cfg: ExperimentConfig, public: PublicKey, seed: int, pattern: tuple[int, ...] | None = None):
    spec_weights = pattern if pattern is not None else (tuple(cfg.block_weights) if cfg.block_weights else None)
    spec = ErrorSpec(cfg.mode, cfg.t_e, cfg.degree_bound, spec_weights)
    deg = cfg.message_degree if cfg.message_degree is not None else cfg.degree_bound - public.memory
    msg = random_message(public, deg, seed)
    r, e = encrypt(public, msg, spec, seed)
    return spec, msg, r, e


def _run_seed(cfg: ExperimentConfig, public: PublicKey, seed: int) -> dict:
    _, _, r, e = _instance(cfg, public, seed)
    params = AttackParams(
        gamma=cfg.gamma,
        t_e=cfg.t_e,
        epsilon=cfg.epsilon,
        W=cfg.W,
        w_low=cfg.w_low,
        seed=seed,
        t=cfg.t,
        cheat=cfg.cheat,
        max_nodes=cfg.max_nodes,
        clock_ghz=cfg.clock_ghz,
    )
    s = params.blocks_for(r)
    t = params.per_block(s)
    weights = block_weights_of(e, cfg.gamma, s)
    row = {"seed": seed, "max_block_weight": max(weights), "discarded": max(weights) > t + cfg.epsilon}
    if row["discarded"]:
        row.update(found=False, correct=False, nodes=0, seconds=0.0, bits=None)
        return row
    t0 = time.perf_counter()
    res = attack(public.code, r, params, planted=e if cfg.cheat else None)
    seconds = time.perf_counter() - t0
    row["found"] = res.found
    row["correct"] = res.found and res.error == e
    row["nodes"] = res.nodes
    row["seconds"] = seconds
    if res.estimate is not None:
        row["bits"] = res.estimate.bits
        row["positions"] = res.estimate.to_json()["positions"]
        row["rank_sum"] = res.estimate.rank_sum
    else:
        row["bits"] = time_to_bits(seconds, cfg.clock_ghz) if seconds > 0 else None
    return row


def run_experiment(cfg: ExperimentConfig) -> dict:
    """Generate one key, then one ciphertext per seed; discard, attack, and summarise."""
    public, _ = keygen(cfg.q, cfg.n, cfg.k, cfg.memory, cfg.key_seed, u_degree=cfg.u_degree)
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_run_seed, [cfg] * len(cfg.seeds), [public] * len(cfg.seeds), cfg.seeds))
    else:
        rows = [_run_seed(cfg, public, sd) for sd in cfg.seeds]
    rows.sort(key=lambda r: r["seed"])
    kept = [r for r in rows if not r["discarded"]]
    step = cfg.gamma + 1
    s = -(-(cfg.degree_bound + 1) // step)
    t = cfg.t if cfg.t is not None else -(-cfg.t_e // s)
    predicted = None
    if cfg.mode == UNIFORM:
        predicted = predicted_discard(cfg.q, cfg.n, cfg.gamma, cfg.degree_bound, cfg.t_e, t + cfg.epsilon)
    timing = {str(r["seed"]): {"seconds": r.pop("seconds"), "bits": r.pop("bits")} for r in rows}
    return {
        "config": cfg.to_json(),
        "config_hash": cfg.config_hash(),
        "field": public.code.field.metadata(),
        "public_memory": public.memory,
        "s": s,
        "t": t,
        "seeds": rows,
        "discard_rate": 1 - len(kept) / len(rows) if rows else 0.0,
        "predicted_discard": predicted,
        "attacked": len(kept),
        "found": sum(r["found"] for r in kept),
        "correct": sum(r["correct"] for r in kept),
        "timing": timing,
    }
