"""Command-line interface: plan, gen, attack, verify, experiment.

Exit codes: 0 success, 1 not found / verification failed, 2 usage error,
3 malformed input data.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import planner
from .convcode import ConvCode, PolyVector
from .cryptolab import (
    PATTERN,
    UNIFORM,
    ErrorSpec,
    ExperimentConfig,
    encrypt,
    keygen,
    random_message,
    run_experiment,
)
from .errors import ConvIsdError
from .seqdecode import AttackParams, attack, verify

log = logging.getLogger("convisd")

EXIT_OK, EXIT_NOT_FOUND, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 3

PROFILES: dict[str, dict] = {
    "bolkema-toy": dict(
        q=2, n=5, k=3, memory=8, u_degree=2, mode=UNIFORM, te=14, degree=199,
        gamma=11, eps=3, wlow=2, W=None, target=0.98, t=None,
    ),
    "bolkema-full": dict(
        q=2, n=5, k=3, memory=92, u_degree=2, mode=UNIFORM, te=140, degree=1999,
        gamma=11, eps=3, wlow=2, W=430, target=None, t=None,
    ),
    "abns21-full": dict(
        q=64, n=62, k=30, memory=1, u_degree=1, mode=PATTERN, te=133, degree=49,
        gamma=0, eps=3, wlow=0, W=700, target=None, t=2,
    ),
}
FULL_PROFILES = {"bolkema-full", "abns21-full"}


class DataError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    """Parse ``"0..6"`` or ``"1,3,5"``."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from exc


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _digest(obj) -> str:
    return hashlib.sha256(json.dumps(obj, sort_keys=True).encode()).hexdigest()[:16]


def _fill(args, names=("q", "n", "k", "memory", "te", "gamma", "eps", "wlow", "W", "target", "t")):
    """Apply a preset under any explicitly given flags."""
    prof = PROFILES.get(getattr(args, "profile", None) or "", {})
    for name in names:
        if getattr(args, name, None) is None and name in prof:
            setattr(args, name, prof[name])
    for name in ("u_degree", "mode", "degree"):
        if getattr(args, name, None) is None:
            setattr(args, name, prof.get(name))
    return prof


# ---------------------------------------------------------------------------
# plan


def cmd_plan(args) -> int:
    eps_list = args.eps if args.eps is not None else list(range(7))
    t = args.t if args.t is not None else -(-args.te // args.s)
    rows = []
    for e in eps_list:
        prof = planner.BlockProfile(args.q, args.N, args.K, args.s, args.te, e, args.t)
        w = args.w if args.w is not None else t + e
        row = {
            "epsilon": e,
            "probability": planner.block_weight_probability(prof),
            "wf_ratio": planner.workfactor_ratio(args.N, args.K, t, e) if t + e <= args.N - args.K else None,
            "tail_bound": planner.tail_bound(args.N, args.s, t, e),
            "expected_solutions": planner.expected_solutions(args.q, args.N, args.K, t, e) if t + e <= args.N else None,
        }
        if args.W is not None:
            row["success_probability"] = planner.success_probability(args.N, args.K, w, args.W, args.s)
        if args.target is not None:
            row["recommended_W"] = planner.iterations_for_target(args.N, args.K, w, args.s, args.target)
        rows.append(row)
    grid = planner.lost_table() if args.weight_grid else None

    if args.out and not args.json:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "probability.csv").write_text(planner.probability_csv([(r["epsilon"], r["probability"]) for r in rows]))
        (out / "wf_ratio.csv").write_text(
            planner.ratio_csv([(r["epsilon"], r["wf_ratio"]) for r in rows if r["wf_ratio"] is not None])
        )
        if grid is not None:
            (out / "weight_grid.csv").write_text(planner.lost_csv(grid))
        return EXIT_OK

    if args.json:
        doc = {
            "profile": {"q": args.q, "N": args.N, "K": args.K, "s": args.s, "t_e": args.te, "t": t},
            "rows": [{k: (None if v is None else float(v) if k != "epsilon" and k != "recommended_W" else v)
                      for k, v in r.items()} for r in rows],
        }
        if grid is not None:
            doc["weight_grid"] = {"q": planner.GRID_Q, "N": planner.GRID_N,
                             "rows": [{"te": a, "tc": b, "prob": float(p)} for a, b, p in grid]}
        _emit(_dump(doc), args.out)
        return EXIT_OK

    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join("" if r[c] is None else str(r[c]) if c in ("epsilon", "recommended_W")
                              else planner.fmt(r[c]) for c in cols))
    text = "\n".join(lines) + "\n"
    if grid is not None:
        text += "\n" + planner.lost_csv(grid)
    _emit(text, None)
    return EXIT_OK


# ---------------------------------------------------------------------------
# gen


def _pattern_for(args, seed: int):
    if args.pattern:
        return tuple(_int_list(args.pattern))
    if args.profile == "abns21-full":
        a = seed % 6
        return (a, 5 - a, 3)
    return None


def cmd_gen(args) -> int:
    _fill(args)
    _require(args, "q", "n", "k", "memory", "te", "degree")
    if args.profile in FULL_PROFILES:
        log.warning("profile %s generates a full-size instance; attacking it takes hours", args.profile)
    key_seed = args.key_seed if args.key_seed is not None else args.seed
    pattern = _pattern_for(args, args.seed)
    mode = PATTERN if pattern is not None else (args.mode or UNIFORM)
    try:
        spec = ErrorSpec(mode, args.te, args.degree, pattern)
        spec.validate(args.n)
    except ConvIsdError as exc:
        raise UsageError(str(exc)) from exc
    pub, secret = keygen(args.q, args.n, args.k, args.memory, key_seed, u_degree=args.u_degree if args.u_degree is not None else 2)
    msg_degree = args.message_degree if args.message_degree is not None else args.degree - pub.memory
    msg = random_message(pub, msg_degree, args.seed)
    r, e = encrypt(pub, msg, spec, args.seed)
    doc = {
        "public_key": pub.to_json(),
        "ciphertext": r.to_json(),
        "spec": spec.to_json(),
        "seed": args.seed,
        "key_seed": key_seed,
        "field": pub.code.field.metadata(),
    }
    defaults = {k: getattr(args, k) for k in ("gamma", "eps", "wlow", "W", "target", "t") if getattr(args, k) is not None}
    if defaults:
        doc["attack_defaults"] = defaults
    if args.benchmark:
        doc["planted_error"] = e.to_json()
    _emit(_dump(doc), args.out)
    if args.out:
        secret_path = Path(args.secret) if args.secret else Path(args.out).with_suffix(".secret.json")
        secret_doc = secret.to_json()
        secret_doc["message"] = msg.to_json()
        secret_path.write_text(_dump(secret_doc))
    return EXIT_OK


# ---------------------------------------------------------------------------
# instances


def load_instance(path: str):
    try:
        doc = json.loads(Path(path).read_text())
        code = ConvCode.from_json(doc["public_key"])
        r = PolyVector.from_json(code.field, doc["ciphertext"], code.n)
        spec = ErrorSpec.from_json(doc["spec"])
        planted = doc.get("planted_error")
        if planted is not None:
            planted = PolyVector.from_json(code.field, planted, code.n)
    except (OSError, ValueError, KeyError, TypeError, ConvIsdError) as exc:
        raise DataError(f"malformed instance {path}: {exc}") from exc
    return doc, code, r, spec, planted


def load_error(path: str, code: ConvCode) -> PolyVector:
    try:
        doc = json.loads(Path(path).read_text())
        if isinstance(doc, dict):
            doc = doc["error"]
        if doc is None:
            raise ValueError("no error recorded")
        return PolyVector.from_json(code.field, doc, code.n)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DataError(f"malformed error file {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# attack / verify


def _attack_params(args, doc, s: int) -> AttackParams:
    defaults = doc.get("attack_defaults", {})
    prof = PROFILES.get(args.profile or "", {})

    def pick(name):
        v = getattr(args, name, None)
        if v is None:
            v = defaults.get(name, prof.get(name))
        return v

    gamma, eps, W, target = pick("gamma"), pick("eps"), pick("W"), pick("target")
    t_e = args.te if args.te is not None else doc["spec"]["t_e"]
    t = pick("t")
    if gamma is None or eps is None:
        raise UsageError("--gamma and --eps are required (no defaults in the instance)")
    if W is None:
        if target is None:
            raise UsageError("give --W or --target")
        n, k = doc["public_key"]["n"], doc["public_key"]["k"]
        tt = t if t is not None else -(-t_e // s)
        W = planner.iterations_for_target(n * (gamma + 1), k * (gamma + 1), tt + eps, s, target)
    return AttackParams(
        gamma=gamma,
        t_e=t_e,
        epsilon=eps,
        W=W,
        w_low=pick("wlow") or 0,
        seed=args.seed,
        t=t,
        cheat=args.cheat,
        max_nodes=args.max_nodes,
    )


def cmd_attack(args) -> int:
    doc, code, r, spec, planted = load_instance(args.instance)
    if args.cheat and planted is None:
        raise DataError("--cheat needs a benchmark instance with a planted error")
    gamma = args.gamma if args.gamma is not None else doc.get("attack_defaults", {}).get(
        "gamma", PROFILES.get(args.profile or "", {}).get("gamma"))
    if gamma is None:
        raise UsageError("--gamma is required")
    s = -(-max(r.length, 1) // (gamma + 1))
    params = _attack_params(args, doc, s)
    res = attack(code, r, params, planted=planted if args.cheat else None)
    verified = res.found and verify(code, r, res.error)
    report = res.to_json()
    report.update(
        found=res.found,
        verified=verified,
        params=params.to_json(),
        seed=args.seed,
        instance_hash=_digest(doc),
        config_hash=_digest({"instance": _digest(doc), "params": params.to_json()}),
        field=code.field.metadata(),
        timing=res.timing_json(),
    )
    if planted is not None and res.error is not None:
        report["matches_planted"] = res.error == planted
    _emit(_dump(report), args.out)
    return EXIT_OK if verified else EXIT_NOT_FOUND


def cmd_verify(args) -> int:
    doc, code, r, spec, _ = load_instance(args.instance)
    e = load_error(args.error, code)
    ok = verify(code, r, e) and e.weight <= spec.t_e
    print("valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_NOT_FOUND


# ---------------------------------------------------------------------------
# experiment


def cmd_experiment(args) -> int:
    _fill(args)
    _require(args, "q", "n", "k", "memory", "te", "degree", "gamma", "eps")
    s = -(-(args.degree + 1) // (args.gamma + 1))
    t = args.t if args.t is not None else -(-args.te // s)
    W = args.W
    if W is None:
        if args.target is None:
            raise UsageError("give --W or --target")
        W = planner.iterations_for_target(args.n * (args.gamma + 1), args.k * (args.gamma + 1), t + args.eps, s, args.target)
    pattern = tuple(_int_list(args.pattern)) if args.pattern else None
    cfg = ExperimentConfig(
        q=args.q, n=args.n, k=args.k, memory=args.memory, t_e=args.te, degree_bound=args.degree,
        gamma=args.gamma, epsilon=args.eps, W=W, w_low=args.wlow or 0,
        key_seed=args.key_seed if args.key_seed is not None else args.seed,
        seeds=args.seeds, mode=PATTERN if pattern else (args.mode or UNIFORM),
        block_weights=list(pattern) if pattern else None, message_degree=args.message_degree,
        t=args.t, cheat=args.cheat, max_nodes=args.max_nodes, u_degree=args.u_degree if args.u_degree is not None else 2, jobs=args.jobs,
    )
    _emit(_dump(run_experiment(cfg)), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


class UsageError(Exception):
    pass


def _require(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required flags: " + ", ".join("--" + n for n in missing))


def _code_flags(p):
    p.add_argument("--profile", choices=sorted(PROFILES), help="parameter preset")
    p.add_argument("--q", type=int, help="field size")
    p.add_argument("--n", type=int, help="code length")
    p.add_argument("--k", type=int, help="code dimension")
    p.add_argument("--memory", type=int, help="memory of the secret generator")
    p.add_argument("--u-degree", dest="u_degree", type=int, help="degree cap of the unimodular scrambler")
    p.add_argument("--te", type=int, help="total error weight")
    p.add_argument("--degree", type=int, help="error degree bound")
    p.add_argument("--mode", choices=[UNIFORM, PATTERN], help="error distribution")
    p.add_argument("--pattern", help="repeating per-time-step weights, e.g. 2,3,3")
    p.add_argument("--message-degree", dest="message_degree", type=int, help="message degree")
    p.add_argument("--key-seed", dest="key_seed", type=int, help="key seed (defaults to --seed)")


def _attack_flags(p):
    p.add_argument("--gamma", type=int, help="window size minus one")
    p.add_argument("--eps", type=int, help="per-block weight tolerance")
    p.add_argument("--t", type=int, help="per-block expected weight (default ceil(te/s))")
    p.add_argument("--W", type=int, help="Prange iterations per node")
    p.add_argument("--target", type=float, help="choose W for this success probability")
    p.add_argument("--wlow", type=int, help="weight bound of low-weight codeword augmentation")
    p.add_argument("--cheat", action="store_true", help="walk the planted branch and estimate work")
    p.add_argument("--max-nodes", dest="max_nodes", type=int, default=10**6, help="ISD call budget")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="convisd", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="probability, workfactor and iteration tables")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--N", type=int, required=True, help="block length n(gamma+1)")
    p.add_argument("--K", type=int, required=True, help="block dimension k(gamma+1)")
    p.add_argument("--s", type=int, required=True, help="number of blocks")
    p.add_argument("--te", type=int, required=True)
    p.add_argument("--eps", type=_int_list, help="epsilon values, e.g. 0..6")
    p.add_argument("--t", type=int)
    p.add_argument("--W", type=int, help="report success probability for this W")
    p.add_argument("--w", type=int, help="weight for success probability / W (default t+eps)")
    p.add_argument("--target", type=float, help="report the smallest W reaching this probability")
    p.add_argument("--weight-grid", dest="weight_grid", action="store_true", help="append the weight-preservation grid")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", help="output directory for CSVs (or file with --json)")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("gen", help="generate a key and a ciphertext")
    _code_flags(p)
    _attack_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--benchmark", action="store_true", help="include the planted error")
    p.add_argument("--secret", help="path for the secret witness")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attack", help="run the sequential attack on an instance")
    p.add_argument("instance")
    p.add_argument("--profile", choices=sorted(PROFILES))
    p.add_argument("--te", type=int, help="override the declared total weight")
    _attack_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("verify", help="check a claimed error against an instance")
    p.add_argument("instance")
    p.add_argument("error", help="attack report or JSON coefficient list")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="batch of seeds with discard statistics")
    _code_flags(p)
    _attack_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=_int_list, default=list(range(20)))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
