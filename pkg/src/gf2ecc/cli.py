"""gf2ecc command line.

    gf2ecc field mul 2 3 --curve f3.field
    gf2ecc ecpm 1 G b163 --check
    gf2ecc cost 163 --sweep
    gf2ecc sched --worst-case --mode paper b163 --freq 213
    gf2ecc bench --op mul --cutoff 1 21 41 82 163

All numbers are hex.  Exit status: 0 ok, 1 usage error, 2 domain error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import random
import statistics
import sys
import time
from pathlib import Path

from . import cost_model, sched_sim
from .ecpm import (
    DegenerateBasePointError,
    InvalidPointError,
    format_point,
    ladder_init,
    load_curve,
    load_field,
    parse_point,
    scalar_mul,
    scalar_mul_oracle,
)
from .gf2m_core import FieldElement, NonInvertibleError, add, invert, mul, square

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2
DEFAULT_CURVE = "b163"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def _hex_int(text: str) -> int:
    s = text.strip().lower()
    if s.startswith("0x"):
        s = s[2:]
    try:
        return int(s, 16)
    except ValueError:
        raise ValueError(f"malformed hex {text!r}") from None


def _emit(args, text: str, record: dict | None = None):
    if args.json and record is not None:
        print(json.dumps(record))
    else:
        print(text)


# --- field ------------------------------------------------------------------

_FIELD_ARITY = {"add": 2, "mul": 2, "square": 1, "invert": 1}


def cmd_field(args) -> int:
    ctx = load_field(args.curve, args.cutoff)
    want = _FIELD_ARITY[args.op]
    if len(args.operands) != want:
        raise UsageError(f"field {args.op} takes {want} operand(s), got {len(args.operands)}")
    xs = [ctx.from_hex(s) for s in args.operands]
    if args.op == "add":
        r = add(*xs)
    elif args.op == "mul":
        r = mul(xs[0], xs[1], ctx)
    elif args.op == "square":
        r = square(xs[0], ctx)
    else:
        r = invert(xs[0], ctx)
    out = ctx.to_hex(r)
    _emit(args, out, {"op": args.op, "operands": args.operands, "result": out, "m": ctx.m})
    return EXIT_OK


# --- ecpm -------------------------------------------------------------------


def cmd_ecpm(args) -> int:
    # `ecpm K CURVE` is accepted too; points are G, INF or x,y so there is no clash
    if args.curve is None:
        if args.point is not None and args.point.upper() not in ("G", "INF") and "," not in args.point:
            args.point, args.curve = "G", args.point
        else:
            args.curve = DEFAULT_CURVE
    args.point = args.point or "G"
    C = load_curve(args.curve, args.cutoff)
    k = _hex_int(args.k)
    P = parse_point(args.point, C)
    Q = scalar_mul(k, P, C)
    if args.recover_y or Q.is_infinity:
        out = format_point(Q, C)
    else:
        out = C.ctx.to_hex(Q.x)
    record = {"k": args.k, "point": args.point, "curve": C.name, "result": out}
    status = EXIT_OK
    if args.check:
        ok = scalar_mul_oracle(k, P, C) == Q
        record["oracle"] = "MATCH" if ok else "MISMATCH"
        status = EXIT_OK if ok else EXIT_DOMAIN
    if args.json:
        print(json.dumps(record))
    else:
        print(out)
        if args.check:
            print(f"oracle: {record['oracle']}")
    return status


# --- cost -------------------------------------------------------------------


def cmd_cost(args) -> int:
    if args.tables:
        print(cost_model.reference_records() if args.json else cost_model.format_reference_tables())
        if args.n is None:
            return EXIT_OK
    if args.n is None:
        raise UsageError("cost needs an operand width N (or --tables)")
    weights = dict(ta=args.ta, tx=args.tx)
    note = ""
    if args.sweep:
        rec = cost_model.recommend_cutoff(args.n, args.ta, args.tx, args.and_weight, args.xor_weight)
        reports = rec.sweep
        note = f"lowest modelled ATP: k={rec.k} (leaf width {rec.cutoff})"
    elif args.family == "pm":
        reports = [cost_model.pm_cost(args.n, **weights)]
    elif args.family == "km":
        reports = [cost_model.km_cost(args.n, **weights)]
    else:
        if args.k is None:
            raise UsageError("--family hm needs --k (or use --sweep)")
        reports = [cost_model.hm_cost(args.n, args.k, **weights)]
    reports = [r.reweighted(args.ta, args.tx, args.and_weight, args.xor_weight) for r in reports]
    if args.json:
        print(cost_model.report_records(reports))
    else:
        print(cost_model.format_reports(reports))
        if note:
            print(note)
    return EXIT_OK


# --- sched ------------------------------------------------------------------


def _is_curve_token(tok: str) -> bool:
    p = Path(tok)
    if tok.endswith((".curve", ".field")) or p.exists():
        return True
    try:
        load_curve(tok)
        return True
    except (FileNotFoundError, ValueError):
        return False


def cmd_sched(args) -> int:
    k_text, curve = args.k, None
    for tok in args.items:
        if curve is None and _is_curve_token(tok):
            curve = tok
        elif k_text is None:
            k_text = tok
        else:
            raise UsageError(f"unexpected argument {tok!r}")
    C = load_curve(curve or DEFAULT_CURVE, args.cutoff)
    if args.worst_case == (k_text is not None):
        raise UsageError("give exactly one of a scalar K or --worst-case")
    if args.worst_case:
        budget = sched_sim.worst_case_budget(C, args.mode)
    else:
        budget = sched_sim.simulate_ecpm(_hex_int(k_text), C, mode=args.mode)
    if args.trace:
        # first loop iteration: key bit t-2 (bit 1 stands in for the worst case)
        k = None if args.worst_case else _hex_int(k_text) % C.order
        if k is None or k.bit_length() >= 2:
            bit = 1 if k is None else (k >> (k.bit_length() - 2)) & 1
            trace, _ = sched_sim.schedule_iteration(ladder_init(C.G.x, C), bit, C.G.x, C)
            print(trace.lines() if args.json else trace.table(header=False))
    record = budget.record()
    if args.freq is not None:
        record["freq_mhz"] = args.freq
        record["time_us"] = round(sched_sim.throughput_report(budget, args.freq), 4)
    if args.json:
        print(json.dumps(record))
    else:
        for key in ("mode", "loop_iterations", "cycles_per_iteration", "inversion_cycles", "init_cycles", "post_cycles", "total"):
            print(f"{key:<22}{record[key]}")
        if args.freq is not None:
            print(f"{'time_us':<22}{record['time_us']:.2f} at {args.freq:g} MHz")
    return EXIT_OK


# --- bench ------------------------------------------------------------------


def operand_stream(ctx, seed: int, count: int, nonzero: bool = False) -> list[FieldElement]:
    """Reproducible field operands for benchmarking."""
    rng = random.Random(seed)
    return [ctx.random_element(rng, nonzero=nonzero) for _ in range(count)]


def stream_digest(stream) -> str:
    h = hashlib.sha256()
    for x in stream:
        h.update(x.value.to_bytes((x.width + 7) // 8 or 1, "little"))
    return h.hexdigest()[:16]


def _bench_one(op, C, cutoff, iters, seed, rounds=5):
    ctx = C.ctx.with_cutoff(cutoff)
    xs = operand_stream(ctx, seed, iters + 1, nonzero=(op == "invert"))
    if op == "mul":
        def body():
            for i in range(iters):
                mul(xs[i], xs[i + 1], ctx)
    elif op == "square":
        def body():
            for i in range(iters):
                square(xs[i], ctx)
    elif op == "invert":
        def body():
            for i in range(iters):
                invert(xs[i], ctx)
    else:
        curve = load_curve(C.name, cutoff) if C.name else C
        ks = [x.value for x in xs]

        def body():
            for i in range(iters):
                scalar_mul(ks[i], curve.G, curve)
    per_op = []
    for _ in range(rounds):
        t0 = time.perf_counter()
        body()
        per_op.append((time.perf_counter() - t0) / iters * 1e9)
    ns = statistics.median(per_op)
    return {"op": op, "cutoff": ctx.cutoff, "iters": iters, "seed": seed, "ns_per_op": round(ns, 1),
            "ops_per_s": round(1e9 / ns, 1), "stream": stream_digest(xs)}


def cmd_bench(args) -> int:
    C = load_curve(args.curve, None)
    cutoffs = args.cutoff or [C.ctx.cutoff]
    iters = args.iters if args.iters is not None else (20 if args.op == "ecpm" else 2000)
    if iters < 1:
        raise UsageError("--iters must be >= 1")
    rows = [_bench_one(args.op, C, c, iters, args.seed) for c in cutoffs]
    if args.json:
        for r in rows:
            print(json.dumps(r))
        return EXIT_OK
    print(f"{'op':<8}{'cutoff':>7}{'iters':>8}{'ns/op':>14}{'ops/s':>14}  stream")
    for r in rows:
        print(f"{r['op']:<8}{r['cutoff']:>7}{r['iters']:>8}{r['ns_per_op']:>14.1f}{r['ops_per_s']:>14.1f}  {r['stream']}")
    return EXIT_OK


# --- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="gf2ecc", description="GF(2^m) arithmetic, Montgomery-ladder ECPM, cost model and schedule simulator.")
    ap.add_argument("--json", action="store_true", help="line-delimited JSON output")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="line-delimited JSON output")
        p.add_argument("--cutoff", type=int, default=None, help="hybrid multiplier leaf width")

    p = sub.add_parser("field", help="one field operation")
    p.add_argument("op", choices=sorted(_FIELD_ARITY))
    p.add_argument("operands", nargs="+", metavar="HEX")
    p.add_argument("--curve", required=True, help="curve or field file (m and f)")
    common(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("ecpm", help="scalar multiplication kP")
    p.add_argument("k", metavar="K")
    p.add_argument("point", nargs="?", help="INF, G or x,y (default G)")
    p.add_argument("curve", nargs="?", help=f"name or .curve file (default {DEFAULT_CURVE})")
    p.add_argument("--check", action="store_true", help="compare with the affine ladder oracle")
    p.add_argument("--recover-y", action=argparse.BooleanOptionalAction, default=True)
    common(p)
    p.set_defaults(func=cmd_ecpm)

    p = sub.add_parser("cost", help="gate-count / delay model")
    p.add_argument("n", nargs="?", type=int, metavar="N")
    p.add_argument("--family", choices=("pm", "km", "hm"), default="hm")
    p.add_argument("--k", type=int, default=None, help="Karatsuba stages for hm")
    p.add_argument("--ta", type=float, default=1.0)
    p.add_argument("--tx", type=float, default=1.0)
    p.add_argument("--and-weight", type=float, default=1.0)
    p.add_argument("--xor-weight", type=float, default=1.0)
    p.add_argument("--sweep", action="store_true", help="all k for hm, with the lowest-ATP pick")
    p.add_argument("--tables", action="store_true", help="print the measured reference rows")
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_cost)

    p = sub.add_parser("sched", help="cycle accounting on the 3-unit datapath")
    p.add_argument("items", nargs="*", metavar="K|CURVE")
    p.add_argument("--k", default=None)
    p.add_argument("--worst-case", action="store_true")
    p.add_argument("--mode", choices=("paper", "honest"), default="paper")
    p.add_argument("--trace", action="store_true", help="print one scheduled iteration")
    p.add_argument("--freq", type=float, default=None, help="clock in MHz")
    common(p)
    p.set_defaults(func=cmd_sched)

    p = sub.add_parser("bench", help="wall-clock micro-benchmark")
    p.add_argument("--op", choices=("mul", "square", "invert", "ecpm"), default="mul")
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--cutoff", type=int, nargs="+", default=None)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--curve", default=DEFAULT_CURVE)
    p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        ap.print_usage(sys.stderr)
        print(f"gf2ecc: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, ZeroDivisionError, FileNotFoundError, InvalidPointError, DegenerateBasePointError, NonInvertibleError) as e:
        print(f"gf2ecc: error: {e}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
