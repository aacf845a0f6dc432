"""Cycle-level simulation of the one-adder / one-multiplier / one-squarer datapath.

A ladder iteration is a fixed six-cycle micro-program (``ITERATION_SCHEDULE``,
written for key bit 1; bit 0 uses the same program with registers 1 and 2
swapped).  The simulator really executes it: every micro-op reads its
operands from values committed in earlier cycles, computes the field result
and commits at the end of the cycle.  The single exception is cycle 3,
where the squarer consumes the adder's output in the same cycle (a
combinational adder -> squarer chain); such reads are marked ``chained``.

Whole point multiplications are accounted as

    total = (t - 1) * 6 + inversion + init + post

In ``paper`` mode init and post are zero, which gives 162 * 6 + 326 = 1298
for B-163 with a worst-case inversion.  ``honest`` mode list-schedules the
initialisation and the y-recovery field operations on the same three units.
"""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field

from .ecpm import INFINITY, AffinePoint, CurveParams, LadderState, _recover, on_curve, scalar_mul_oracle
from .gf2m_core import FieldElement, FieldOps, add, mul, square

__all__ = [
    "CHAINED_CYCLE",
    "CYCLES_PER_ITERATION",
    "ITERATION_SCHEDULE",
    "REFERENCE_DESIGNS",
    "CycleBudget",
    "MicroOp",
    "ScheduleError",
    "MEASURED_POWER_W",
    "ScheduleTrace",
    "TraceRecord",
    "list_schedule",
    "mirrored",
    "reference_consistency",
    "run_micro_program",
    "schedule_iteration",
    "simulate_ecpm",
    "throughput_report",
    "worst_case_budget",
]

UNITS = ("adder", "multiplier", "squarer")
_UNIT_OP = {"adder": "add", "multiplier": "mul", "squarer": "sqr"}
CYCLES_PER_ITERATION = 6
CHAINED_CYCLE = 3


class ScheduleError(RuntimeError):
    """A micro-program broke a resource or dependency rule."""


@dataclass(frozen=True)
class MicroOp:
    cycle: int
    unit: str
    sources: tuple
    dest: str
    chained: bool = False


# key bit 1: register 1 receives P_1 + P_2, register 2 is doubled
ITERATION_SCHEDULE = (
    MicroOp(1, "multiplier", ("X2", "Z1"), "X2Z1"),
    MicroOp(1, "squarer", ("X2",), "X2^2"),
    MicroOp(2, "multiplier", ("X1", "Z2"), "X1Z2"),
    MicroOp(2, "squarer", ("Z2",), "Z2^2"),
    MicroOp(3, "adder", ("X1Z2", "X2Z1"), "X1Z2+X2Z1"),
    MicroOp(3, "multiplier", ("X1Z2", "X2Z1"), "X1Z1X2Z2"),
    MicroOp(3, "squarer", ("X1Z2+X2Z1",), "Z1", chained=True),
    MicroOp(4, "multiplier", ("Z1", "xP"), "Z1xP"),
    MicroOp(4, "squarer", ("Z2^2",), "Z2^4"),
    MicroOp(5, "adder", ("Z1xP", "X1Z1X2Z2"), "X1"),
    MicroOp(5, "multiplier", ("b", "Z2^4"), "bZ2^4"),
    MicroOp(5, "squarer", ("X2^2",), "X2^4"),
    MicroOp(6, "adder", ("bZ2^4", "X2^4"), "X2"),
    MicroOp(6, "multiplier", ("X2^2", "Z2^2"), "Z2"),
)

_REG = re.compile(r"([XZ])([12])")


def _swap_regs(name: str) -> str:
    return _REG.sub(lambda m: m.group(1) + ("2" if m.group(2) == "1" else "1"), name)


def mirrored(program) -> tuple:
    """The same micro-program with registers 1 and 2 exchanged."""
    return tuple(
        MicroOp(op.cycle, op.unit, tuple(_swap_regs(s) for s in op.sources), _swap_regs(op.dest), op.chained)
        for op in program
    )


_PROGRAMS = {1: ITERATION_SCHEDULE, 0: mirrored(ITERATION_SCHEDULE)}


@dataclass(frozen=True)
class TraceRecord:
    cycle: int
    unit: str
    op: str
    sources: tuple
    dest: str
    chained: bool = False

    def record(self) -> dict:
        return {
            "cycle_index": self.cycle,
            "unit": self.unit,
            "op": self.op,
            "sources": list(self.sources),
            "destination": self.dest,
            "chained": self.chained,
        }


@dataclass
class ScheduleTrace:
    records: list = field(default_factory=list)

    @property
    def n_cycles(self) -> int:
        return max((r.cycle for r in self.records), default=0)

    def cycles(self) -> list[list[TraceRecord]]:
        out = [[] for _ in range(self.n_cycles)]
        for r in self.records:
            out[r.cycle - 1].append(r)
        return out

    def occupancy(self) -> dict[str, int]:
        """Busy cycles per unit."""
        return {u: len({r.cycle for r in self.records if r.unit == u}) for u in UNITS}

    def op_counts(self) -> dict[str, int]:
        return {u: sum(r.unit == u for r in self.records) for u in UNITS}

    def lines(self) -> str:
        return "\n".join(json.dumps(r.record()) for r in self.records)

    def table(self, header: bool = True) -> str:
        rows = [f"{'cycle':>5}  {'adder':<24}{'multiplier':<24}{'squarer':<24}"] if header else []
        for c, recs in enumerate(self.cycles(), 1):
            cell = {u: "-" for u in UNITS}
            for r in recs:
                text = "+".join(r.sources) if r.unit == "adder" else "*".join(r.sources)
                if r.unit == "squarer":
                    text = f"({r.sources[0]})^2"
                cell[r.unit] = f"{text}->{r.dest}" + (" [chain]" if r.chained else "")
            rows.append(f"{c:>5}  {cell['adder']:<24}{cell['multiplier']:<24}{cell['squarer']:<24}".rstrip())
        return "\n".join(rows)


def _execute(unit, args, ctx):
    if unit == "adder":
        return add(*args)
    if unit == "multiplier":
        return mul(args[0], args[1], ctx)
    return square(args[0], ctx)


def run_micro_program(program, values: dict, ctx) -> tuple[ScheduleTrace, dict]:
    """Execute ``program`` cycle by cycle against ``values`` (name -> element).

    Enforces one op per unit per cycle, and that every operand was committed
    in an earlier cycle unless the op is a chained squarer fed by the adder.
    Returns the trace and the final value table.
    """
    values = dict(values)
    trace = ScheduleTrace()
    last = max(op.cycle for op in program)
    for c in range(1, last + 1):
        ops = [op for op in program if op.cycle == c]
        units = [op.unit for op in ops]
        if len(units) != len(set(units)):
            raise ScheduleError(f"cycle {c}: a unit is issued twice")
        pending = {}
        producer = {}
        # adder first so a chained squarer in the same cycle can see its sum
        for op in sorted(ops, key=lambda o: UNITS.index(o.unit)):
            args = []
            for s in op.sources:
                if s in pending:
                    if not (op.chained and op.unit == "squarer" and producer[s] == "adder"):
                        raise ScheduleError(f"cycle {c}: {op.unit} reads {s} in the cycle it is written")
                    args.append(pending[s])
                elif s in values:
                    if op.chained:
                        raise ScheduleError(f"cycle {c}: op marked chained but {s} is not a same-cycle value")
                    args.append(values[s])
                else:
                    raise ScheduleError(f"cycle {c}: {s} is not available")
            pending[op.dest] = _execute(op.unit, args, ctx)
            producer[op.dest] = op.unit
            trace.records.append(TraceRecord(c, op.unit, _UNIT_OP[op.unit], op.sources, op.dest, op.chained))
        values.update(pending)
    return trace, values


def schedule_iteration(S: LadderState, k_i: int, xP: FieldElement, C: CurveParams) -> tuple[ScheduleTrace, LadderState]:
    """One ladder iteration on the three-unit datapath (six cycles)."""
    values = {"X1": S.X1, "Z1": S.Z1, "X2": S.X2, "Z2": S.Z2, "xP": xP, "b": C.b}
    trace, out = run_micro_program(_PROGRAMS[1 if k_i else 0], values, C.ctx)
    return trace, LadderState(out["X1"], out["Z1"], out["X2"], out["Z2"])


# --- whole point multiplication ------------------------------------------


def list_schedule(ops, ready) -> ScheduleTrace:
    """Greedy in-order list scheduling of (unit, sources, dest) triples.

    One op per unit per cycle; an operand must be in ``ready`` or produced
    in an earlier cycle.  No chaining.
    """
    avail = {s: 0 for s in ready}
    busy = set()
    trace = ScheduleTrace()
    for unit, sources, dest in ops:
        try:
            c = 1 + max((avail[s] for s in sources), default=0)
        except KeyError as e:
            raise ScheduleError(f"{e.args[0]} is never produced") from None
        while (c, unit) in busy:
            c += 1
        busy.add((c, unit))
        avail[dest] = c
        trace.records.append(TraceRecord(c, unit, _UNIT_OP[unit], tuple(sources), dest))
    return trace


INIT_OPS = (
    ("squarer", ("xP",), "Z2"),
    ("squarer", ("Z2",), "xP^4"),
    ("adder", ("xP^4", "b"), "X2"),
)

# y-recovery split around the single inversion of D = xP*Z1*Z2
RECOVERY_BEFORE_INVERSION = (
    ("multiplier", ("Z1", "Z2"), "Z1Z2"),
    ("multiplier", ("xP", "Z1Z2"), "D"),
    ("multiplier", ("xP", "Z2"), "xPZ2"),
    ("multiplier", ("xP", "Z1"), "xPZ1"),
    ("multiplier", ("X1", "xPZ2"), "X1xPZ2"),
    ("adder", ("X1", "xPZ1"), "s1"),
    ("adder", ("X2", "xPZ2"), "s2"),
    ("multiplier", ("s1", "s2"), "u"),
    ("squarer", ("xP",), "xP^2"),
    ("adder", ("xP^2", "yP"), "c"),
    ("multiplier", ("c", "Z1Z2"), "v"),
    ("adder", ("u", "v"), "w"),
)
RECOVERY_AFTER_INVERSION = (
    ("multiplier", ("X1xPZ2", "Dinv"), "x3"),
    ("adder", ("xP", "x3"), "s3"),
    ("multiplier", ("s3", "w"), "y1"),
    ("multiplier", ("y1", "Dinv"), "y2"),
    ("adder", ("y2", "yP"), "y3"),
)


@dataclass(frozen=True)
class CycleBudget:
    loop_iterations: int
    cycles_per_iteration: int
    inversion_cycles: int
    init_cycles: int = 0
    post_cycles: int = 0
    mode: str = "paper"
    point: AffinePoint | None = field(default=None, compare=False, repr=False)

    @property
    def loop_cycles(self) -> int:
        return self.loop_iterations * self.cycles_per_iteration

    @property
    def total(self) -> int:
        return self.loop_cycles + self.inversion_cycles + self.init_cycles + self.post_cycles

    def record(self) -> dict:
        d = asdict(self)
        d.pop("point")
        d["total"] = self.total
        return d


def _mode_overheads(mode: str) -> tuple[int, int]:
    if mode == "paper":
        return 0, 0
    if mode == "honest":
        ready = {"xP", "yP", "b", "X1", "Z1", "X2", "Z2"}
        init = list_schedule(INIT_OPS, {"xP", "b"}).n_cycles
        before = list_schedule(RECOVERY_BEFORE_INVERSION, ready)
        produced = ready | {d for _, _, d in RECOVERY_BEFORE_INVERSION} | {"Dinv"}
        after = list_schedule(RECOVERY_AFTER_INVERSION, produced)
        return init, before.n_cycles + after.n_cycles
    raise ValueError(f"unknown accounting mode {mode!r}")


def simulate_ecpm(k: int, C: CurveParams, P: AffinePoint | None = None, mode: str = "paper") -> CycleBudget:
    """Run kP through the scheduled datapath and account its cycles.

    P defaults to the base point.  k is reduced modulo the group order; the
    loop runs t - 1 scheduled iterations for the reduced k of bit length t,
    and the inversion is charged its actual EEA step count.
    """
    if P is None:
        P = C.G
    if not on_curve(P, C):
        raise ValueError("point is not on the curve")
    init, post = _mode_overheads(mode)
    k %= C.order
    if k == 0 or P.is_infinity:
        return CycleBudget(0, CYCLES_PER_ITERATION, 0, 0, 0, mode, INFINITY)
    if not P.x:
        return CycleBudget(0, CYCLES_PER_ITERATION, 0, 0, 0, mode, scalar_mul_oracle(k, P, C))
    ctx = C.ctx
    xP = P.x
    Z2 = square(xP, ctx)
    S = LadderState(xP, ctx.one, add(square(Z2, ctx), C.b), Z2)
    t = k.bit_length()
    for i in range(t - 2, -1, -1):
        _, S = schedule_iteration(S, (k >> i) & 1, xP, C)
    Q, inv_cycles = _recover(S, P, C, FieldOps(ctx))
    return CycleBudget(t - 1, CYCLES_PER_ITERATION, inv_cycles, init, post, mode, Q)


def worst_case_budget(C: CurveParams, mode: str = "paper") -> CycleBudget:
    """Full-length scalar (t = bit length of n) with a 2m-step inversion."""
    init, post = _mode_overheads(mode)
    t = C.n.bit_length()
    return CycleBudget(t - 1, CYCLES_PER_ITERATION, 2 * C.ctx.m, init, post, mode)


def throughput_report(budget, freq_mhz: float) -> float:
    """Execution time in microseconds (cycles / MHz)."""
    if freq_mhz <= 0:
        raise ValueError("frequency must be positive")
    cycles = budget.total if isinstance(budget, CycleBudget) else budget
    return cycles / freq_mhz


# Reference figures for B-163 designs: (design, LUTs, MHz, cycles, time us, ATP x1000)
REFERENCE_DESIGNS = (
    ("Nyugen", 3806, 800, 52012, 65.0, 247.39),
    ("Imran", 10128, 135, 3426, 25.4, 257.25),
    ("Khan", 41090, 159, 450, 2.83, 116.28),
    ("3-unit ladder", 14195, 213, 1298, 6.09, 86.45),
)
MEASURED_POWER_W = 0.98


def reference_consistency() -> list[tuple[str, float, float]]:
    """Relative errors of cycles/freq vs printed time and LUT*time vs printed ATP."""
    out = []
    for name, lut, mhz, cycles, t_us, atp_k in REFERENCE_DESIGNS:
        time_err = abs(cycles / mhz - t_us) / t_us
        atp_err = abs(lut * t_us / 1000 - atp_k) / atp_k
        out.append((name, time_err, atp_err))
    return out
