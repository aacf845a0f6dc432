"""Analytical gate-count and delay model for GF(2)[x] multipliers.

Three families are modelled, each with delay T_a + c*T_x:

  schoolbook (pm)  AND n^2, XOR (n-1)^2, c = ceil(log2 n)
  karatsuba  (km)  AND n^lg3, XOR 6 n^lg3 - 8n + 2, c = 3 ceil(log2 n) - 1
  hybrid     (hm)  k Karatsuba stages over schoolbook leaves of n/2^k bits:
                   AND 3^k (n/2^k)^2,
                   XOR 3^k (n/2^k - 1)^2 + 8n((3/2)^k - 1) - 2(3^k - 1),
                   c = 3k + ceil(log2(n/2^k))

The hybrid formulas assume n divisible by 2^k; n is padded up to the next
multiple (163 becomes 164 for k = 2, giving 41-bit leaves).  Karatsuba gate
counts for non-powers of two involve n^lg3 and are reported as rational
approximations flagged ``exact=False``.

Measured FPGA figures are carried as reference data only.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, replace
from fractions import Fraction

__all__ = [
    "CostReport",
    "DelayExpr",
    "GateCount",
    "MeasuredRow",
    "Recommendation",
    "atp",
    "format_reports",
    "hm_cost",
    "km_cost",
    "padded_width",
    "pm_cost",
    "recommend_cutoff",
    "reference_tables",
    "report_records",
]

LOG2_3 = math.log2(3)


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def _is_pow2(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


@dataclass(frozen=True)
class GateCount:
    and_gates: Fraction
    xor_gates: Fraction
    exact: bool = True

    @property
    def total(self) -> Fraction:
        return self.and_gates + self.xor_gates


@dataclass(frozen=True)
class DelayExpr:
    ta_coeff: int
    tx_coeff: int

    def evaluate(self, ta: float = 1, tx: float = 1):
        return self.ta_coeff * ta + self.tx_coeff * tx

    def __str__(self):
        return f"{self.ta_coeff}*T_a + {self.tx_coeff}*T_x"


@dataclass(frozen=True)
class CostReport:
    family: str  # "schoolbook" | "karatsuba" | "hybrid"
    n: int
    k: int | None
    padded_n: int
    gates: GateCount
    delay: DelayExpr
    ta: float = 1
    tx: float = 1
    and_weight: float = 1
    xor_weight: float = 1

    @property
    def leaf_width(self) -> int | None:
        return None if self.k is None else self.padded_n >> self.k

    @property
    def area_model(self) -> Fraction:
        g = self.gates
        return Fraction(self.and_weight) * g.and_gates + Fraction(self.xor_weight) * g.xor_gates

    @property
    def atp_model(self) -> Fraction:
        """Weighted gate area x delay under the report's T_a, T_x weights."""
        return self.area_model * Fraction(self.delay.evaluate(self.ta, self.tx))

    def reweighted(self, ta=1, tx=1, and_weight=1, xor_weight=1) -> CostReport:
        return replace(self, ta=ta, tx=tx, and_weight=and_weight, xor_weight=xor_weight)

    def record(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "k": self.k,
            "padded_n": self.padded_n,
            "and_gates": _num(self.gates.and_gates),
            "xor_gates": _num(self.gates.xor_gates),
            "exact": self.gates.exact,
            "ta_coeff": self.delay.ta_coeff,
            "tx_coeff": self.delay.tx_coeff,
            "atp_model": _num(self.atp_model),
        }


def _num(q: Fraction):
    return int(q) if q.denominator == 1 else round(float(q), 3)


def _check_n(n: int) -> None:
    if n < 1:
        raise ValueError(f"operand width must be >= 1, got {n}")


def pm_cost(n: int, ta: float = 1, tx: float = 1) -> CostReport:
    _check_n(n)
    gates = GateCount(Fraction(n * n), Fraction((n - 1) ** 2))
    return CostReport("schoolbook", n, None, n, gates, DelayExpr(1, _ceil_log2(n)), ta, tx)


def km_cost(n: int, ta: float = 1, tx: float = 1) -> CostReport:
    _check_n(n)
    if _is_pow2(n):
        p = Fraction(3 ** (n.bit_length() - 1))
        exact = True
    else:
        p = Fraction(n**LOG2_3).limit_denominator(1000)
        exact = False
    gates = GateCount(p, 6 * p - 8 * n + 2, exact)
    # n = 1 is one AND gate: the -1 would make the XOR depth negative
    tx_coeff = max(0, 3 * _ceil_log2(n) - 1)
    return CostReport("karatsuba", n, None, n, gates, DelayExpr(1, tx_coeff), ta, tx)


def padded_width(n: int, k: int) -> int:
    step = 1 << k
    return -(-n // step) * step


def hm_cost(n: int, k: int, ta: float = 1, tx: float = 1) -> CostReport:
    _check_n(n)
    if not 0 <= k <= _ceil_log2(n):
        raise ValueError(f"k must be in [0, {_ceil_log2(n)}] for n={n}, got {k}")
    npad = padded_width(n, k)
    leaf = npad >> k
    three_k = 3**k
    and_gates = Fraction(three_k * leaf * leaf)
    xor_gates = Fraction(three_k * (leaf - 1) ** 2) + 8 * npad * (Fraction(3, 2) ** k - 1) - 2 * (three_k - 1)
    delay = DelayExpr(1, 3 * k + _ceil_log2(leaf))
    return CostReport("hybrid", n, k, npad, GateCount(and_gates, xor_gates), delay, ta, tx)


def atp(area, delay):
    """Area-delay product; lower is better."""
    if area <= 0 or delay <= 0:
        raise ValueError("area and delay must be positive")
    return area * delay


@dataclass(frozen=True)
class Recommendation:
    k: int
    cutoff: int
    report: CostReport
    sweep: list


def recommend_cutoff(n: int, ta: float = 1, tx: float = 1, and_weight: float = 1, xor_weight: float = 1) -> Recommendation:
    """Sweep every admissible k and pick the lowest modelled ATP.

    Area is and_weight*AND + xor_weight*XOR.  Ties go to the smaller k.
    """
    if n < 2:
        raise ValueError("need n >= 2 to have a choice of stages")
    sweep = [hm_cost(n, k).reweighted(ta, tx, and_weight, xor_weight) for k in range(_ceil_log2(n) + 1)]
    best = min(sweep, key=lambda r: (r.atp_model, r.k))
    return Recommendation(best.k, best.leaf_width, best, sweep)


# --- measured reference data ---------------------------------------------


@dataclass(frozen=True)
class MeasuredRow:
    family: str
    operand_size: int
    lut: int
    delay_ns: float
    atp: float


_TABLES = {
    # Virtex-7 measurements: (operand size, LUT, delay ns, printed ATP)
    "karatsuba": [
        (6, 16, 6.002, 96.03),
        (11, 58, 7.059, 409.42),
        (21, 206, 9.083, 1871.10),
        (41, 695, 10.562, 7340.59),
        (82, 2306, 13.280, 30623.68),
        (163, 7762, 20.282, 157428.88),
    ],
    "schoolbook": [
        (6, 15, 5.718, 85.77),
        (11, 49, 6.363, 311.79),
        (21, 185, 8.116, 1501.46),
        (41, 694, 9.655, 6700.57),
        (82, 2599, 12.031, 31268.57),
        (163, 9982, 18.129, 180963.68),
    ],
}


def reference_tables() -> list[MeasuredRow]:
    return [MeasuredRow(fam, *row) for fam, rows in _TABLES.items() for row in rows]


# --- output ---------------------------------------------------------------


def report_records(reports) -> str:
    """Line-delimited JSON, one record per report."""
    return "\n".join(json.dumps(r.record()) for r in reports)


def format_reports(reports) -> str:
    header = f"{'family':<11}{'n':>5}{'k':>4}{'pad':>5}{'leaf':>6}{'AND':>12}{'XOR':>12}  {'delay':<16}{'ATP(model)':>14}"
    lines = [header, "-" * len(header)]
    for r in reports:
        mark = "" if r.gates.exact else "~"
        k = "-" if r.k is None else str(r.k)
        leaf = "-" if r.leaf_width is None else str(r.leaf_width)
        lines.append(
            f"{r.family:<11}{r.n:>5}{k:>4}{r.padded_n:>5}{leaf:>6}"
            f"{mark + str(_num(r.gates.and_gates)):>12}{mark + str(_num(r.gates.xor_gates)):>12}  "
            f"{str(r.delay):<16}{_num(r.atp_model):>14}"
        )
    return "\n".join(lines)


def format_reference_tables() -> str:
    lines = [f"{'family':<11}{'size':>5}{'LUT':>7}{'delay ns':>10}{'ATP':>12}"]
    for row in reference_tables():
        lines.append(f"{row.family:<11}{row.operand_size:>5}{row.lut:>7}{row.delay_ns:>10.3f}{row.atp:>12.2f}")
    return "\n".join(lines)


def reference_records() -> str:
    return "\n".join(json.dumps(asdict(r)) for r in reference_tables())
