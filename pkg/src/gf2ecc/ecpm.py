"""Point multiplication on y^2 + xy = x^3 + ax^2 + b over GF(2^m).

The production path is the x-only Montgomery ladder in projective (X, Z)
coordinates with y recovered once at the end.  The affine group law, a
plain double-and-add, and the two-register affine ladder are kept alongside
as oracles for it.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .gf2m_core import (
    FieldContext,
    FieldElement,
    FieldOps,
    add,
    invert,
    mul,
    square,
)

__all__ = [
    "INFINITY",
    "AffinePoint",
    "CurveParams",
    "DegenerateBasePointError",
    "InvalidPointError",
    "LadderResult",
    "LadderState",
    "bundled_curve",
    "double_and_add",
    "format_curve",
    "format_point",
    "ladder",
    "ladder_init",
    "ladder_step",
    "load_curve",
    "load_field",
    "negate",
    "on_curve",
    "parse_curve",
    "parse_point",
    "point_add_affine",
    "point_double_affine",
    "recover_and_normalize",
    "scalar_mul",
    "scalar_mul_detailed",
    "scalar_mul_oracle",
    "x_add_relation_check",
]


class InvalidPointError(ValueError):
    """The point does not satisfy the curve equation."""


class DegenerateBasePointError(ValueError):
    """The ladder cannot start from a base point with x = 0."""


@dataclass(frozen=True)
class AffinePoint:
    x: FieldElement | None
    y: FieldElement | None

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def __repr__(self):
        if self.x is None:
            return "AffinePoint(INF)"
        return f"AffinePoint(x=0x{self.x.value:x}, y=0x{self.y.value:x})"


INFINITY = AffinePoint(None, None)


@dataclass(frozen=True)
class CurveParams:
    ctx: FieldContext
    a: FieldElement
    b: FieldElement
    G: AffinePoint
    n: int
    h: int = 1
    name: str = ""

    def __post_init__(self):
        if not self.b:
            raise ValueError("b must be nonzero")
        if self.G.is_infinity or not on_curve(self.G, self):
            raise InvalidPointError("base point is not a finite point on the curve")

    @property
    def order(self) -> int:
        """Group order h*n; every point's order divides it."""
        return self.h * self.n

    def point(self, x: int, y: int) -> AffinePoint:
        return AffinePoint(self.ctx.element(x), self.ctx.element(y))


@dataclass(frozen=True)
class LadderState:
    X1: FieldElement
    Z1: FieldElement
    X2: FieldElement
    Z2: FieldElement

    def swapped(self) -> LadderState:
        return LadderState(self.X2, self.Z2, self.X1, self.Z1)


@dataclass(frozen=True)
class LadderResult:
    point: AffinePoint
    scalar: int  # k after reduction modulo the group order
    iterations: int
    inversion_steps: int
    oracle_fallback: bool = False  # base point had x = 0


# --- affine group law -----------------------------------------------------


def on_curve(P: AffinePoint, C: CurveParams) -> bool:
    if P.is_infinity:
        return True
    ctx = C.ctx
    if P.x.width != ctx.m or P.y.width != ctx.m:
        return False
    x, y = P.x, P.y
    x2 = square(x, ctx)
    lhs = add(square(y, ctx), mul(x, y, ctx))
    rhs = add(add(mul(x2, x, ctx), mul(C.a, x2, ctx)), C.b)
    return lhs == rhs


def negate(P: AffinePoint) -> AffinePoint:
    if P.is_infinity:
        return P
    return AffinePoint(P.x, add(P.x, P.y))


def point_double_affine(A: AffinePoint, C: CurveParams) -> AffinePoint:
    if A.is_infinity or not A.x:
        return INFINITY
    ctx = C.ctx
    lam = add(A.x, mul(A.y, invert(A.x, ctx), ctx))
    x3 = add(add(square(lam, ctx), lam), C.a)
    y3 = add(add(square(A.x, ctx), mul(lam, x3, ctx)), x3)
    return AffinePoint(x3, y3)


def point_add_affine(A: AffinePoint, B: AffinePoint, C: CurveParams) -> AffinePoint:
    if A.is_infinity:
        return B
    if B.is_infinity:
        return A
    ctx = C.ctx
    if A.x == B.x:
        if A.y == B.y:
            return point_double_affine(A, C)
        return INFINITY  # B = -A
    dx = add(A.x, B.x)
    lam = mul(add(A.y, B.y), invert(dx, ctx), ctx)
    x3 = add(add(add(square(lam, ctx), lam), dx), C.a)
    y3 = add(add(mul(lam, add(A.x, x3), ctx), x3), A.y)
    return AffinePoint(x3, y3)


def double_and_add(k: int, P: AffinePoint, C: CurveParams) -> AffinePoint:
    """Right-to-left binary method; the plain oracle."""
    if k < 0:
        k, P = -k, negate(P)
    R = INFINITY
    while k:
        if k & 1:
            R = point_add_affine(R, P, C)
        P = point_double_affine(P, C)
        k >>= 1
    return R


def scalar_mul_oracle(k: int, P: AffinePoint, C: CurveParams) -> AffinePoint:
    """Two-register affine ladder: A = s_j P, B = (s_j + 1) P."""
    A, B = INFINITY, P
    for i in range(k.bit_length() - 1, -1, -1):
        if (k >> i) & 1:
            A, B = point_add_affine(A, B, C), point_double_affine(B, C)
        else:
            A, B = point_double_affine(A, C), point_add_affine(A, B, C)
    return A


def x_add_relation_check(A: AffinePoint, B: AffinePoint, C: CurveParams) -> bool:
    """x(A+B) = x(A-B) + t + t^2 with t = x_B / (x_A + x_B).

    Requires finite A, B with A != +-B.
    """
    if A.is_infinity or B.is_infinity:
        raise ValueError("points must be finite")
    if A.x == B.x:
        raise ValueError("relation needs A != +-B")
    ctx = C.ctx
    s = point_add_affine(A, B, C)
    d = point_add_affine(A, negate(B), C)
    if s.is_infinity or d.is_infinity:
        return False
    t = mul(B.x, invert(add(A.x, B.x), ctx), ctx)
    return s.x == add(add(d.x, t), square(t, ctx))


# --- projective Montgomery ladder ----------------------------------------


def ladder_init(xP: FieldElement, C: CurveParams) -> LadderState:
    """(X1 : Z1) = P and (X2 : Z2) = 2P."""
    if not xP:
        raise DegenerateBasePointError("x_P = 0: point of order two")
    ctx = C.ctx
    Z2 = square(xP, ctx)
    X2 = add(square(Z2, ctx), C.b)
    return LadderState(xP, ctx.one, X2, Z2)


def ladder_step(S: LadderState, k_i: int, xP: FieldElement, C: CurveParams, ops: FieldOps | None = None) -> LadderState:
    """One ladder iteration: 6 multiplications, 5 squarings, 3 additions.

    Bit 1 adds into register 1 and doubles register 2; bit 0 is the mirror
    image with the registers swapped.  Z = 0 encodes the point at infinity
    and propagates without special cases.
    """
    if ops is None:
        ops = FieldOps(C.ctx)
    if k_i:
        Xa, Za, Xd, Zd = S.X1, S.Z1, S.X2, S.Z2
    else:
        Xa, Za, Xd, Zd = S.X2, S.Z2, S.X1, S.Z1
    # addition into the "a" registers
    t1 = ops.mul(Xa, Zd)
    t2 = ops.mul(Xd, Za)
    Za_new = ops.square(ops.add(t1, t2))
    Xa_new = ops.add(ops.mul(xP, Za_new), ops.mul(t1, t2))
    # doubling of the "d" registers
    Xd2 = ops.square(Xd)
    Zd2 = ops.square(Zd)
    Xd_new = ops.add(ops.square(Xd2), ops.mul(C.b, ops.square(Zd2)))
    Zd_new = ops.mul(Xd2, Zd2)
    if k_i:
        return LadderState(Xa_new, Za_new, Xd_new, Zd_new)
    return LadderState(Xd_new, Zd_new, Xa_new, Za_new)


def ladder(k: int, xP: FieldElement, C: CurveParams, ops: FieldOps | None = None, on_step=None) -> LadderState:
    """Run the ladder for k >= 1 over bits t-2 .. 0 of k.

    ``on_step(i, state)`` is called after each iteration if given.
    """
    if k < 1:
        raise ValueError("ladder needs k >= 1")
    if ops is None:
        ops = FieldOps(C.ctx)
    S = ladder_init(xP, C)
    for i in range(k.bit_length() - 2, -1, -1):
        S = ladder_step(S, (k >> i) & 1, xP, C, ops)
        if on_step is not None:
            on_step(i, S)
    return S


def _recover(S: LadderState, P: AffinePoint, C: CurveParams, ops: FieldOps) -> tuple[AffinePoint, int]:
    if not S.Z1:
        return INFINITY, 0
    if not S.Z2:
        # (k+1)P = O, so kP = -P; the y formula would divide by zero here
        return negate(P), 0
    xP, yP = P.x, P.y
    Z1Z2 = ops.mul(S.Z1, S.Z2)
    inv, steps = ops.invert(ops.mul(xP, Z1Z2))
    xPZ2 = ops.mul(xP, S.Z2)
    x3 = ops.mul(ops.mul(S.X1, xPZ2), inv)  # X1/Z1 via the shared inverse
    u = ops.mul(ops.add(S.X1, ops.mul(xP, S.Z1)), ops.add(S.X2, xPZ2))
    v = ops.mul(ops.add(ops.square(xP), yP), Z1Z2)
    y3 = ops.add(ops.mul(ops.mul(ops.add(xP, x3), ops.add(u, v)), inv), yP)
    return AffinePoint(x3, y3), steps


def recover_and_normalize(S: LadderState, P: AffinePoint, C: CurveParams) -> AffinePoint:
    """Affine kP from the final ladder registers and the base point P.

    Uses a single inversion of x_P Z1 Z2 for both x and y.
    """
    if P.is_infinity or not P.x:
        raise DegenerateBasePointError("recovery needs a finite P with x_P != 0")
    return _recover(S, P, C, FieldOps(C.ctx))[0]


def scalar_mul_detailed(k: int, P: AffinePoint, C: CurveParams, ops: FieldOps | None = None) -> LadderResult:
    if P.is_infinity:
        return LadderResult(INFINITY, k % C.order, 0, 0)
    if not on_curve(P, C):
        raise InvalidPointError("point is not on the curve")
    k %= C.order
    if k == 0:
        return LadderResult(INFINITY, 0, 0, 0)
    if not P.x:
        return LadderResult(scalar_mul_oracle(k, P, C), k, 0, 0, oracle_fallback=True)
    if ops is None:
        ops = FieldOps(C.ctx)
    S = ladder(k, P.x, C, ops)
    Q, steps = _recover(S, P, C, ops)
    return LadderResult(Q, k, k.bit_length() - 1, steps)


def scalar_mul(k: int, P: AffinePoint, C: CurveParams) -> AffinePoint:
    """kP by the projective Montgomery ladder.

    k is reduced modulo the group order h*n first, so any integer works.
    """
    return scalar_mul_detailed(k, P, C).point


# --- text formats ---------------------------------------------------------

_CURVE_KEYS = ("m", "f", "a", "b", "gx", "gy", "n", "h")


def _parse_kv(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key = value")
        out[key.strip().lower()] = value.strip()
    return out


def _hex(s: str) -> int:
    s = s.lower()
    return int(s[2:] if s.startswith("0x") else s, 16)


def _field_from(kv: dict[str, str], cutoff: int | None) -> FieldContext:
    for key in ("m", "f"):
        if key not in kv:
            raise ValueError(f"missing key {key!r}")
    m = _hex(kv["m"])
    if cutoff is None:
        return FieldContext(m, _hex(kv["f"]))
    return FieldContext(m, _hex(kv["f"]), cutoff)


def parse_curve(text: str, name: str = "", cutoff: int | None = None) -> CurveParams:
    """Parse the flat ``key = value`` curve format (all values hex)."""
    kv = _parse_kv(text)
    missing = [k for k in _CURVE_KEYS if k not in kv]
    if missing:
        raise ValueError(f"missing keys: {', '.join(missing)}")
    ctx = _field_from(kv, cutoff)
    G = AffinePoint(ctx.from_hex(kv["gx"]), ctx.from_hex(kv["gy"]))
    return CurveParams(
        ctx,
        ctx.from_hex(kv["a"]),
        ctx.from_hex(kv["b"]),
        G,
        _hex(kv["n"]),
        _hex(kv["h"]),
        kv.get("name", name),
    )


def format_curve(C: CurveParams) -> str:
    ctx = C.ctx
    lines = [f"name = {C.name}"] if C.name else []
    lines += [
        f"m = {ctx.m:x}",
        f"f = {ctx.f:x}",
        f"a = {ctx.to_hex(C.a)}",
        f"b = {ctx.to_hex(C.b)}",
        f"gx = {ctx.to_hex(C.G.x)}",
        f"gy = {ctx.to_hex(C.G.y)}",
        f"n = {C.n:x}",
        f"h = {C.h:x}",
    ]
    return "\n".join(lines) + "\n"


def _read_text(path) -> tuple[str, str]:
    p = Path(path)
    if not p.exists():
        # bare names such as "b163" or "b163.curve" resolve to bundled files
        bundled = resources.files(__package__) / "curves" / (p.stem + ".curve")
        if p.parent == Path(".") and bundled.is_file():
            return bundled.read_text(), p.stem
        raise FileNotFoundError(path)
    return p.read_text(), p.stem


def load_curve(path, cutoff: int | None = None) -> CurveParams:
    text, stem = _read_text(path)
    return parse_curve(text, stem, cutoff)


def load_field(path, cutoff: int | None = None) -> FieldContext:
    """FieldContext from a curve file, or from a file holding just m and f."""
    text, _ = _read_text(path)
    return _field_from(_parse_kv(text), cutoff)


def bundled_curve(name: str) -> CurveParams:
    return load_curve(name)


def format_point(P: AffinePoint, C: CurveParams) -> str:
    if P.is_infinity:
        return "INF"
    return f"{C.ctx.to_hex(P.x)},{C.ctx.to_hex(P.y)}"


def parse_point(text: str, C: CurveParams) -> AffinePoint:
    """``INF``, ``G`` or ``x_hex,y_hex``; finite points must lie on C."""
    s = text.strip()
    if s.upper() == "INF":
        return INFINITY
    if s.upper() == "G":
        return C.G
    xs, sep, ys = s.partition(",")
    if not sep:
        raise ValueError(f"malformed point {text!r}")
    P = AffinePoint(C.ctx.from_hex(xs), C.ctx.from_hex(ys))
    if not on_curve(P, C):
        raise InvalidPointError(f"point {text!r} is not on the curve")
    return P
