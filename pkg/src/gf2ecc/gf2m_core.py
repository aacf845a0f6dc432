"""Polynomial-basis arithmetic over GF(2^m).

Elements are bit vectors: bit i of ``value`` is the coefficient of x^i.
Multiplication comes in three flavours that all produce the same unreduced
(carry-less) product:

* ``mul_schoolbook``: conventional long multiplication,
* ``mul_karatsuba``: recursive three-way splitting down to single bits,
* ``mul_hybrid``: Karatsuba splitting that stops at ``ctx.cutoff`` bits and
  finishes each leaf with the schoolbook multiplier (41 bits by default,
  giving the 163 -> 82 -> 41 tree for B-163).

Software leaves use the integer multiplier as a word-parallel schoolbook
multiplier: every coefficient is moved into its own byte ("slot"), so the
integer product of two spread operands holds, in slot i, the number of
partial products a_j*b_{i-j} that are set.  The low bit of that count is the
XOR of the partial products, which is the carry-less coefficient.  Karatsuba
splitting and the overlap additions only shift by whole slots and XOR, so
the whole recursion can stay in the spread domain and the result is
compacted once at the end.
"""

from __future__ import annotations

import functools
import random
from collections import Counter
from dataclasses import dataclass, field

__all__ = [
    "B163_POLY",
    "DEFAULT_CUTOFF",
    "FieldContext",
    "FieldElement",
    "FieldOps",
    "CountingFieldOps",
    "HybridPlan",
    "NonInvertibleError",
    "RawProduct",
    "WidthMismatchError",
    "add",
    "hybrid_plan",
    "invert",
    "invert_with_count",
    "is_irreducible",
    "mul",
    "mul_hybrid",
    "mul_karatsuba",
    "mul_schoolbook",
    "reduce",
    "reduce_b163",
    "reduce_generic",
    "square",
]

B163_POLY = (1 << 163) | (1 << 7) | (1 << 6) | (1 << 3) | 1
DEFAULT_CUTOFF = 41
IRREDUCIBILITY_CHECK_MAX_M = 16


class WidthMismatchError(ValueError):
    """Operands of different widths were combined."""


class NonInvertibleError(ZeroDivisionError):
    """Inversion of zero was requested."""


class _Bits:
    __slots__ = ("value", "width")

    def __init__(self, value: int, width: int):
        if width < 1:
            raise ValueError(f"width must be positive, got {width}")
        if value < 0 or value >> width:
            raise ValueError(f"value 0x{value:x} does not fit in {width} bits")
        self.value = value
        self.width = width

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return self.value == other.value and self.width == other.width

    def __hash__(self):
        return hash((type(self).__name__, self.value, self.width))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{type(self).__name__}(0x{self.value:x}, width={self.width})"

    def bits(self) -> list[int]:
        """Coefficients as a list, index i holding the coefficient of x^i."""
        return [(self.value >> i) & 1 for i in range(self.width)]


class FieldElement(_Bits):
    """Bit vector of ``width`` polynomial coefficients over GF(2)."""

    __slots__ = ()


class RawProduct(_Bits):
    """Unreduced carry-less product of two width-n operands (width 2n-1)."""

    __slots__ = ()


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def _degree(p: int) -> int:
    return p.bit_length() - 1


def _polymod(a: int, b: int) -> int:
    db = _degree(b)
    while a and _degree(a) >= db:
        a ^= b << (_degree(a) - db)
    return a


def is_irreducible(f: int) -> bool:
    """Trial division of f by every polynomial of degree 1..deg(f)//2."""
    m = _degree(f)
    if m < 1:
        return False
    for d in range(1, m // 2 + 1):
        for g in range(1 << d, 1 << (d + 1)):
            if _polymod(f, g) == 0:
                return False
    return True


@dataclass(frozen=True)
class SpreadConsts:
    """Per-field constants for multiplying and reducing in the spread domain."""

    sb: int  # bytes per slot
    shift: int  # bit offset of slot m
    mask: int  # slots 0 .. m-1
    ones: int  # low bit of each of m slots
    taps: int  # spread image of f - x^m

    @classmethod
    def build(cls, m: int, taps: tuple, sb: int) -> SpreadConsts:
        unit = b"\x00" * (sb - 1) + b"\x01"
        shift = (m * sb) << 3
        return cls(sb, shift, (1 << shift) - 1, int.from_bytes(unit * m, "big"), sum(1 << ((t * sb) << 3) for t in taps))


@dataclass(frozen=True)
class FieldContext:
    """GF(2^m) defined by the irreducible polynomial ``f`` (bit m and bit 0 set).

    Irreducibility is verified by exhaustive trial division for m <= 16;
    larger moduli are trusted (they come from standard curve definitions).
    """

    m: int
    f: int
    cutoff: int = DEFAULT_CUTOFF
    mask: int = field(init=False, repr=False, compare=False)
    taps: tuple = field(init=False, repr=False, compare=False)  # exponents of f below m
    spread: SpreadConsts = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        m, f = self.m, self.f
        if m < 1:
            raise ValueError(f"field degree must be positive, got {m}")
        if f.bit_length() != m + 1 or not f & 1:
            raise ValueError(f"modulus 0x{f:x} must have bits {m} and 0 set")
        if m <= IRREDUCIBILITY_CHECK_MAX_M and not is_irreducible(f):
            raise ValueError(f"modulus 0x{f:x} is reducible")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be positive, got {self.cutoff}")
        # a cutoff above m just means "schoolbook everywhere"
        object.__setattr__(self, "cutoff", min(self.cutoff, m))
        object.__setattr__(self, "mask", (1 << m) - 1)
        object.__setattr__(self, "taps", tuple(i for i in range(m) if (f >> i) & 1))
        object.__setattr__(self, "spread", SpreadConsts.build(m, self.taps, _slot_bytes(max(self.cutoff, len(self.taps)))))

    def with_cutoff(self, cutoff: int) -> FieldContext:
        return FieldContext(self.m, self.f, cutoff)

    @property
    def hex_digits(self) -> int:
        return (self.m + 3) // 4

    def element(self, value: int) -> FieldElement:
        return FieldElement(value, self.m)

    @property
    def zero(self) -> FieldElement:
        return FieldElement(0, self.m)

    @property
    def one(self) -> FieldElement:
        return FieldElement(1, self.m)

    def random_element(self, rng: random.Random, nonzero: bool = False) -> FieldElement:
        while True:
            v = rng.getrandbits(self.m)
            if v or not nonzero:
                return FieldElement(v, self.m)

    def to_hex(self, a: FieldElement) -> str:
        """Fixed-width big-endian hex (most significant coefficient first)."""
        _check_width(a, self.m)
        return format(a.value, f"0{self.hex_digits}x")

    def from_hex(self, text: str) -> FieldElement:
        digits = text.strip().lower()
        if digits.startswith("0x"):
            digits = digits[2:]
        if not digits or len(digits) > self.hex_digits:
            raise ValueError(f"expected 1..{self.hex_digits} hex digits for m={self.m}, got {text!r}")
        try:
            value = int(digits, 16)
        except ValueError:
            raise ValueError(f"malformed hex {text!r}") from None
        if value >> self.m:
            raise ValueError(f"0x{digits} exceeds {self.m} bits")
        return FieldElement(value, self.m)


def _check_width(a: _Bits, width: int) -> None:
    if a.width != width:
        raise WidthMismatchError(f"expected width {width}, got {a.width}")


def _check_pair(a: _Bits, b: _Bits) -> int:
    if a.width != b.width:
        raise WidthMismatchError(f"width mismatch: {a.width} vs {b.width}")
    return a.width


# --- spread domain --------------------------------------------------------

_BIT_TO_BYTE = bytes.maketrans(b"01", b"\x00\x01")
_PARITY_CHAR = bytes(0x30 | (i & 1) for i in range(256))


def _slot_bytes(leaf_width: int) -> int:
    # a slot must hold the largest column count of a leaf product
    return 1 if leaf_width < 0x100 else 2


def _spread(a: int, s: int) -> int:
    """Move bit i of ``a`` to the low bit of byte-slot i (slot = s bytes)."""
    t = format(a, "b").encode().translate(_BIT_TO_BYTE)
    if s == 1:
        return int.from_bytes(t, "big")
    buf = bytearray(s * len(t))
    buf[s - 1 :: s] = t
    return int.from_bytes(buf, "big")


def _compact(p: int, nslots: int, s: int) -> int:
    """Inverse of ``_spread`` that keeps the parity of every slot."""
    raw = p.to_bytes(s * nslots, "big")
    if s > 1:
        raw = raw[s - 1 :: s]
    return int(raw.translate(_PARITY_CHAR), 2)


# Width at or below which pure-Karatsuba sub-products are memoised.
_MEMO_WIDTH = 6


def _karatsuba(a: int, b: int, n: int, cutoff: int, sb: int, leaves) -> int:
    """Carry-less product of spread n-slot operands.

    Splits at h = ceil(n/2): odd n is treated as n+1 with a zero MSB, so the
    high half is the remaining n-h (<= h) slots.  Widths <= cutoff go to the
    schoolbook leaf, width 1 is a single AND.
    """
    if n <= cutoff:
        if leaves is not None:
            leaves.append(n)
        return a * b
    if n <= _MEMO_WIDTH and leaves is None:
        return _karatsuba_small(a, b, n, cutoff, sb)
    h = (n + 1) >> 1
    sh = (h * sb) << 3
    lo = (1 << sh) - 1
    a_lo, a_hi = a & lo, a >> sh
    b_lo, b_hi = b & lo, b >> sh
    if leaves is not None or h > 2 * cutoff:
        m0 = _karatsuba(a_lo, b_lo, h, cutoff, sb, leaves)
        m2 = _karatsuba(a_hi, b_hi, h, cutoff, sb, leaves)
        m1 = _karatsuba(a_lo ^ a_hi, b_lo ^ b_hi, h, cutoff, sb, leaves)
    elif h <= cutoff:
        m0 = a_lo * b_lo
        m2 = a_hi * b_hi
        m1 = (a_lo ^ a_hi) * (b_lo ^ b_hi)
    else:
        # exactly one more stage: unrolled, leaves inline
        q = (h + 1) >> 1
        s2 = (q * sb) << 3
        l2 = (1 << s2) - 1
        x0, x1, y0, y1 = a_lo & l2, a_lo >> s2, b_lo & l2, b_lo >> s2
        p0, p2 = x0 * y0, x1 * y1
        m0 = p0 ^ ((p0 ^ p2 ^ (x0 ^ x1) * (y0 ^ y1)) << s2) ^ (p2 << (s2 << 1))
        x0, x1, y0, y1 = a_hi & l2, a_hi >> s2, b_hi & l2, b_hi >> s2
        p0, p2 = x0 * y0, x1 * y1
        m2 = p0 ^ ((p0 ^ p2 ^ (x0 ^ x1) * (y0 ^ y1)) << s2) ^ (p2 << (s2 << 1))
        c0, c1 = a_lo ^ a_hi, b_lo ^ b_hi
        x0, x1, y0, y1 = c0 & l2, c0 >> s2, c1 & l2, c1 >> s2
        p0, p2 = x0 * y0, x1 * y1
        m1 = p0 ^ ((p0 ^ p2 ^ (x0 ^ x1) * (y0 ^ y1)) << s2) ^ (p2 << (s2 << 1))
    # overlap circuit: M2 x^2h + (M2 + M1 + M0) x^h + M0
    return m0 ^ ((m0 ^ m1 ^ m2) << sh) ^ (m2 << (sh << 1))


@functools.lru_cache(maxsize=1 << 16)
def _karatsuba_small(a: int, b: int, n: int, cutoff: int, sb: int) -> int:
    h = (n + 1) >> 1
    sh = (h * sb) << 3
    lo = (1 << sh) - 1
    a_lo, a_hi = a & lo, a >> sh
    b_lo, b_hi = b & lo, b >> sh
    m0 = _karatsuba(a_lo, b_lo, h, cutoff, sb, None)
    m2 = _karatsuba(a_hi, b_hi, h, cutoff, sb, None)
    m1 = _karatsuba(a_lo ^ a_hi, b_lo ^ b_hi, h, cutoff, sb, None)
    return m0 ^ ((m0 ^ m1 ^ m2) << sh) ^ (m2 << (sh << 1))


def _clmul(a: int, b: int, n: int, cutoff: int, leaves=None) -> int:
    sb = _slot_bytes(min(cutoff, n))
    p = _karatsuba(_spread(a, sb), _spread(b, sb), n, cutoff, sb, leaves)
    return _compact(p, 2 * n - 1, sb)


def _reduce_spread(p: int, k: SpreadConsts) -> int:
    """Reduce a spread product modulo f without leaving the spread domain.

    The parity bits above slot m are folded back with one integer multiply
    by the spread taps of f: each slot then receives at most len(taps) ones,
    which cannot carry out of a slot, so bit 0 stays the XOR of the terms.
    """
    shift, mask, ones, taps = k.shift, k.mask, k.ones, k.taps
    while True:
        h = (p >> shift) & ones
        p &= mask
        if not h:
            return p
        p ^= h * taps


_new = object.__new__


def _element(value: int, width: int) -> FieldElement:
    # internal results are in range by construction; skip re-validation
    e = _new(FieldElement)
    e.value = value
    e.width = width
    return e


# --- multiplication -------------------------------------------------------


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Coefficient-wise XOR."""
    n = _check_pair(a, b)
    return FieldElement(a.value ^ b.value, n)


def mul_schoolbook(a: FieldElement, b: FieldElement) -> RawProduct:
    n = _check_pair(a, b)
    return RawProduct(_clmul(a.value, b.value, n, n), 2 * n - 1)


def mul_karatsuba(a: FieldElement, b: FieldElement) -> RawProduct:
    n = _check_pair(a, b)
    return RawProduct(_clmul(a.value, b.value, n, 1), 2 * n - 1)


def mul_hybrid(a: FieldElement, b: FieldElement, ctx_or_cutoff, leaves: list | None = None) -> RawProduct:
    """Karatsuba down to the cutoff width, schoolbook below it.

    ``ctx_or_cutoff`` is a FieldContext (its cutoff is used) or a plain int.
    If ``leaves`` is a list, the width of every schoolbook leaf is appended.
    """
    n = _check_pair(a, b)
    cutoff = ctx_or_cutoff if isinstance(ctx_or_cutoff, int) else ctx_or_cutoff.cutoff
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    return RawProduct(_clmul(a.value, b.value, n, cutoff, leaves), 2 * n - 1)


@dataclass(frozen=True)
class HybridPlan:
    n: int
    cutoff: int
    stages: int
    leaves: Counter

    @property
    def leaf_count(self) -> int:
        return sum(self.leaves.values())


def hybrid_plan(n: int, cutoff: int) -> HybridPlan:
    """Shape of the hybrid recursion tree: Karatsuba depth and leaf widths."""

    def walk(w, depth):
        if w <= cutoff:
            return depth, Counter({w: 1})
        h = (w + 1) >> 1
        d, leaves = walk(h, depth + 1)
        return d, Counter({k: 3 * v for k, v in leaves.items()})

    stages, leaves = walk(n, 0)
    return HybridPlan(n, cutoff, stages, leaves)


# --- reduction ------------------------------------------------------------


def reduce_generic(p: int, ctx: FieldContext) -> int:
    """Shift-XOR f under every set bit from degree 2m-2 down to m."""
    m, f = ctx.m, ctx.f
    for i in range(2 * m - 2, m - 1, -1):
        if (p >> i) & 1:
            p ^= f << (i - m)
    return p


_B163_MASK = (1 << 163) - 1


def reduce_b163(p: int) -> int:
    """Fold with x^163 = x^7 + x^6 + x^3 + 1; two folds cover degree <= 324."""
    h = p >> 163
    p = (p & _B163_MASK) ^ h ^ (h << 3) ^ (h << 6) ^ (h << 7)
    h = p >> 163
    return (p & _B163_MASK) ^ h ^ (h << 3) ^ (h << 6) ^ (h << 7)


def _reduce_int(p: int, ctx: FieldContext) -> int:
    if ctx.f == B163_POLY:
        return reduce_b163(p)
    return reduce_generic(p, ctx)


def reduce(p: RawProduct, ctx: FieldContext) -> FieldElement:
    _check_width(p, 2 * ctx.m - 1)
    return FieldElement(_reduce_int(p.value, ctx), ctx.m)


def mul(a: FieldElement, b: FieldElement, ctx: FieldContext) -> FieldElement:
    m = ctx.m
    if a.width != m or b.width != m:
        raise WidthMismatchError(f"expected width {m}, got {a.width} and {b.width}")
    k = ctx.spread
    sb, shift, mask = k.sb, k.shift, k.mask
    # both operands spread in one pass: a in slots m.., b in slots 0..m-1
    x = _spread((a.value << m) | b.value, sb)
    p = _karatsuba(x >> shift, x & mask, m, ctx.cutoff, sb, None)
    return _element(_compact(_reduce_spread(p, k), m, sb), m)


def square(a: FieldElement, ctx: FieldContext) -> FieldElement:
    """Spread coefficient i to 2i (pure wiring), then reduce (XOR only)."""
    _check_width(a, ctx.m)
    t = format(a.value, "b").encode()
    buf = bytearray(b"0") * (2 * len(t) - 1)
    buf[0::2] = t
    return FieldElement(_reduce_int(int(buf, 2), ctx), ctx.m)


# --- inversion ------------------------------------------------------------


def invert_with_count(a: FieldElement, ctx: FieldContext) -> tuple[FieldElement, int]:
    """Extended Euclid in GF(2)[x]; returns (a^-1, degree-reduction steps).

    Each step cancels the leading term of the higher-degree remainder, so
    deg(u) + deg(v) drops by at least one per step and the count is < 2m.
    """
    _check_width(a, ctx.m)
    if not a.value:
        raise NonInvertibleError("zero has no inverse")
    u, v = a.value, ctx.f
    g1, g2 = 1, 0
    steps = 0
    while u != 1:
        j = u.bit_length() - v.bit_length()
        if j < 0:
            u, v = v, u
            g1, g2 = g2, g1
            j = -j
        u ^= v << j
        g1 ^= g2 << j
        steps += 1
    return FieldElement(g1, ctx.m), steps


def invert(a: FieldElement, ctx: FieldContext) -> FieldElement:
    return invert_with_count(a, ctx)[0]


# --- operation counting ---------------------------------------------------


class FieldOps:
    """Field operations bound to one context."""

    def __init__(self, ctx: FieldContext):
        self.ctx = ctx

    def add(self, a, b):
        return add(a, b)

    def mul(self, a, b):
        return mul(a, b, self.ctx)

    def square(self, a):
        return square(a, self.ctx)

    def invert(self, a):
        return invert_with_count(a, self.ctx)


class CountingFieldOps(FieldOps):
    """FieldOps that tallies calls per operation kind in ``counts``."""

    def __init__(self, ctx: FieldContext):
        super().__init__(ctx)
        self.counts = Counter()

    def add(self, a, b):
        self.counts["add"] += 1
        return super().add(a, b)

    def mul(self, a, b):
        self.counts["mul"] += 1
        return super().mul(a, b)

    def square(self, a):
        self.counts["square"] += 1
        return super().square(a)

    def invert(self, a):
        self.counts["invert"] += 1
        return super().invert(a)
