#!/usr/bin/env python3
"""Search GF(2^m) for a small curve y^2 + xy = x^3 + ax^2 + b suited to exhaustive tests.

Every (a, b) with b != 0 is tried; the point count comes from enumerating
all (x, y).  The winner maximises the largest prime factor of the group
order (ties: smaller order, then smaller a, then smaller b).  The base point
is the smallest (x, y) of that prime order.

    python tools/find_toy_curve.py            # m = 5, f = x^5 + x^2 + 1
    python tools/find_toy_curve.py 7 0x83
"""

import argparse
import sys

from gf2ecc.ecpm import AffinePoint, CurveParams, double_and_add, format_curve
from gf2ecc.gf2m_core import FieldContext, add, mul, square


def _largest_prime_factor(n):
    best, p = 1, 2
    while p * p <= n:
        while n % p == 0:
            best, n = p, n // p
        p += 1
    return max(best, n) if n > 1 else best


def _lhs_table(ctx):
    """For each x, the y values grouped by y^2 + xy (independent of a, b)."""
    table = []
    for xv in range(1 << ctx.m):
        x = ctx.element(xv)
        by_value = {}
        for yv in range(1 << ctx.m):
            y = ctx.element(yv)
            by_value.setdefault(add(square(y, ctx), mul(x, y, ctx)).value, []).append(yv)
        table.append(by_value)
    return table


def _points(ctx, a, b, lhs):
    pts = []
    for xv in range(1 << ctx.m):
        x = ctx.element(xv)
        x2 = square(x, ctx)
        rhs = add(add(mul(x2, x, ctx), mul(a, x2, ctx)), b)
        pts.extend((xv, yv) for yv in lhs[xv].get(rhs.value, ()))
    return pts


def search(m=5, f=0b100101):
    ctx = FieldContext(m, f)
    lhs = _lhs_table(ctx)
    best = None
    for av in range(1 << m):
        for bv in range(1, 1 << m):
            a, b = ctx.element(av), ctx.element(bv)
            pts = _points(ctx, a, b, lhs)
            order = len(pts) + 1
            p = _largest_prime_factor(order)
            key = (-p, order, av, bv)
            if best is None or key < best[0]:
                best = (key, a, b, pts, order, p)
    _, a, b, pts, order, n = best
    for xv, yv in sorted(pts):
        G = AffinePoint(ctx.element(xv), ctx.element(yv))
        probe = CurveParams(ctx, a, b, G, n, order // n)
        if n == order or not double_and_add(order // n, G, probe).is_infinity:
            if double_and_add(n, G, probe).is_infinity:
                return CurveParams(ctx, a, b, G, n, order // n, f"toy{m}")
    raise RuntimeError("no point of prime order found")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("m", nargs="?", type=int, default=5)
    ap.add_argument("f", nargs="?", type=lambda s: int(s, 0), default=0b100101)
    args = ap.parse_args(argv)
    sys.stdout.write(format_curve(search(args.m, args.f)))


if __name__ == "__main__":
    main()
