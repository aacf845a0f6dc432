import importlib.util
import random
import re
from pathlib import Path

import pytest

from gf2ecc.ecpm import (
    INFINITY,
    AffinePoint,
    CurveParams,
    DegenerateBasePointError,
    InvalidPointError,
    LadderState,
    bundled_curve,
    double_and_add,
    format_curve,
    format_point,
    ladder,
    ladder_init,
    ladder_step,
    load_curve,
    load_field,
    negate,
    on_curve,
    parse_curve,
    parse_point,
    point_add_affine,
    point_double_affine,
    recover_and_normalize,
    scalar_mul,
    scalar_mul_detailed,
    scalar_mul_oracle,
    x_add_relation_check,
)
from gf2ecc.gf2m_core import CountingFieldOps, add, invert, mul, square
from oracles import curve_points

ROOT = Path(__file__).resolve().parents[1]


def all_points(C):
    ctx = C.ctx
    pts = curve_points(ctx.m, ctx.f, C.a.value, C.b.value)
    return [C.point(x, y) for x, y in pts]


def x_ratio(X, Z, ctx):
    return None if not Z else mul(X, invert(Z, ctx), ctx)


# --- toy curve fixture ------------------------------------------------------


def test_toy_curve_group(toy5):
    pts = all_points(toy5)
    assert len(pts) + 1 == toy5.order == 38
    assert toy5.n == 19 and toy5.h == 2
    assert double_and_add(19, toy5.G, toy5).is_infinity
    assert not double_and_add(2, toy5.G, toy5).is_infinity


def test_toy_curve_search_reproduces_fixture(toy5):
    spec = importlib.util.spec_from_file_location("find_toy_curve", ROOT / "tools" / "find_toy_curve.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    found = mod.search(5, 0b100101)
    assert (found.a, found.b, found.G, found.n, found.h) == (toy5.a, toy5.b, toy5.G, toy5.n, toy5.h)


# --- affine group law -------------------------------------------------------


def test_on_curve(toy5, b163):
    assert on_curve(INFINITY, toy5)
    assert on_curve(b163.G, b163)
    pts = set(all_points(toy5))
    for P in pts:
        assert on_curve(P, toy5)
        for bit in range(5):
            Q = AffinePoint(P.x, toy5.ctx.element(P.y.value ^ (1 << bit)))
            assert on_curve(Q, toy5) == (Q in pts)


def test_negate_and_inverse(toy5):
    assert negate(INFINITY) is INFINITY
    for P in all_points(toy5):
        assert negate(negate(P)) == P
        assert on_curve(negate(P), toy5)
        assert point_add_affine(P, negate(P), toy5).is_infinity
        assert point_add_affine(P, INFINITY, toy5) == P
        assert point_add_affine(INFINITY, P, toy5) == P


def test_group_law_exhaustive(toy5):
    pts = all_points(toy5) + [INFINITY]
    for A in pts:
        for B in pts:
            S = point_add_affine(A, B, toy5)
            assert on_curve(S, toy5)
            assert S == point_add_affine(B, A, toy5)
    r = random.Random(5)
    for _ in range(300):
        A, B, D = (r.choice(pts) for _ in range(3))
        assert point_add_affine(point_add_affine(A, B, toy5), D, toy5) == point_add_affine(A, point_add_affine(B, D, toy5), toy5)


def test_doubling(toy5):
    assert point_double_affine(INFINITY, toy5).is_infinity
    two_torsion = [P for P in all_points(toy5) if not P.x]
    assert len(two_torsion) == 1
    assert point_double_affine(two_torsion[0], toy5).is_infinity
    for P in all_points(toy5):
        assert point_double_affine(P, toy5) == point_add_affine(P, P, toy5)


def test_x_doubling_identity(toy5):
    # x(2A) = x_A^2 + b / x_A^2
    ctx = toy5.ctx
    for A in all_points(toy5):
        if not A.x:
            continue
        xa2 = square(A.x, ctx)
        assert point_double_affine(A, toy5).x == add(xa2, mul(toy5.b, invert(xa2, ctx), ctx))


def test_x_add_relation_exhaustive(toy5):
    pts = all_points(toy5)
    checked = 0
    for A in pts:
        for B in pts:
            if A.x == B.x:
                continue
            assert x_add_relation_check(A, B, toy5)
            checked += 1
    assert checked > 1000


def test_x_add_relation_difference_form(toy5):
    # with B - A = P the difference term is just x_P
    ctx = toy5.ctx
    P = toy5.G
    for A in all_points(toy5):
        B = point_add_affine(A, P, toy5)
        if B.is_infinity or A.x == B.x:
            continue
        t = mul(B.x, invert(add(A.x, B.x), ctx), ctx)
        assert point_add_affine(A, B, toy5).x == add(add(P.x, t), square(t, ctx))


def test_x_add_relation_b163(b163):
    r = random.Random(1)
    for _ in range(20):
        A = scalar_mul(r.randrange(1, b163.n), b163.G, b163)
        B = scalar_mul(r.randrange(1, b163.n), b163.G, b163)
        assert x_add_relation_check(A, B, b163)
    with pytest.raises(ValueError):
        x_add_relation_check(b163.G, negate(b163.G), b163)


def test_oracles_agree(toy5):
    for P in all_points(toy5) + [INFINITY]:
        for k in range(toy5.order + 2):
            assert scalar_mul_oracle(k, P, toy5) == double_and_add(k, P, toy5)


# --- ladder -----------------------------------------------------------------


def test_ladder_init_example():
    ctx = bundled_curve("toy5").ctx
    # any curve with b = 1 and a point with x = 1
    pts = curve_points(5, ctx.f, 0, 1)
    x1 = [p for p in pts if p[0] == 1]
    C = CurveParams(ctx, ctx.zero, ctx.one, AffinePoint(ctx.element(1), ctx.element(x1[0][1])), len(pts) + 1)
    S = ladder_init(ctx.one, C)
    assert S == LadderState(ctx.one, ctx.one, ctx.zero, ctx.one)
    with pytest.raises(DegenerateBasePointError):
        ladder_init(ctx.zero, C)


def test_ladder_step_branch_symmetry(b163):
    r = random.Random(2)
    ctx = b163.ctx
    for _ in range(50):
        S = LadderState(*(ctx.random_element(r) for _ in range(4)))
        xP = ctx.random_element(r)
        assert ladder_step(S, 0, xP, b163) == ladder_step(S.swapped(), 1, xP, b163).swapped()


def test_ladder_step_op_counts(b163):
    for bit in (0, 1):
        ops = CountingFieldOps(b163.ctx)
        ladder_step(ladder_init(b163.G.x, b163), bit, b163.G.x, b163, ops)
        assert ops.counts == {"mul": 6, "square": 5, "add": 3}


def test_ladder_ratio_invariant_exhaustive(toy5):
    ctx = toy5.ctx
    for P in all_points(toy5):
        if not P.x:
            continue
        for k in range(1, toy5.order):
            seen = []

            def on_step(i, S, k=k, P=P, seen=seen):
                s = k >> i
                A = double_and_add(s, P, toy5)
                B = double_and_add(s + 1, P, toy5)
                assert x_ratio(S.X1, S.Z1, ctx) == (None if A.is_infinity else A.x)
                assert x_ratio(S.X2, S.Z2, ctx) == (None if B.is_infinity else B.x)
                seen.append(i)

            ladder(k, P.x, toy5, on_step=on_step)
            assert seen == list(range(k.bit_length() - 2, -1, -1))


def test_scalar_mul_exhaustive_toy(toy5):
    for P in all_points(toy5) + [INFINITY]:
        for k in range(toy5.order + 3):
            assert scalar_mul(k, P, toy5) == double_and_add(k, P, toy5)


def test_two_torsion_fallback(toy5):
    T = next(P for P in all_points(toy5) if not P.x)
    res = scalar_mul_detailed(3, T, toy5)
    assert res.oracle_fallback and res.point == T
    assert scalar_mul(2, T, toy5).is_infinity
    with pytest.raises(DegenerateBasePointError):
        recover_and_normalize(ladder_init(toy5.G.x, toy5), T, toy5)


def test_scalar_mul_edges(toy5, b163):
    G = b163.G
    assert scalar_mul(0, G, b163).is_infinity
    assert scalar_mul(1, G, b163) == G
    assert scalar_mul(5, INFINITY, b163).is_infinity
    res = scalar_mul_detailed(1, G, b163)
    assert res.iterations == 0 and not res.oracle_fallback
    assert scalar_mul(b163.n, G, b163).is_infinity
    assert scalar_mul(b163.n - 1, G, b163) == negate(G)
    assert scalar_mul(b163.n + 1, G, b163) == G
    # reduction is modulo the full group order, so points outside <G> are right too
    Q = next(P for P in all_points(toy5) if not double_and_add(toy5.n, P, toy5).is_infinity)
    for k in (toy5.n, toy5.n + 1, toy5.order - 1):
        assert scalar_mul(k, Q, toy5) == double_and_add(k, Q, toy5)
    with pytest.raises(InvalidPointError):
        scalar_mul(3, AffinePoint(G.x, add(G.y, b163.ctx.one)), b163)


def test_b163_random_vs_oracle(b163):
    r = random.Random(3)
    for _ in range(10):
        k = r.getrandbits(163)
        res = scalar_mul_detailed(k, b163.G, b163)
        assert on_curve(res.point, b163)
        assert res.point == double_and_add(k, b163.G, b163)
        assert res.iterations == (k % b163.order).bit_length() - 1
        assert res.inversion_steps <= 2 * b163.ctx.m


def test_homomorphism(toy5, b163):
    r = random.Random(4)
    for C, bits, rounds in ((toy5, 6, 200), (b163, 163, 5)):
        for _ in range(rounds):
            k, l = r.getrandbits(bits), r.getrandbits(bits)
            P = C.G
            assert scalar_mul(k + l, P, C) == point_add_affine(scalar_mul(k, P, C), scalar_mul(l, P, C), C)


def test_recovered_points_on_curve(b163):
    r = random.Random(6)
    for _ in range(5):
        k = r.getrandbits(163) | (1 << 162)
        S = ladder(k, b163.G.x, b163)
        Q = recover_and_normalize(S, b163.G, b163)
        assert on_curve(Q, b163)


# --- text formats -----------------------------------------------------------


def test_curve_roundtrip(b163, toy5, tmp_path):
    for C in (b163, toy5):
        text = format_curve(C)
        D = parse_curve(text)
        assert (D.ctx.m, D.ctx.f, D.a, D.b, D.G, D.n, D.h, D.name) == (C.ctx.m, C.ctx.f, C.a, C.b, C.G, C.n, C.h, C.name)
        p = tmp_path / f"{C.name}.curve"
        p.write_text(text)
        assert load_curve(p).G == C.G
    assert load_curve("b163.curve").n == b163.n
    assert load_curve("toy5", cutoff=2).ctx.cutoff == 2


def test_field_file(tmp_path):
    p = tmp_path / "f3.field"
    p.write_text("m = 3\nf = b\n")
    ctx = load_field(p)
    assert (ctx.m, ctx.f) == (3, 0b1011)
    with pytest.raises(ValueError):
        load_curve(p)
    with pytest.raises(FileNotFoundError):
        load_field(tmp_path / "missing.field")


def test_bad_curve_files(b163):
    text = format_curve(b163)
    with pytest.raises(ValueError):
        parse_curve(text.replace("gy = 0", "gy = 1"))  # G off the curve
    with pytest.raises(ValueError):
        parse_curve("m = 3\nf = b\nbogus line\n")
    with pytest.raises(ValueError):
        parse_curve(re.sub(r"^b = .*$", "b = 0", text, flags=re.M))  # singular curve


def test_point_text(b163, toy5):
    G = b163.G
    assert parse_point("G", b163) == G
    assert parse_point("inf", b163).is_infinity
    assert parse_point(format_point(G, b163), b163) == G
    assert format_point(INFINITY, b163) == "INF"
    assert format_point(toy5.G, toy5) == "05,0b"
    with pytest.raises(InvalidPointError):
        parse_point("1,1", b163)
    with pytest.raises(ValueError):
        parse_point("12", b163)
