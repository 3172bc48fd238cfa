import random

import pytest

from helpers import sl2_elements
from sl2morph.matrices import (
    Mat2,
    Mat3,
    ProjPoint,
    UnipotentFactor,
    adjoint,
    axis_of_rotation,
    bilinear_form,
    element_order,
    format_matrix_text,
    involution_pair,
    parse_matrix_text,
    quad_form,
    random_sl2,
    unipotent_decompose,
)
from sl2morph.primefield import PrimeField, sl2_exponent

F = PrimeField(13)


def _product(factors):
    acc = Mat2.identity(F)
    for u in factors:
        acc = acc * u.to_mat2(F)
    return acc


def test_inverse_example():
    g = Mat2.from_ints(F, 2, 1, 3, 2)
    assert g.inv() == Mat2.from_ints(F, 2, 12, 10, 2)
    assert Mat2.identity(F) * g == g
    assert g * g.inv() == Mat2.identity(F)


def test_unipotent_determinant():
    for t in range(13):
        assert Mat2.upper(F, F.from_int(t)).det() == F.one
        assert Mat2.lower(F, F.from_int(t)).det() == F.one


def test_singular_inverse_raises():
    m = Mat2.from_ints(F, 1, 2, 2, 4)
    with pytest.raises(ZeroDivisionError):
        m.inv()


def test_decompose_examples():
    g = Mat2.from_ints(F, 2, 1, 3, 2)
    factors = unipotent_decompose(g)
    assert [(u.side, int(u.t)) for u in factors] == [("upper", 9), ("lower", 3), ("upper", 9)]
    assert _product(factors) == g

    assert unipotent_decompose(Mat2.identity(F)) == []

    diag = Mat2.from_ints(F, 2, 0, 0, 7)
    factors = unipotent_decompose(diag)
    assert len(factors) == 4
    assert _product(factors) == diag


def test_decompose_requires_sl2():
    with pytest.raises(ValueError):
        unipotent_decompose(Mat2.from_ints(F, 2, 0, 0, 2))


def test_decompose_random_1000():
    rng = random.Random(99)
    for _ in range(1000):
        g = random_sl2(F, rng)
        factors = unipotent_decompose(g)
        assert len(factors) <= 4
        assert _product(factors) == g
        assert all(u.t != F.zero for u in factors)


def test_involution_pair_examples():
    t = F.from_int(5)
    J, second = involution_pair(UnipotentFactor("upper", t), F)
    assert J == Mat2.from_ints(F, 1, 0, 0, -1)
    assert second == Mat2.from_ints(F, 1, 5, 0, -1)
    assert second * second == Mat2.identity(F)
    assert J * second == Mat2.upper(F, t)

    Jl, secl = involution_pair(UnipotentFactor("lower", t), F)
    assert secl == Mat2.from_ints(F, 1, 0, -5, -1)
    assert secl * secl == Mat2.identity(F)
    assert Jl * secl == Mat2.lower(F, t)


def test_involution_pair_rejects_identity_factor():
    with pytest.raises(ValueError):
        involution_pair(UnipotentFactor("upper", F.zero), F)


def test_involution_pair_random():
    rng = random.Random(3)
    ident = Mat2.identity(F)
    neg = ident.scale(F.neg(F.one))
    for _ in range(100):
        t = F.random_nonzero(rng)
        side = rng.choice(("upper", "lower"))
        u = UnipotentFactor(side, t)
        a, b = involution_pair(u, F)
        assert a * a in (ident, neg) and b * b in (ident, neg)
        assert a * b == u.to_mat2(F)


def _adjoint_oracle(g):
    """Conjugate the basis (h, e, f) literally and read off coordinates."""
    h = Mat2.from_ints(F, 1, 0, 0, -1)
    e = Mat2.from_ints(F, 0, 1, 0, 0)
    f = Mat2.from_ints(F, 0, 0, 1, 0)
    gi = g.inv()
    cols = []
    for X in (h, e, f):
        img = g * X * gi
        # img = x*h + y*e + z*f  =>  [[x, y], [z, -x]]
        cols.append((img.a, img.b, img.c))
    return Mat3.from_columns(F, cols)


def test_adjoint_against_literal_conjugation():
    rng = random.Random(8)
    for _ in range(60):
        g = random_sl2(F, rng)
        assert adjoint(g) == _adjoint_oracle(g)


def test_adjoint_examples():
    a = F.from_int(4)
    d = adjoint(Mat2.diagonal(F, a, a.inv()))
    aa = a * a
    expect = Mat3(F, ((F.one, F.zero, F.zero), (F.zero, aa, F.zero), (F.zero, F.zero, aa.inv())))
    assert d == expect

    t = F.from_int(5)
    u = adjoint(Mat2.upper(F, t))
    two_t = t + t
    expect = Mat3(
        F,
        (
            (F.one, F.zero, t),
            (F.neg(two_t), F.one, F.neg(t * t)),
            (F.zero, F.zero, F.one),
        ),
    )
    assert u == expect

    neg_ident = Mat2.identity(F).scale(F.neg(F.one))
    assert adjoint(neg_ident) == Mat3.identity(F)


def test_adjoint_det_minus_one():
    J = Mat2.from_ints(F, 1, 0, 0, -1)
    rows = adjoint(J).rows
    assert [int(rows[i][i]) for i in range(3)] == [1, 12, 12]


def test_adjoint_rejects_other_determinants():
    with pytest.raises(ValueError):
        adjoint(Mat2.from_ints(F, 2, 0, 0, 2))


def test_adjoint_homomorphism_and_form():
    rng = random.Random(21)
    for _ in range(100):
        g, h = random_sl2(F, rng), random_sl2(F, rng)
        assert adjoint(g) * adjoint(h) == adjoint(g * h)
        v = tuple(F.random(rng) for _ in range(3))
        img = adjoint(g).apply(v)
        assert quad_form(F, img) == quad_form(F, v)


def test_adjoint_kernel_full_scan_13():
    ident = Mat3.identity(F)
    trivial = 0
    for m in sl2_elements(13):
        g = Mat2.from_ints(F, *m)
        if adjoint(g) == ident:
            trivial += 1
            assert m in ((1, 0, 0, 1), (12, 0, 0, 12))
    assert trivial == 2


def test_element_order_examples():
    E = sl2_exponent(13)
    mul = lambda a, b: a * b
    is_id = lambda m: m.is_identity()
    assert element_order(Mat2.identity(F), E, mul, is_id) == 1
    assert element_order(Mat2.upper(F, F.one), E, mul, is_id) == 13
    neg = Mat2.identity(F).scale(F.neg(F.one))
    assert element_order(neg, E, mul, is_id) == 2
    with pytest.raises(ValueError):
        element_order(Mat2.upper(F, F.one), 12, mul, is_id)  # 12 is not an exponent


def test_element_order_census():
    rng = random.Random(12)
    E = sl2_exponent(13)
    mul = lambda a, b: a * b
    is_id = lambda m: m.is_identity()
    for _ in range(50):
        g = random_sl2(F, rng)
        o = element_order(g, E, mul, is_id)
        # brute-force the order
        acc, brute = g, 1
        while not acc.is_identity():
            acc = acc * g
            brute += 1
        assert o == brute


def test_axis_examples():
    w = adjoint(Mat2.from_ints(F, 0, 1, -1, 0))
    assert axis_of_rotation(w) == ProjPoint(F, (F.zero, F.one, F.neg(F.one)))
    J = adjoint(Mat2.from_ints(F, 1, 0, 0, -1))
    assert axis_of_rotation(J) == ProjPoint(F, (F.one, F.zero, F.zero))
    with pytest.raises(ValueError):
        axis_of_rotation(Mat3.identity(F))


def test_axis_fixed_by_rotation():
    rng = random.Random(4)
    found = 0
    while found < 100:
        a = F.random(rng)
        b = F.random_nonzero(rng)
        # trace zero, det 1: a^2 + bc = -1
        c = (F.neg(F.one) - a * a) * b.inv()
        j = Mat2(F, a, b, c, F.neg(a))
        if j.det() != F.one:
            continue
        found += 1
        rot = adjoint(j)
        axis = axis_of_rotation(rot)
        assert ProjPoint(F, rot.apply(axis.coords)) == axis


def test_projective_point_equality():
    p1 = ProjPoint(F, (F.from_int(2), F.from_int(4), F.zero))
    p2 = ProjPoint(F, (F.one, F.from_int(2), F.zero))
    assert p1 == p2
    assert p1 != ProjPoint(F, (F.one, F.one, F.zero))
    with pytest.raises(ValueError):
        ProjPoint(F, (F.zero, F.zero, F.zero))


def test_matrix_text_roundtrip():
    g = parse_matrix_text("2,1;3,2", F)
    assert g == Mat2.from_ints(F, 2, 1, 3, 2)
    assert format_matrix_text(g) == "2,1;3,2"
    with pytest.raises(ValueError):
        parse_matrix_text("1,2,3;4,5,6", F)
    with pytest.raises(ValueError):
        parse_matrix_text("1,2", F)


def test_random_sl2_uniform_det():
    rng = random.Random(0)
    for p in (13, 997):
        field = PrimeField(p)
        for _ in range(200):
            assert random_sl2(field, rng).det() == field.one


def test_bilinear_form_polarizes_quadratic():
    rng = random.Random(6)
    two = F.from_int(2)
    for _ in range(50):
        u = tuple(F.random(rng) for _ in range(3))
        v = tuple(F.random(rng) for _ in range(3))
        s = tuple(a + b for a, b in zip(u, v))
        lhs = bilinear_form(F, u, v)
        rhs = quad_form(F, s) - quad_form(F, u) - quad_form(F, v)
        assert lhs == rhs
