import random

import pytest

from sl2morph.bbfield import KField, coords_from_point, k_encode, k_sqrt, point_from_coords
from sl2morph.errors import ForeignElementError
from sl2morph.matrices import Mat2, ProjPoint, UnipotentFactor, involution_pair
from sl2morph.pgl2 import y_equiv, y_is_identity, y_mul, y_random_involution
from sl2morph.primefield import NON_RESIDUE, PrimeField, odd_part, pf_sqrt


@pytest.fixture(scope="module")
def K13(ctx13):
    return ctx13.K


def test_encode_anchors(K13):
    assert K13.eq(k_encode(0, K13), K13.zero)
    assert K13.eq(k_encode(1, K13), K13.one)
    assert K13.eq(k_encode(2, K13), K13.add(K13.one, K13.one))
    F = PrimeField(13)
    assert K13.eq(k_encode(F.from_int(5), K13), K13.encode(5))


def test_zero_one_distinct_and_characteristic(K13):
    assert not K13.eq(K13.zero, K13.one)
    acc = K13.zero
    for _ in range(13):
        acc = K13.add(acc, K13.one)
    assert K13.eq(acc, K13.zero)


def test_op_examples(K13):
    rng = random.Random(1)
    for _ in range(20):
        x = K13.random(rng)
        assert K13.eq(K13.add(x, K13.neg(x)), K13.zero)
        assert K13.eq(K13.mul(K13.one, x), x)
    assert K13.eq(K13.mul(k_encode(3, K13), k_encode(9, K13)), K13.one)
    with pytest.raises(ZeroDivisionError):
        K13.inv(K13.zero)


def test_foreign_token_rejected(K13):
    from sl2morph.bbfield import KElement

    with pytest.raises(ForeignElementError):
        K13.add(K13.one, KElement("00ff00ff00ff00ff00ff00ff"))
    with pytest.raises(ForeignElementError):
        K13.add(K13.one, KElement("zz"))


def test_field_axioms_random(ctx13, ctx997):
    for ctx in (ctx13, ctx997):
        K = ctx.K
        rng = random.Random(2)
        for _ in range(200):
            a, b, c = (K.random(rng) for _ in range(3))
            assert K.eq(K.add(a, b), K.add(b, a))
            assert K.eq(K.mul(a, b), K.mul(b, a))
            assert K.eq(K.add(K.add(a, b), c), K.add(a, K.add(b, c)))
            assert K.eq(K.mul(K.mul(a, b), c), K.mul(a, K.mul(b, c)))
            assert K.eq(K.mul(a, K.add(b, c)), K.add(K.mul(a, b), K.mul(a, c)))
            assert K.eq(K.add(a, K.neg(a)), K.zero)
            if not K.eq(a, K.zero):
                assert K.eq(K.mul(a, K.inv(a)), K.one)


def test_encode_is_field_morphism(ctx13, ctx997):
    for ctx in (ctx13, ctx997):
        K = ctx.K
        F = ctx.F
        rng = random.Random(3)
        for _ in range(100):
            a, b = F.random(rng), F.random(rng)
            assert K.eq(K.encode(a + b), K.add(K.encode(a), K.encode(b)))
            assert K.eq(K.encode(a * b), K.mul(K.encode(a), K.encode(b)))


def test_encode_injective_full_scan_13(K13):
    tokens = {K13.encode(v).token for v in range(13)}
    assert len(tokens) == 13


def test_sqrt_examples(K13):
    assert K13.eq(K13.sqrt(K13.zero, K13.toolbox.Eo_bits), K13.zero)
    r = k_sqrt(k_encode(3, K13), K13.toolbox.Eo_bits, K13)
    assert K13.eq(r, k_encode(4, K13)) or K13.eq(r, k_encode(9, K13))
    assert k_sqrt(k_encode(2, K13), K13.toolbox.Eo_bits, K13) is NON_RESIDUE


def test_sqrt_matches_prime_field_full_scan(K13):
    F = PrimeField(13)
    bits = K13.toolbox.Eo_bits
    for a in range(13):
        kr = K13.sqrt(K13.encode(a), bits)
        fr = pf_sqrt(F.from_int(a))
        if fr is NON_RESIDUE:
            assert kr is NON_RESIDUE
        else:
            assert K13.eq(kr, K13.encode(fr.value)) or K13.eq(kr, K13.encode(13 - fr.value))


def test_sqrt_with_random_nonresidue_search(ctx997):
    K = ctx997.K
    rng = random.Random(4)
    for _ in range(20):
        a = K.random(rng)
        sq = K.mul(a, a)
        r = K.sqrt(sq, K.toolbox.Eo_bits, rng)
        assert r is not NON_RESIDUE
        assert K.eq(K.mul(r, r), sq)


def test_point_bridge_anchors(K13):
    tb = K13.toolbox
    e1 = point_from_coords(K13.one, K13.zero, K13.zero, K13)
    assert y_equiv(e1, tb.plane_involutions[0])
    p111 = point_from_coords(K13.one, K13.one, K13.one, K13)
    assert y_equiv(p111, tb.point_111)
    scaled = point_from_coords(k_encode(2, K13), K13.zero, K13.zero, K13)
    assert y_equiv(scaled, tb.plane_involutions[0])
    e2 = point_from_coords(K13.zero, K13.one, K13.zero, K13)
    assert y_equiv(e2, tb.plane_involutions[1])


def test_point_bridge_rejects_zero(K13):
    with pytest.raises(ValueError):
        point_from_coords(K13.zero, K13.zero, K13.zero, K13)


def test_coords_examples(K13):
    tb = K13.toolbox
    pt = coords_from_point(tb.plane_involutions[1], K13)
    assert pt == ProjPoint(K13, (K13.zero, K13.one, K13.zero))
    pt111 = coords_from_point(tb.point_111, K13)
    assert pt111 == ProjPoint(K13, (K13.one, K13.one, K13.one))


def test_coords_rejects_non_involution(K13):
    from sl2morph.pgl2 import random_tilde_element

    rng = random.Random(5)
    while True:
        y = random_tilde_element(K13.setup, 5, rng)
        if not y_is_identity(y_mul(y, y)) and not y_is_identity(y):
            break
    with pytest.raises(ValueError):
        coords_from_point(y, K13)


def test_point_roundtrip_random_involutions(K13):
    eo = odd_part(K13.setup.group.exponent_hint)
    rng = random.Random(6)
    for _ in range(50):
        j = y_random_involution(K13.setup, eo, rng)
        pt = coords_from_point(j, K13)
        back = point_from_coords(*pt.coords, K13)
        assert y_equiv(back, j)


def test_involution_pair_over_k(K13):
    rng = random.Random(7)
    ident = Mat2.identity(K13)
    neg = ident.scale(K13.neg(K13.one))
    for _ in range(100):
        t = K13.random_nonzero(rng)
        side = rng.choice(("upper", "lower"))
        a, b = involution_pair(UnipotentFactor(side, t), K13)
        assert (a * a == ident or a * a == neg) and (b * b == ident or b * b == neg)
        assert a * b == UnipotentFactor(side, t).to_mat2(K13)


def test_tokens_stable_across_rebuild(ctx13):
    # a field rebuilt over the same toolbox issues identical tokens
    K2 = KField(ctx13.TB)
    assert K2.zero.token == ctx13.K.zero.token
    assert K2.encode(7).token == ctx13.K.encode(7).token
