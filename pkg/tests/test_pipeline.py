import random

import pytest

from sl2morph.blackbox import bb_equiv
from sl2morph.matrices import (
    Mat2,
    ProjPoint,
    element_order,
    random_sl2,
    unipotent_decompose,
)
from sl2morph.pgl2 import y_is_identity, y_mul
from sl2morph.pipeline import (
    encode_matrix,
    involution_image,
    map_element,
    map_via_factors,
    replay_from,
    resolve_sign,
)


def _order_of_handle(h, ctx):
    return element_order(h, ctx.E, ctx.G.mul, lambda z: z == ctx.G.identity)


def _order_of_matrix(g, ctx):
    return element_order(g, ctx.E, lambda a, b: a * b, lambda m: m.is_identity())


def test_encode_matrix_examples(ctx13):
    F, K = ctx13.F, ctx13.K
    ident = encode_matrix(Mat2.identity(F), K)
    assert ident == Mat2.identity(K)
    g = encode_matrix(Mat2.from_ints(F, 2, 1, 3, 2), K)
    assert K.eq(g.a, K.encode(2)) and K.eq(g.b, K.encode(1))
    assert K.eq(g.c, K.encode(3)) and K.eq(g.d, K.encode(2))
    det = K.sub(K.mul(K.encode(2), K.encode(2)), K.mul(K.encode(1), K.encode(3)))
    assert K.eq(det, K.one)
    with pytest.raises(ValueError):
        encode_matrix(Mat2.from_ints(F, 2, 0, 0, 2), K)


def test_involution_image_of_diagonal(ctx13):
    K = ctx13.K
    J = Mat2.diagonal(K, K.one, K.neg(K.one))
    y = involution_image(J, ctx13)
    assert y_is_identity(y_mul(y, y))
    # its sharp point is the image of (1:0:0) under the change of basis
    expect = ProjPoint(K, ctx13.basis.M.apply((K.one, K.zero, K.zero)))
    assert K.coords_from_point(y) == expect


def test_involution_image_rejects_non_involution(ctx13):
    K = ctx13.K
    with pytest.raises(ValueError):
        involution_image(Mat2.upper(K, K.one), ctx13)


def test_map_identity(ctx13):
    h, _ = map_element(Mat2.identity(ctx13.F), ctx13)
    assert bb_equiv(h, ctx13.G.identity, ctx13.G)
    assert _order_of_handle(h, ctx13) == 1


def test_map_unipotent_order(ctx13):
    h, _ = map_element(Mat2.upper(ctx13.F, ctx13.F.one), ctx13)
    assert _order_of_handle(h, ctx13) == 13


def test_map_homomorphism_sample(ctx13):
    rng = random.Random(1)
    G = ctx13.G
    for _ in range(10):
        g = random_sl2(ctx13.F, rng)
        h = random_sl2(ctx13.F, rng)
        ig, _ = map_element(g, ctx13)
        ih, _ = map_element(h, ctx13)
        igh, _ = map_element(g * h, ctx13)
        assert bb_equiv(G.mul(ig, ih), igh, G)


def test_order_preservation_sample(ctx13):
    rng = random.Random(2)
    for _ in range(25):
        g = random_sl2(ctx13.F, rng)
        h, _ = map_element(g, ctx13)
        assert _order_of_matrix(g, ctx13) == _order_of_handle(h, ctx13)


def test_resolve_sign_cases(ctx13):
    G = ctx13.G
    z = ctx13.central
    assert _order_of_handle(z, ctx13) == 2
    # target 1 picks the identity lift
    assert resolve_sign(G.identity, 1, G, z) == G.identity
    # target 2 on the coset {identity, z} is forced to z
    assert resolve_sign(G.identity, 2, G, z) == z
    # an order-26 lift resolves to order 13 when asked
    u = map_element(Mat2.upper(ctx13.F, ctx13.F.one), ctx13)[0]
    u_other = G.mul(u, z)
    assert _order_of_handle(u_other, ctx13) == 26
    assert resolve_sign(u_other, 13, G, z) == u
    with pytest.raises(AssertionError):
        resolve_sign(u, 7, G, z)


def test_well_definedness_across_decompositions(ctx13):
    # push a second, artificially longer decomposition through and compare
    F, K, G = ctx13.F, ctx13.K, ctx13.G
    rng = random.Random(3)
    from sl2morph.matrices import UnipotentFactor

    for _ in range(10):
        g = random_sl2(F, rng)
        gk = encode_matrix(g, K)
        h_default, _ = map_element(g, ctx13)
        shifted = Mat2.lower(K, K.one) * gk
        if shifted.is_identity() or K.eq(shifted.c, K.zero):
            continue
        alt_factors = [UnipotentFactor("lower", K.neg(K.one))] + unipotent_decompose(shifted)
        prod = Mat2.identity(K)
        for u in alt_factors:
            prod = prod * u.to_mat2(K)
        assert prod == gk
        h_alt, _ = map_via_factors(g, gk, alt_factors, ctx13)
        assert bb_equiv(h_default, h_alt, G)
        assert h_default == h_alt  # sign resolution lands on the same lift


def test_trace_records_and_replays(ctx13):
    rng = random.Random(4)
    g = random_sl2(ctx13.F, rng)
    h, trace = map_element(g, ctx13)
    names = [n for n, _ in trace.stages]
    for expected in (
        "field-matrix",
        "unipotent-factors",
        "involution-pairs",
        "involution-images",
        "assembled",
        "component",
        "resolved",
    ):
        assert expected in names
    for stage in ("field-matrix", "unipotent-factors", "involution-images", "assembled"):
        assert replay_from(trace, stage, ctx13) == h
    assert trace.get("resolved") == h
    assert any(line.startswith("source ") for line in trace.lines())


def test_trace_sink_receives_stages(ctx13):
    seen = []
    ctx13.trace_sink = lambda stage, text: seen.append(stage)
    try:
        map_element(Mat2.upper(ctx13.F, ctx13.F.one), ctx13)
    finally:
        ctx13.trace_sink = None
    assert "assembled" in seen and "resolved" in seen


def test_assembled_bit_zero(ctx13):
    rng = random.Random(5)
    for _ in range(5):
        g = random_sl2(ctx13.F, rng)
        _, trace = map_element(g, ctx13)
        assert trace.get("assembled").bit == 0
