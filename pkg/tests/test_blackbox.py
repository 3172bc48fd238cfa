import random

import pytest

from helpers import group_closure, int_mat_order
from sl2morph.blackbox import (
    bb_equiv,
    bb_is_central,
    bb_random,
    bb_random_involution,
    bray_centralizer_element,
    make_blackbox_sl2,
)
from sl2morph.errors import ForeignElementError
from sl2morph.matrices import element_order
from sl2morph.primefield import PrimeModulus, odd_part


@pytest.fixture(scope="module")
def G13():
    return make_blackbox_sl2(PrimeModulus(13), 1)


def test_generator_inverse_is_identity(G13):
    g = G13.generators[0]
    assert G13.mul(g, G13.inv(g)) == G13.identity


def test_generators_killed_by_exponent(G13):
    assert G13.exponent_hint == 1092
    for g in G13.generators:
        assert G13.pow(g, 1092) == G13.identity


def test_handles_are_opaque_hex():
    G = make_blackbox_sl2(PrimeModulus(997), 7)
    assert len(G.generators) >= 2
    for g in G.generators:
        assert g.handle == g.handle.lower()
        bytes.fromhex(g.handle)
    with pytest.raises(PermissionError):
        G.open_box(8)


def test_foreign_handles_rejected(G13):
    other = make_blackbox_sl2(PrimeModulus(13), 2)
    with pytest.raises(ForeignElementError):
        G13.mul(other.generators[0], G13.identity)
    with pytest.raises(ForeignElementError):
        G13.inv(other.generators[0])


def test_handles_stable_across_instances():
    a = make_blackbox_sl2(PrimeModulus(13), 5)
    b = make_blackbox_sl2(PrimeModulus(13), 5)
    assert [g.handle for g in a.generators] == [g.handle for g in b.generators]
    assert a.identity == b.identity


def test_equiv_examples(G13):
    rng = random.Random(1)
    x = bb_random(G13, rng)
    assert bb_equiv(x, x, G13)
    z = G13.open_box(1).encode((12, 0, 0, 12))
    assert bb_equiv(x, G13.mul(x, z), G13)
    # a unipotent generator is not central
    assert not bb_equiv(G13.generators[0], G13.identity, G13)


def test_equiv_is_equivalence_relation(G13):
    rng = random.Random(2)
    z = G13.open_box(1).encode((12, 0, 0, 12))
    for _ in range(100):
        x = bb_random(G13, rng)
        y = bb_random(G13, rng)
        assert bb_equiv(x, x, G13)
        assert bb_equiv(x, y, G13) == bb_equiv(y, x, G13)
        # chained triple with known relations
        a = G13.mul(x, z)
        b = G13.mul(a, z)
        assert bb_equiv(x, a, G13) and bb_equiv(a, b, G13) and bb_equiv(x, b, G13)


def test_random_determinism(G13):
    assert bb_random(G13, random.Random(7)) == bb_random(G13, random.Random(7))
    assert bb_random(G13, random.Random(7)) != bb_random(G13, random.Random(8))


def test_random_order_census(G13):
    rng = random.Random(3)
    orders = set()
    is_id = lambda h: h == G13.identity
    for _ in range(1000):
        x = bb_random(G13, rng)
        orders.add(element_order(x, 1092, G13.mul, is_id))
    assert len(orders) >= 3


def test_random_inverse_identity(G13):
    rng = random.Random(4)
    x = bb_random(G13, rng)
    assert bb_equiv(G13.mul(x, G13.inv(x)), G13.identity, G13)


def test_random_involution_contracts(G13):
    eo = odd_part(1092)
    rng = random.Random(5)
    j = bb_random_involution(G13, eo, rng)
    assert bb_equiv(G13.mul(j, j), G13.identity, G13)
    assert not bb_equiv(j, G13.identity, G13)


def test_involutions_spread(G13):
    eo = odd_part(1092)
    rng = random.Random(6)
    draws = [bb_random_involution(G13, eo, rng) for _ in range(100)]
    assert any(not bb_equiv(draws[0], j, G13) for j in draws[1:])


def test_bray_contracts(G13):
    eo = odd_part(1092)
    rng = random.Random(8)
    i = bb_random_involution(G13, eo, rng)
    for _ in range(10):
        y = bray_centralizer_element(G13, i, rng)
        assert bb_equiv(G13.mul(G13.inv(y), G13.mul(i, y)), i, G13)
        prod = G13.mul(G13.mul(i, y), G13.mul(i, G13.inv(y)))
        assert bb_is_central(prod, G13)


def test_bray_outputs_generate_small_group(G13):
    eo = odd_part(1092)
    rng = random.Random(9)
    i = bb_random_involution(G13, eo, rng)
    box = G13.open_box(1)
    mats = [box.decode(bray_centralizer_element(G13, i, rng)) for _ in range(50)]
    order = len(group_closure(mats, 13, limit=5000))
    assert 4 * 12 % order == 0 or 4 * 14 % order == 0


def test_generators_generate_whole_group(G13):
    box = G13.open_box(1)
    mats = [box.decode(g) for g in G13.generators]
    assert len(group_closure(mats, 13, limit=3000)) == 2184  # |SL2(13)|


def test_whitebox_decode_matches_orders(G13):
    box = G13.open_box(1)
    rng = random.Random(10)
    is_id = lambda h: h == G13.identity
    for _ in range(20):
        x = bb_random(G13, rng)
        assert element_order(x, 1092, G13.mul, is_id) == int_mat_order(box.decode(x), 13)
