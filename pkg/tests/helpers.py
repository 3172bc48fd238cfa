"""Brute-force oracles the tests check the library against.

Everything here recomputes results from first principles (enumeration,
closure, repeated multiplication) independently of the code under test.
"""

from collections import deque
from math import lcm


def int_mat_mul(m, n, p):
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def sl2_elements(p):
    """All of SL2(p) by breadth-first closure from the standard generators."""
    gens = [(1, 1, 0, 1), (0, 1, p - 1, 0)]
    ident = (1, 0, 0, 1)
    seen = {ident}
    queue = deque([ident])
    while queue:
        cur = queue.popleft()
        for g in gens:
            nxt = int_mat_mul(cur, g, p)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


def int_mat_order(m, p, bound=None):
    ident = (1, 0, 0, 1)
    x = m
    o = 1
    limit = bound or 4 * p * p
    while x != ident:
        x = int_mat_mul(x, m, p)
        o += 1
        if o > limit:
            raise AssertionError("order exceeded bound")
    return o


def sl2_exponent_census(p):
    """lcm of the orders of every element of SL2(p)."""
    out = 1
    for m in sl2_elements(p):
        out = lcm(out, int_mat_order(m, p))
    return out


def squares_mod(p):
    return sorted({x * x % p for x in range(1, p)})


def group_closure(gens, p, limit=None):
    """Subgroup generated by integer matrices, by breadth-first closure."""
    ident = (1, 0, 0, 1)
    seen = {ident}
    queue = deque([ident])
    while queue:
        cur = queue.popleft()
        for g in gens:
            nxt = int_mat_mul(cur, g, p)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
                if limit and len(seen) > limit:
                    raise AssertionError("closure exceeded limit")
    return seen
