"""Verification suites: order preservation, the homomorphism check, and the
rank-1 Steinberg relations pushed through the morphism.

Order spot checks alone are weak evidence, so the commutator-relation suite
is the normative one: root-group additivity, the torus action on root
groups, commutation inside a root group, and the Weyl element identity.
Every failure record carries the per-case seed, so any failure replays
deterministically.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import List

from .blackbox import bb_equiv
from .matrices import Mat2, element_order, format_matrix_text, random_sl2
from .pipeline import PipelineContext, map_element


@dataclass
class FailureRecord:
    case: int
    seed: int
    message: str


@dataclass
class VerifyReport:
    suite: str
    cases: int
    failures: List[FailureRecord]
    seed: int
    wall_time: float
    records: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        return f"SUITE {self.suite} cases={self.cases} failures={len(self.failures)} seed={self.seed}"


def _case_seeds(rng, n: int) -> List[int]:
    return [rng.randrange(1 << 48) for _ in range(n)]


def check_orders(ctx: PipelineContext, n: int, rng) -> VerifyReport:
    """Map n random matrices and compare exact element orders."""
    import random as _random

    start = time.time()
    failures: List[FailureRecord] = []
    records: List[dict] = []
    seeds = _case_seeds(rng, n)
    master = seeds[0] if seeds else 0
    bb_id = lambda z: z == ctx.G.identity
    for case, cseed in enumerate(seeds):
        crng = _random.Random(cseed)
        g = random_sl2(ctx.F, crng)
        image, _ = map_element(g, ctx)
        source_order = element_order(g, ctx.E, lambda a, b: a * b, lambda m: m.is_identity())
        image_order = element_order(image, ctx.E, ctx.G.mul, bb_id)
        ok = source_order == image_order
        records.append(
            {
                "case": case,
                "seed": cseed,
                "source": format_matrix_text(g),
                "source_order": source_order,
                "image_order": image_order,
                "ok": ok,
            }
        )
        if not ok:
            failures.append(
                FailureRecord(case, cseed, f"order {source_order} mapped to {image_order} for {format_matrix_text(g)}")
            )
    return VerifyReport("orders", n, failures, master, time.time() - start, records)


def check_homomorphism(ctx: PipelineContext, n: int, rng) -> VerifyReport:
    """phi(g) * phi(h) must agree with phi(g*h) modulo the center."""
    import random as _random

    start = time.time()
    failures: List[FailureRecord] = []
    records: List[dict] = []
    seeds = _case_seeds(rng, n)
    master = seeds[0] if seeds else 0
    for case, cseed in enumerate(seeds):
        crng = _random.Random(cseed)
        g = random_sl2(ctx.F, crng)
        h = random_sl2(ctx.F, crng)
        ig, _ = map_element(g, ctx)
        ih, _ = map_element(h, ctx)
        igh, _ = map_element(g * h, ctx)
        ok = bb_equiv(ctx.G.mul(ig, ih), igh, ctx.G)
        records.append(
            {
                "case": case,
                "seed": cseed,
                "g": format_matrix_text(g),
                "h": format_matrix_text(h),
                "ok": ok,
            }
        )
        if not ok:
            failures.append(
                FailureRecord(
                    case, cseed, f"phi({format_matrix_text(g)})*phi({format_matrix_text(h)}) != phi(product)"
                )
            )
    return VerifyReport("homomorphism", n, failures, master, time.time() - start, records)


def check_steinberg(ctx: PipelineContext, n: int, rng) -> VerifyReport:
    """The four rank-1 relations through the morphism, n draws each.

    (i)   u(s) u(t) = u(s+t) for the upper and the lower root group;
    (ii)  h(a) u(t) h(a)^-1 = u(a^2 t);
    (iii) [u(s), u(t)] = 1 inside one root group;
    (iv)  n(t) = u(t) l(-1/t) u(t) maps to the product of the three images.
    """
    import random as _random

    start = time.time()
    F = ctx.F
    failures: List[FailureRecord] = []
    records: List[dict] = []
    seeds = _case_seeds(rng, n)
    master = seeds[0] if seeds else 0

    def phi(m: Mat2):
        return map_element(m, ctx)[0]

    G = ctx.G
    up = lambda t: Mat2.upper(F, t)
    lo = lambda t: Mat2.lower(F, t)
    for case, cseed in enumerate(seeds):
        crng = _random.Random(cseed)
        s = F.random_nonzero(crng)
        t = F.random_nonzero(crng)
        a = F.random_nonzero(crng)
        checks = []
        checks.append(
            ("root-additivity-upper", bb_equiv(G.mul(phi(up(s)), phi(up(t))), phi(up(s + t)), G))
        )
        checks.append(
            ("root-additivity-lower", bb_equiv(G.mul(phi(lo(s)), phi(lo(t))), phi(lo(s + t)), G))
        )
        h_a = Mat2.diagonal(F, a, a.inv())
        conj = phi(h_a)
        lhs = G.mul(G.mul(conj, phi(up(t))), G.inv(conj))
        checks.append(("torus-action", bb_equiv(lhs, phi(up(a * a * t)), G)))
        x, y = phi(up(s)), phi(up(t))
        comm = G.mul(G.mul(x, y), G.inv(G.mul(y, x)))
        checks.append(("root-commutation", bb_equiv(comm, G.identity, G)))
        weyl = up(t) * lo(-(t.inv())) * up(t)
        rhs = G.mul(G.mul(phi(up(t)), phi(lo(-(t.inv())))), phi(up(t)))
        checks.append(("weyl-element", bb_equiv(phi(weyl), rhs, G)))
        bad = [name for name, ok in checks if not ok]
        records.append(
            {
                "case": case,
                "seed": cseed,
                "s": int(s),
                "t": int(t),
                "a": int(a),
                "ok": not bad,
                "failed_relations": bad,
            }
        )
        if bad:
            failures.append(
                FailureRecord(case, cseed, f"relations {bad} failed at s={int(s)} t={int(t)} a={int(a)}")
            )
    return VerifyReport("steinberg", n, failures, master, time.time() - start, records)


SUITES: dict = {
    "orders": check_orders,
    "homomorphism": check_homomorphism,
    "steinberg": check_steinberg,
}


def run_suites(ctx: PipelineContext, names: List[str], samples: int, rng) -> List[VerifyReport]:
    reports = []
    for name in names:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        reports.append(SUITES[name](ctx, samples, rng))
    return reports
