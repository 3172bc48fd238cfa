"""The end-to-end morphism: an ordinary SL2 matrix over the prime field in,
a black box group handle out.

Route: encode the entries into the black box field, decompose the encoded
matrix into unipotent factors, split each factor into two involutions of the
projective matrix group, push each involution through the conjugation action
(flat), the change of basis (sharp), the rotation axis, and the coordinate
bridge into the semidirect product, multiply the images back together, take
the first component, and resolve the central sign against the order of the
source matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

from .bbfield import KField
from .blackbox import BBElement, BBGroup, bb_random, make_blackbox_sl2
from .errors import RetryBudgetExceeded
from .matrices import (
    Mat2,
    Mat3,
    UnipotentFactor,
    adjoint,
    axis_of_rotation,
    element_order,
    format_matrix_text,
    involution_pair,
    require_sl2,
    unipotent_decompose,
)
from .pgl2 import YElement, y_mul
from .primefield import PrimeField, PrimeModulus
from .sharpflat import ChangeOfBasis, sharp_action, sharp_vs_flat
from .toolbox import ToolBox, toolbox_sl2
from .utils import derive_rng

TraceSink = Optional[Callable[[str, str], None]]


@dataclass
class PipelineContext:
    """Everything the morphism needs, built from one (p, seed) lineage."""

    p: int
    seed: int
    G: BBGroup
    TB: ToolBox
    K: KField
    basis: ChangeOfBasis
    F: PrimeField
    E: int
    central: BBElement  # the central involution of the black box group
    trace_sink: TraceSink = None
    _j_image: Optional[YElement] = field(default=None, repr=False)


def _central_involution(G: BBGroup, rng) -> BBElement:
    """The unique order-2 handle, reached by powering any even-order element."""
    E = G.exponent_hint
    for _ in range(64):
        x = bb_random(G, rng)
        o = element_order(x, E, G.mul, lambda z: z == G.identity)
        if o % 2 == 0:
            return G.pow(x, o // 2)
    raise RetryBudgetExceeded("no even-order element found")


def build_context(
    p: int,
    seed: int,
    word_length: int = 10,
    progress=None,
    trace_sink: TraceSink = None,
    toolbox: Optional[ToolBox] = None,
    basis: Optional[ChangeOfBasis] = None,
) -> PipelineContext:
    """Construct oracle, toolbox, field and change of basis for (p, seed).

    Deterministic: the same inputs rebuild handle-identical components.
    Prebuilt toolbox/basis (for example from the CLI cache) can be supplied.
    """
    mod = PrimeModulus(p)
    G = make_blackbox_sl2(mod, seed)
    if toolbox is None:
        toolbox = toolbox_sl2(
            G.generators, G.exponent_hint, G, derive_rng(seed, "toolbox"), word_length=word_length
        )
    K = KField(toolbox)
    if basis is None:
        basis = sharp_vs_flat(toolbox, K, derive_rng(seed, "basis"), progress=progress)
    central = _central_involution(G, derive_rng(seed, "central"))
    return PipelineContext(
        p=p,
        seed=seed,
        G=G,
        TB=toolbox,
        K=K,
        basis=basis,
        F=PrimeField(mod),
        E=G.exponent_hint,
        central=central,
        trace_sink=trace_sink,
    )


@dataclass
class MorphismTrace:
    """Ordered stage records of one morphism application."""

    source_text: str
    stages: List[Tuple[str, object]] = field(default_factory=list)

    def record(self, name: str, payload) -> None:
        self.stages.append((name, payload))

    def get(self, name: str):
        for n, payload in self.stages:
            if n == name:
                return payload
        raise KeyError(name)

    def lines(self) -> List[str]:
        out = [f"source {self.source_text}"]
        for name, payload in self.stages:
            out.append(f"{name} {_render(payload)}")
        return out


def _render(payload) -> str:
    if isinstance(payload, (list, tuple)):
        return "[" + ", ".join(_render(x) for x in payload) + "]"
    if isinstance(payload, Mat2):
        return f"mat2({payload.a!r},{payload.b!r};{payload.c!r},{payload.d!r})"
    if isinstance(payload, Mat3):
        return "mat3" + repr(payload.rows)
    if isinstance(payload, YElement):
        return payload.serialize()
    if isinstance(payload, BBElement):
        return payload.handle
    if isinstance(payload, UnipotentFactor):
        return f"{payload.side}({payload.t!r})"
    return repr(payload)


def encode_matrix(g: Mat2, K: KField) -> Mat2:
    """Entrywise image of an SL2 matrix over the prime field in the field oracle."""
    require_sl2(g)
    gk = Mat2(K, *(K.encode(x) for x in g.entries()))
    if not K.eq(gk.det(), K.one):
        raise AssertionError("field morphism did not preserve the determinant")
    return gk


def involution_image(j: Mat2, ctx: PipelineContext) -> YElement:
    """Image in the semidirect product of an involution of the matrix group.

    Chain: conjugation action, change of basis, rotation axis, coordinate
    bridge. The result is validated against its own sharp action before use.
    """
    K = ctx.K
    jj = j * j
    ident = Mat2.identity(K)
    if not (jj == ident or jj == ident.scale(K.neg(K.one))):
        raise ValueError("not an involution in the projective matrix group")
    flat = adjoint(j)
    sharp = ctx.basis.sharp_of_flat(flat)
    axis = axis_of_rotation(sharp)
    y = K.point_from_coords(*axis.coords)
    if not sharp_action(y, K).proj_eq(sharp):
        raise AssertionError("involution image drifted from its sharp action")
    return y


def _j_involution_image(ctx: PipelineContext) -> YElement:
    """Image of the shared first involution J = diag(1,-1), cached per context."""
    if ctx._j_image is None:
        K = ctx.K
        J = Mat2.diagonal(K, K.one, K.neg(K.one))
        ctx._j_image = involution_image(J, ctx)
    return ctx._j_image


def resolve_sign(x: BBElement, target_order: int, G: BBGroup, central: BBElement) -> BBElement:
    """Pick the center-coset lift of x whose order matches the source order."""
    is_id = lambda z: z == G.identity
    if element_order(x, 2 * G.exponent_hint, G.mul, is_id) == target_order:
        return x
    alt = G.mul(x, central)
    if element_order(alt, 2 * G.exponent_hint, G.mul, is_id) == target_order:
        return alt
    raise AssertionError("neither central lift matches the source order")


def _images_of_factors(factors: List[UnipotentFactor], ctx: PipelineContext, trace: MorphismTrace):
    K = ctx.K
    pairs = [involution_pair(u, K) for u in factors]
    trace.record("involution-pairs", [list(p) for p in pairs])
    j_img = _j_involution_image(ctx)
    images: List[YElement] = []
    for first, second in pairs:
        images.append(j_img)
        images.append(involution_image(second, ctx))
    trace.record("involution-images", images)
    return images


def _assemble(images: List[YElement], ctx: PipelineContext) -> YElement:
    from .pgl2 import y_identity

    acc = y_identity(ctx.TB.setup)
    for y in images:
        acc = y_mul(acc, y)
    if acc.bit != 0:
        raise AssertionError("assembled image left the bit-0 coset")
    return acc


def map_element(g: Mat2, ctx: PipelineContext) -> Tuple[BBElement, MorphismTrace]:
    """Image of g in the black box group, with the full stage trace."""
    require_sl2(g)
    gk = encode_matrix(g, ctx.K)
    factors = unipotent_decompose(gk)
    return map_via_factors(g, gk, factors, ctx)


def map_via_factors(
    g: Mat2, gk: Mat2, factors: List[UnipotentFactor], ctx: PipelineContext
) -> Tuple[BBElement, MorphismTrace]:
    """Finish the morphism from an explicit factor list whose product is gk.

    Exposed so that different unipotent decompositions of the same matrix
    can be pushed through and compared.
    """
    trace = MorphismTrace(source_text=format_matrix_text(g))
    sink = ctx.trace_sink

    def note(stage: str, payload) -> None:
        trace.record(stage, payload)
        if sink is not None:
            sink(stage, _render(payload))

    note("field-matrix", gk)
    note("unipotent-factors", factors)
    images = _images_of_factors(factors, ctx, trace)
    assembled = _assemble(images, ctx)
    note("assembled", assembled)
    component = assembled.first
    note("component", component)
    target = element_order(g, ctx.E, lambda a, b: a * b, lambda m: m.is_identity())
    resolved = resolve_sign(component, target, ctx.G, ctx.central)
    note("resolved", resolved)
    return resolved, trace


def replay_from(trace: MorphismTrace, stage: str, ctx: PipelineContext) -> BBElement:
    """Recompute the final handle starting from a recorded stage's payload."""
    source = None
    if stage == "field-matrix":
        gk = trace.get("field-matrix")
        factors = unipotent_decompose(gk)
    elif stage == "unipotent-factors":
        factors = trace.get("unipotent-factors")
    elif stage == "involution-images":
        images = trace.get("involution-images")
        assembled = _assemble(images, ctx)
        return _finish(trace, assembled.first, ctx)
    elif stage == "assembled":
        return _finish(trace, trace.get("assembled").first, ctx)
    else:
        raise KeyError(f"cannot replay from stage {stage!r}")
    fresh = MorphismTrace(source_text=trace.source_text)
    images = _images_of_factors(factors, ctx, fresh)
    assembled = _assemble(images, ctx)
    return _finish(trace, assembled.first, ctx)


def _finish(trace: MorphismTrace, component: BBElement, ctx: PipelineContext) -> BBElement:
    from .matrices import parse_matrix_text

    g = parse_matrix_text(trace.source_text, ctx.F)
    target = element_order(g, ctx.E, lambda a, b: a * b, lambda m: m.is_identity())
    return resolve_sign(component, target, ctx.G, ctx.central)
