"""The preprocessing toolbox: everything the morphism pipeline needs to work
inside the black box group.

The twelve items, in the order they are carried here:

 1. the PGL2 setup output,
 2. a generating list for the semidirect product,
 3. three commuting involutions, the vertices of the projective plane,
 4. an element of order 3 permuting the vertices cyclically,
 5. unit anchors on the three coordinate lines,
 6. generators for the centralizer of the fixed vertex (the field lives on
    the corresponding axis),
 7. the projective point serving as 0,
 8. the projective point at homogeneous coordinates (1,1,1),
 9. the odd part of the group exponent,
10. its binary representation,
11. an element of order 4 squaring to the fixed vertex,
12. the identity handle.

Vertices are found from the orbit of a random involution under an order-3
element: once the involution commutes with its conjugate, the whole orbit is
a commuting triple whose product is central, and the order-3 element itself
is the permuter. The frame anchors are then fixed inside the oracle from the
decoded axes; their public contracts are coset- and basis-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .blackbox import (
    BBElement,
    BBGroup,
    IntMat,
    legendre,
    mask_ints,
    mat_det,
    mat_inv,
    mat_mul,
    mat_scale,
    unmask_ints,
)
from .errors import RetryBudgetExceeded
from .pgl2 import (
    SetupPGL2Output,
    TorusLetter,
    TorusWord,
    YElement,
    parse_y,
    random_y_element,
    random_tilde_element,
    setup_for_pgl2,
    y_alpha,
    y_bray,
    y_conj,
    y_equiv,
    y_from_word,
    y_is_identity,
    y_mul,
    y_order,
    y_pow,
    y_random_involution,
)
from .primefield import ExponentData, PrimeField, odd_part, pf_sqrt, NON_RESIDUE

ORDER3_BASE_RETRIES = 64
ORDER3_CONJ_BUDGET = 4096
ORDER4_RETRIES = 64
TRIPLE_RETRIES = 64
CENTRALIZER_GEN_RETRIES = 128
ANCHOR_RETRIES = 256

Vec3 = Tuple[int, int, int]

_PFIELD_CACHE: dict = {}


def _pfield(p: int) -> PrimeField:
    if p not in _PFIELD_CACHE:
        _PFIELD_CACHE[p] = PrimeField(p)
    return _PFIELD_CACHE[p]


def _q3(v: Vec3, p: int) -> int:
    return (v[0] * v[0] + v[1] * v[2]) % p


def _b3(u: Vec3, v: Vec3, p: int) -> int:
    """Doubled polar form of x^2 + yz; zero exactly on orthogonal pairs."""
    return (2 * u[0] * v[0] + u[1] * v[2] + u[2] * v[1]) % p


def _det3(c1: Vec3, c2: Vec3, c3: Vec3, p: int) -> int:
    return (
        c1[0] * (c2[1] * c3[2] - c2[2] * c3[1])
        - c2[0] * (c1[1] * c3[2] - c1[2] * c3[1])
        + c3[0] * (c1[1] * c2[2] - c1[2] * c2[1])
    ) % p


def _solve3(c1: Vec3, c2: Vec3, c3: Vec3, target: Vec3, p: int) -> Optional[Vec3]:
    """Coordinates of target in the basis (c1, c2, c3), or None if singular."""
    d = _det3(c1, c2, c3, p)
    if d == 0:
        return None
    di = pow(d, p - 2, p)
    a1 = _det3(target, c2, c3, p) * di % p
    a2 = _det3(c1, target, c3, p) * di % p
    a3 = _det3(c1, c2, target, p) * di % p
    return (a1, a2, a3)


@dataclass
class _WBToolbox:
    """Oracle-private frame data for the coordinate bridges."""

    p: int
    vtilde: Tuple[Vec3, Vec3, Vec3]  # scaled vertex axes: the sharp frame
    pfield: PrimeField

    def coords_of(self, w: Vec3) -> Vec3:
        out = _solve3(self.vtilde[0], self.vtilde[1], self.vtilde[2], w, self.p)
        if out is None:
            raise AssertionError("degenerate frame")
        return out

    def vector_of(self, coords: Vec3) -> Vec3:
        p = self.p
        return tuple(
            sum(coords[j] * self.vtilde[j][k] for j in range(3)) % p for k in range(3)
        )  # type: ignore[return-value]


@dataclass
class ToolBox:
    setup: SetupPGL2Output
    pgl2_gens: List[YElement]
    plane_involutions: Tuple[YElement, YElement, YElement]
    order3: YElement
    unity_points: List[YElement]
    centralizer_gens: List[YElement]
    zero_point: YElement
    point_111: YElement
    Eo: int
    Eo_bits: tuple
    order4: YElement
    identity: BBElement
    _wb: Optional[_WBToolbox] = field(default=None, repr=False)

    @property
    def group(self) -> BBGroup:
        return self.setup.group


def axis_of_y_involution(setup: SetupPGL2Output, j: YElement) -> Vec3:
    """Decode an involution of the semidirect product to its axis vector.

    Oracle-private. A bit-0 involution decodes to a trace-zero matrix
    [[x,y],[z,-x]] whose axis is (x,y,z); a bit-1 involution is first
    composed with the hidden alpha conjugator.
    """
    wb = setup._wb
    p = wb.p
    m = wb.group.open_box(wb.group._secret_seed).decode(j.first)
    if j.bit == 1:
        m = mat_mul(m, wb.alpha_mat, p)
    if (m[0] + m[3]) % p != 0:
        raise ValueError("not an involution modulo the center: nonzero trace")
    v = (m[0] % p, m[1] % p, m[2] % p)
    if _q3(v, p) == 0:
        raise AssertionError("involution with isotropic axis cannot exist")
    return v


def involution_at_axis(setup: SetupPGL2Output, w: Vec3) -> YElement:
    """Oracle-private inverse of axis extraction: the involution about w.

    The half-turn about an anisotropic w = (x,y,z) is conjugation by the
    trace-zero matrix [[x,y],[z,-x]]; the lift lands in the coset its
    determinant class dictates.
    """
    wb = setup._wb
    p = wb.p
    q = _q3(w, p)
    if q == 0:
        raise ValueError("isotropic axis carries no involution")
    W: IntMat = (w[0] % p, w[1] % p, w[2] % p, (-w[0]) % p)
    det = (-q) % p
    pfield = _pfield(p)
    if legendre(det, p) == 1:
        s = pf_sqrt(pfield.from_int(det))
        mat = mat_scale(W, pow(s.value, p - 2, p), p)
        bit = 0
    else:
        V = mat_mul(W, wb.alpha_mat_inv, p)
        dv = mat_det(V, p)
        s = pf_sqrt(pfield.from_int(dv))
        if s is NON_RESIDUE:
            raise AssertionError("outer lift determinant must be square")
        mat = mat_scale(V, pow(s.value, p - 2, p), p)
        bit = 1
    box = wb.group.open_box(wb.group._secret_seed)
    first = box.encode(mat)
    second = box.encode(wb.apply_alpha(mat))
    return YElement(first, second, bit, setup)


def find_involution_triple(setup: SetupPGL2Output, rng) -> Tuple[YElement, YElement, YElement]:
    """Three commuting involutions with central product.

    Takes an involution, an involution from its centralizer distinct from it,
    and completes with the product.
    """
    eo = odd_part(setup.group.exponent_hint)
    for _ in range(TRIPLE_RETRIES):
        e1 = y_random_involution(setup, eo, rng, bit_zero_only=True)
        for _ in range(TRIPLE_RETRIES):
            c = y_bray(setup, e1, rng)
            z = y_pow(c, eo.odd)
            if y_is_identity(z):
                continue
            while not y_is_identity(y_mul(z, z)):
                z = y_mul(z, z)
            e2 = z
            if y_equiv(e2, e1):
                continue
            if not y_equiv(y_mul(e1, e2), y_mul(e2, e1)):
                continue
            return e1, e2, y_mul(e1, e2)
    raise RetryBudgetExceeded("no commuting involution pair found")


def _random_order3(setup: SetupPGL2Output, rng) -> YElement:
    E = setup.group.exponent_hint
    for _ in range(ORDER3_BASE_RETRIES):
        y = random_tilde_element(setup, setup.word_length, rng)
        o = y_order(y, E)
        if o % 3 == 0:
            return y_pow(y, o // 3)
    raise RetryBudgetExceeded("no element of order divisible by 3")


def find_order3_permuter(setup: SetupPGL2Output, triple, rng) -> YElement:
    """Order-3 element cycling the given commuting triple, by random
    conjugation of an order-3 seed element. Practical at small field sizes;
    the toolbox itself grows the triple out of the permuter instead."""
    e1, e2, e3 = triple
    base = _random_order3(setup, rng)
    for _ in range(ORDER3_CONJ_BUDGET):
        g = random_y_element(setup, setup.word_length, rng)
        cand = y_conj(base, g)
        for r in (cand, y_mul(cand, cand)):
            if y_equiv(y_conj(e1, r), e2) and y_equiv(y_conj(e2, r), e3):
                return r
    raise RetryBudgetExceeded("no conjugate of the order-3 seed permutes the triple")


def find_order4_over(setup: SetupPGL2Output, e1: YElement, rng) -> YElement:
    """Element of order 4 whose square is e1.

    Powers centralizer elements of e1 into the 2-part; inside the rotation
    torus of e1 the unique involution is e1 itself, so once the chain of
    squares is longer than one step its last two entries are the answer.
    """
    eo = odd_part(setup.group.exponent_hint)
    for _ in range(ORDER4_RETRIES):
        c = y_bray(setup, e1, rng)
        z = y_pow(c, eo.odd)
        if y_is_identity(z):
            continue
        chain = [z]
        while not y_is_identity(chain[-1]):
            chain.append(y_mul(chain[-1], chain[-1]))
        if len(chain) < 3:  # order 2 only: a flip, not a quarter turn
            continue
        kappa, invol = chain[-3], chain[-2]
        if y_equiv(invol, e1):
            return kappa
    raise RetryBudgetExceeded("no order-4 element over the fixed involution")


def _orbit_triple(setup: SetupPGL2Output, eo: ExponentData, rng):
    """Vertices as the orbit of an involution under an order-3 element.

    A random involution commutes with its conjugate roughly once per p
    draws; the orbit is then automatically a commuting triple with central
    product, cycled by the order-3 element itself.
    """
    p = setup._wb.p
    budget = 96 + 8 * p
    for _ in range(8):
        r3 = _random_order3(setup, rng)
        for _ in range(budget):
            e = y_random_involution(setup, eo, rng, bit_zero_only=True)
            e_r = y_conj(e, r3)
            if y_equiv(e_r, e):
                continue
            if y_equiv(y_mul(e, e_r), y_mul(e_r, e)):
                e3 = y_mul(e, e_r)
                if not y_equiv(y_conj(e_r, r3), e3):
                    raise AssertionError("orbit triple does not close")
                return (e, e_r, e3), r3
    raise RetryBudgetExceeded("no involution orbit closes into a frame")


def toolbox_sl2(
    S_gens: List[BBElement], E: int, G: BBGroup, rng, word_length: int = 10
) -> ToolBox:
    """Assemble the full toolbox for the group generated by S_gens.

    E may be any exponent of the group. Deterministic for a fixed rng seed.
    """
    eo = odd_part(E)
    setup = setup_for_pgl2(S_gens, eo, G, rng, word_length=word_length)
    wbs = setup._wb
    p = wbs.p
    pfield = _pfield(p)

    (e1, e2, e3), r3 = _orbit_triple(setup, eo, rng)

    axes = [axis_of_y_involution(setup, e) for e in (e1, e2, e3)]

    # the (1,1,1) anchor fixes the frame scalars; it must be in general
    # position and non-orthogonal to every vertex so the representation
    # generated by the witnesses stays irreducible
    point_111 = None
    frame: Optional[Tuple[Vec3, Vec3, Vec3]] = None
    for _ in range(ANCHOR_RETRIES):
        j = y_random_involution(setup, eo, rng)
        w4 = axis_of_y_involution(setup, j)
        coeffs = _solve3(axes[0], axes[1], axes[2], w4, p)
        if coeffs is None or any(c == 0 for c in coeffs):
            continue
        if any(_b3(w4, axes[k], p) == 0 for k in range(3)):
            continue
        point_111 = j
        frame = tuple(
            tuple(coeffs[k] * axes[k][i] % p for i in range(3)) for k in range(3)
        )  # type: ignore[assignment]
        break
    if point_111 is None:
        raise RetryBudgetExceeded("no involution in general position for the frame anchor")

    wbt = _WBToolbox(p=p, vtilde=frame, pfield=pfield)

    def involution_at(coords: Vec3) -> YElement:
        return involution_at_axis(setup, wbt.vector_of(coords))

    t0, _ = _scan_line(frame, p, (0, 1, 0), (0, 0, 1))
    zero_point = involution_at((0, 1, t0))

    unity_points = []
    u1, _ = _scan_line(frame, p, (1, 0, 0), (0, 1, 0))
    unity_points.append(involution_at((1, u1, 0)))
    u2, _ = _scan_line(frame, p, (0, 1, 0), (0, 0, 1), skip=t0)
    unity_points.append(involution_at((0, 1, u2)))
    u3, _ = _scan_line(frame, p, (0, 0, 1), (1, 0, 0))
    unity_points.append(involution_at((u3, 0, 1)))

    kappa = find_order4_over(setup, e1, rng)

    centralizer_gens = _centralizer_generators(setup, e1, e2, rng)

    pgl2_gens = [
        y_from_word(TorusWord((TorusLetter("S", 0, 1),)), setup),
        y_from_word(TorusWord((TorusLetter("R", 0, 1),)), setup),
        y_alpha(setup),
    ]

    tb = ToolBox(
        setup=setup,
        pgl2_gens=pgl2_gens,
        plane_involutions=(e1, e2, e3),
        order3=r3,
        unity_points=unity_points,
        centralizer_gens=centralizer_gens,
        zero_point=zero_point,
        point_111=point_111,
        Eo=eo.odd,
        Eo_bits=eo.bits,
        order4=kappa,
        identity=G.identity,
        _wb=wbt,
    )
    _validate_toolbox(tb)
    return tb


def _scan_line(frame, p: int, c_base: Vec3, c_dir: Vec3, skip: int = 0):
    """Smallest admissible parameter on the line c_base + t*c_dir (sharp coords)."""
    base = tuple(sum(c_base[j] * frame[j][k] for j in range(3)) % p for k in range(3))
    dirv = tuple(sum(c_dir[j] * frame[j][k] for j in range(3)) % p for k in range(3))
    for t in range(1, p):
        if t == skip:
            continue
        w = tuple((base[k] + t * dirv[k]) % p for k in range(3))
        if _q3(w, p) != 0:
            return t, w
    raise AssertionError("no anisotropic point on the coordinate line")


def _centralizer_generators(setup, e1: YElement, e2: YElement, rng) -> List[YElement]:
    """A maximal-order rotation about e1's axis plus a flip: generates C(e1)."""
    p = setup._wb.p
    E = setup.group.exponent_hint
    target = p - legendre(-1, p)
    for _ in range(CENTRALIZER_GEN_RETRIES):
        c = y_bray(setup, e1, rng)
        if y_order(c, E) == target:
            return [c, e2]
    raise RetryBudgetExceeded("no full-order rotation found in the centralizer")


def _validate_toolbox(tb: ToolBox) -> None:
    e1, e2, e3 = tb.plane_involutions
    pairs = ((e1, e2), (e1, e3), (e2, e3))
    for a, b in pairs:
        if not y_equiv(y_mul(a, b), y_mul(b, a)):
            raise AssertionError("vertices do not commute")
    for e in (e1, e2, e3):
        if not y_is_identity(y_mul(e, e)) or y_is_identity(e):
            raise AssertionError("vertex is not an involution")
    if not y_equiv(y_mul(e1, e2), e3):
        raise AssertionError("vertex product is not the third vertex")
    r3 = tb.order3
    if not y_is_identity(y_pow(r3, 3)) or y_is_identity(r3):
        raise AssertionError("permuter does not have order 3")
    cycle = (e1, e2, e3, e1)
    for k in range(3):
        if not y_equiv(y_conj(cycle[k], r3), cycle[k + 1]):
            raise AssertionError("permuter does not cycle the vertices")
    if not y_equiv(y_mul(tb.order4, tb.order4), e1):
        raise AssertionError("order-4 element does not square to the fixed vertex")
    if y_is_identity(tb.order4) or y_equiv(tb.order4, e1):
        raise AssertionError("order-4 element degenerate")
    for pt in (tb.zero_point, tb.point_111):
        if not y_is_identity(y_mul(pt, pt)):
            raise AssertionError("anchor is not an involution")
        if any(y_equiv(pt, e) for e in (e1, e2, e3)):
            raise AssertionError("anchor collides with a vertex")
    for c in tb.centralizer_gens:
        if not y_equiv(y_mul(c, e1), y_mul(e1, c)):
            raise AssertionError("centralizer generator does not centralize")


# --- serialization ---

_MULTI_FIELDS = ("gen", "centralizer", "torus", "pgl2_gen", "unity", "centralizer_gen")


def _parse_fields(lines: List[str]) -> dict:
    fields: dict = {}
    for raw in lines:
        line = raw.strip()
        if not line:
            continue
        key, _, value = line.partition(" ")
        if key in _MULTI_FIELDS:
            fields.setdefault(key, []).append(value)
        else:
            fields[key] = value
    return fields


def _setup_field_lines(setup: SetupPGL2Output) -> List[str]:
    G = setup.group
    lines = [f"word_length {setup.word_length}"]
    for h in setup.gens:
        lines.append(f"gen {h.handle}")
    for h in setup.centralizer_list:
        lines.append(f"centralizer {h.handle}")
    for h in setup.torus_S:
        lines.append(f"torus {h.handle}")
    lines.append(f"involution {setup.involution_i.handle}")
    wbs = setup._wb
    lines.append(f"wb_setup {mask_ints(G, 'wb-setup', list(wbs.inv_mat) + list(wbs.alpha_mat))}")
    return lines


def _setup_from_fields(fields: dict, G: BBGroup) -> SetupPGL2Output:
    from .pgl2 import _WBSetup  # local import to keep the private type private

    setup_ints = unmask_ints(G, "wb-setup", fields["wb_setup"], 8)
    inv_mat = tuple(setup_ints[:4])
    alpha_mat = tuple(setup_ints[4:])
    p = G._p
    csq = mat_mul(alpha_mat, alpha_mat, p)
    return SetupPGL2Output(
        gens=[BBElement(h) for h in fields["gen"]],
        centralizer_list=[BBElement(h) for h in fields["centralizer"]],
        torus_S=[BBElement(h) for h in fields["torus"]],
        involution_i=BBElement(fields["involution"]),
        word_length=int(fields["word_length"]),
        _wb=_WBSetup(
            group=G,
            p=p,
            inv_mat=inv_mat,
            alpha_mat=alpha_mat,
            alpha_mat_inv=mat_inv(alpha_mat, p),
            alpha_square_scalar=csq[0],
        ),
    )


def setup_to_lines(setup: SetupPGL2Output) -> List[str]:
    return ["sl2morph-setup 1"] + _setup_field_lines(setup)


def setup_from_lines(lines: List[str], G: BBGroup) -> SetupPGL2Output:
    fields = _parse_fields(lines)
    if fields.get("sl2morph-setup") != "1":
        raise ValueError("not a setup serialization")
    return _setup_from_fields(fields, G)


def toolbox_to_lines(tb: ToolBox) -> List[str]:
    """Named-field text serialization, one field per line."""
    G = tb.group
    lines = ["sl2morph-toolbox 1"]
    lines.extend(_setup_field_lines(tb.setup))
    for y in tb.pgl2_gens:
        lines.append(f"pgl2_gen {y.serialize()}")
    for name, y in zip(("e1", "e2", "e3"), tb.plane_involutions):
        lines.append(f"{name} {y.serialize()}")
    lines.append(f"order3 {tb.order3.serialize()}")
    for y in tb.unity_points:
        lines.append(f"unity {y.serialize()}")
    for y in tb.centralizer_gens:
        lines.append(f"centralizer_gen {y.serialize()}")
    lines.append(f"zero_point {tb.zero_point.serialize()}")
    lines.append(f"point_111 {tb.point_111.serialize()}")
    lines.append(f"Eo {tb.Eo}")
    lines.append(f"Eo_bits {''.join(str(b) for b in tb.Eo_bits)}")
    lines.append(f"order4 {tb.order4.serialize()}")
    lines.append(f"identity {tb.identity.handle}")
    flat_frame = [x for v in tb._wb.vtilde for x in v]
    lines.append(f"wb_frame {mask_ints(G, 'wb-frame', flat_frame)}")
    return lines


def toolbox_from_lines(lines: List[str], G: BBGroup) -> ToolBox:
    fields = _parse_fields(lines)
    if fields.get("sl2morph-toolbox") != "1":
        raise ValueError("not a toolbox serialization")
    setup = _setup_from_fields(fields, G)
    frame_ints = unmask_ints(G, "wb-frame", fields["wb_frame"], 9)
    frame = tuple(tuple(frame_ints[3 * i : 3 * i + 3]) for i in range(3))
    wbt = _WBToolbox(p=G._p, vtilde=frame, pfield=_pfield(G._p))

    def yparse(text: str) -> YElement:
        return parse_y(text, setup)

    return ToolBox(
        setup=setup,
        pgl2_gens=[yparse(t) for t in fields["pgl2_gen"]],
        plane_involutions=tuple(yparse(fields[k]) for k in ("e1", "e2", "e3")),
        order3=yparse(fields["order3"]),
        unity_points=[yparse(t) for t in fields["unity"]],
        centralizer_gens=[yparse(t) for t in fields["centralizer_gen"]],
        zero_point=yparse(fields["zero_point"]),
        point_111=yparse(fields["point_111"]),
        Eo=int(fields["Eo"]),
        Eo_bits=tuple(int(ch) for ch in fields["Eo_bits"]),
        order4=yparse(fields["order4"]),
        identity=BBElement(fields["identity"]),
        _wb=wbt,
    )
