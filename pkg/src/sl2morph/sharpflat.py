"""Change of basis between the two three-dimensional pictures of the group.

Flat side: the conjugation action on trace-zero 2x2 matrices over the black
box field, in the fixed (h, e, f) basis, preserving x^2 + yz. Sharp side:
the action of the semidirect product on the projective plane of commuting
involutions, coordinatized by the toolbox frame. Both are the same abstract
action, so a single invertible matrix M over the field conjugates one to the
other: sharp(y) = M * flat(y) * M^-1.

M is assembled line by line: the frame constraints pin its columns to the
flat axes of the vertex anchors, the invariant form of the sharp action pins
the column scales up to sign through a black box square root, and the
(1,1,1) anchor resolves the signs. Everything is computed with field oracle
operations; the square root is the step that can retry on unlucky random
choices, and progress is reported through an event callback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from .bbfield import KField
from .errors import RetryBudgetExceeded
from .matrices import Mat3, _adjoint_any, _cross, axis_of_rotation, quad_form
from .pgl2 import YElement, y_conj, y_inv
from .primefield import NON_RESIDUE
from .toolbox import ToolBox

BASIS_RETRIES = 256

ProgressFn = Optional[Callable[[str, int], None]]


@dataclass
class ChangeOfBasis:
    """M and its inverse, with the witness elements the build was checked on."""

    M: Mat3
    M_inv: Mat3
    witnesses: List[Tuple[YElement, Mat3]]

    def sharp_of_flat(self, flat: Mat3) -> Mat3:
        return self.M * flat * self.M_inv

    def flat_of_sharp(self, sharp: Mat3) -> Mat3:
        return self.M_inv * sharp * self.M


def _canonical_scale(A: Mat3) -> Mat3:
    """Deterministic projective representative: first nonzero entry scaled to one."""
    F = A.field
    for row in A.rows:
        for x in row:
            if not F.eq(x, F.zero):
                return A.scale(F.inv(x))
    raise ValueError("zero matrix has no projective representative")


def _solve3(field, cols, target):
    """Cramer solve of [c1 c2 c3] * x = target; None when singular."""
    m = Mat3.from_columns(field, cols)
    d = m.det()
    if field.eq(d, field.zero):
        return None
    di = field.inv(d)
    out = []
    for j in range(3):
        repl = list(cols)
        repl[j] = target
        out.append(field.mul(Mat3.from_columns(field, repl).det(), di))
    return tuple(out)


def sharp_action(y: YElement, K: KField) -> Mat3:
    """Matrix of the conjugation action of y on the involution plane, in
    sharp coordinates.

    Conjugation is oriented j -> y j y^-1 so that y -> sharp_action(y) is
    multiplicative (the opposite orientation is anti-multiplicative as a
    matrix map). Columns are the coordinates of the images of the three
    vertices, with the column scales fixed by the image of the (1,1,1)
    anchor; the result is a canonical projective representative.
    """
    tb = K.toolbox
    e1, e2, e3 = tb.plane_involutions
    yi = y_inv(y)
    cols = [K.coords_from_point(y_conj(e, yi)).coords for e in (e1, e2, e3)]
    target = K.coords_from_point(y_conj(tb.point_111, yi)).coords
    lam = _solve3(K, cols, target)
    if lam is None or any(K.eq(x, K.zero) for x in lam):
        raise ValueError("degenerate anchor configuration in the sharp action")
    scaled = [tuple(K.mul(c, lam[j]) for c in cols[j]) for j in range(3)]
    return _canonical_scale(Mat3.from_columns(K, scaled))


def _flat_of(y: YElement, K: KField) -> Mat3:
    """Flat-side matrix of y: conjugation action of its 2x2 preimage.

    The conjugation action is blind to the preimage's scaling, so this is
    the genuine rotation matrix, not just a projective representative.
    """
    return _adjoint_any(K.preimage_matrix_of(y))


def _invariant_diag_form(K: KField, sharps: List[Mat3]):
    """Diagonal Gram coefficients of the form the sharp matrices preserve.

    The vertex frame is orthogonal, so the form is diagonal in sharp
    coordinates; invariance under each witness gives linear conditions on
    the three coefficients, solved as a cross product of two independent
    rows.
    """
    rows = []
    for S in sharps:
        for i in range(3):
            for j in range(i + 1, 3):
                row = tuple(K.mul(S.rows[k][i], S.rows[k][j]) for k in range(3))
                if any(not K.eq(x, K.zero) for x in row):
                    rows.append(row)
    for a in range(len(rows)):
        for b in range(a + 1, len(rows)):
            g = _cross(K, rows[a], rows[b])
            if all(K.eq(x, K.zero) for x in g):
                continue
            if all(
                K.eq(
                    K.add(K.add(K.mul(r[0], g[0]), K.mul(r[1], g[1])), K.mul(r[2], g[2])),
                    K.zero,
                )
                for r in rows
            ):
                if any(K.eq(x, K.zero) for x in g):
                    return None  # degenerate: a frame direction dropped out
                return g
            return None  # inconsistent system
    return None


def sharp_vs_flat(TB: ToolBox, K: KField, rng, progress: ProgressFn = None, budget: int = BASIS_RETRIES) -> ChangeOfBasis:
    """Compute the change of basis M with sharp(y) = M * flat(y) * M^-1.

    The solve uses the two vertex generators for the line constraints, the
    invariant form plus a black box square root for the column scales, and
    the (1,1,1) anchor for the signs; it retries on non-residues or
    degenerate configurations and reports stages through ``progress``.
    """

    def emit(stage: str, attempt: int) -> None:
        if progress is not None:
            progress(stage, attempt)

    e1, e2, e3 = TB.plane_involutions
    anchors = [e1, e2, e3, TB.point_111, TB.order4]

    for attempt in range(1, budget + 1):
        emit("flat-anchors", attempt)
        flats = [_flat_of(y, K) for y in anchors]

        emit("axes", attempt)
        axes = [axis_of_rotation(flats[i]).coords for i in range(4)]

        emit("sharp-actions", attempt)
        sharps = [sharp_action(y, K) for y in anchors]

        emit("invariant-form", attempt)
        gram = _invariant_diag_form(K, [sharps[3], sharps[4], sharps[1]])
        if gram is None:
            continue
        alpha, beta, gamma = gram

        emit("scale-solve", attempt)
        q = [quad_form(K, axes[i]) for i in range(3)]
        if any(K.eq(x, K.zero) for x in q):
            continue  # an anisotropic axis cannot be isotropic: broken toolbox
        lam = K.mul(q[0], K.inv(alpha))
        d2_sq = K.mul(K.mul(lam, beta), K.inv(q[1]))
        d3_sq = K.mul(K.mul(lam, gamma), K.inv(q[2]))

        emit("square-root", attempt)
        d2 = K.sqrt(d2_sq, TB.Eo_bits, rng)
        if d2 is NON_RESIDUE:
            continue
        d3 = K.sqrt(d3_sq, TB.Eo_bits, rng)
        if d3 is NON_RESIDUE:
            continue

        emit("sign-resolution", attempt)
        solution = None
        for s2 in (d2, K.neg(d2)):
            for s3 in (d3, K.neg(d3)):
                cols = [
                    axes[0],
                    tuple(K.mul(x, s2) for x in axes[1]),
                    tuple(K.mul(x, s3) for x in axes[2]),
                ]
                comb = _solve3(K, cols, axes[3])
                if comb is None:
                    continue
                c1, c2, c3 = comb
                if K.eq(c1, c2) and K.eq(c2, c3) and not K.eq(c1, K.zero):
                    solution = cols
                    break
            if solution:
                break
        if solution is None:
            continue

        m_inv = Mat3.from_columns(K, solution)
        m = m_inv.inv()
        basis = ChangeOfBasis(M=m, M_inv=m_inv, witnesses=list(zip(anchors, flats)))

        emit("verify", attempt)
        if all(
            sharp_action(y, K).proj_eq(basis.sharp_of_flat(flat))
            for y, flat in basis.witnesses
        ):
            return basis
    raise RetryBudgetExceeded("change of basis did not converge within the retry budget")


def basis_to_lines(basis: ChangeOfBasis) -> List[str]:
    """Row-major token serialization of M and its inverse."""
    lines = ["sl2morph-basis 1"]
    for name, mat in (("M", basis.M), ("M_inv", basis.M_inv)):
        tokens = " ".join(x.token for row in mat.rows for x in row)
        lines.append(f"{name} {tokens}")
    return lines


def basis_from_lines(lines: List[str], TB: ToolBox, K: KField) -> ChangeOfBasis:
    """Rebuild a cached change of basis and re-verify it on the anchors."""
    from .bbfield import KElement

    fields = {}
    for raw in lines:
        line = raw.strip()
        if line:
            key, _, value = line.partition(" ")
            fields[key] = value
    if fields.get("sl2morph-basis") != "1":
        raise ValueError("not a change-of-basis serialization")
    mats = {}
    for name in ("M", "M_inv"):
        tokens = fields[name].split()
        if len(tokens) != 9:
            raise ValueError(f"{name} needs 9 tokens")
        els = [KElement(t) for t in tokens]
        mats[name] = Mat3(K, (tuple(els[0:3]), tuple(els[3:6]), tuple(els[6:9])))
    e1, e2, e3 = TB.plane_involutions
    anchors = [e1, e2, e3, TB.point_111, TB.order4]
    basis = ChangeOfBasis(
        M=mats["M"], M_inv=mats["M_inv"], witnesses=[(y, _flat_of(y, K)) for y in anchors]
    )
    if not (mats["M"] * mats["M_inv"]).is_identity():
        raise ValueError("cached matrices are not mutually inverse")
    for y, flat in basis.witnesses:
        if not sharp_action(y, K).proj_eq(basis.sharp_of_flat(flat)):
            raise ValueError("cached change of basis fails its witness check")
    return basis
