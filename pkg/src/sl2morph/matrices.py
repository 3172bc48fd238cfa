"""Matrices over an abstract field: SL2 arithmetic, unipotent decomposition,
involution factorization, the conjugation action on trace-zero matrices, order
computation and rotation-axis extraction.

Every routine talks to the field only through the oracle surface (zero, one,
add, sub, mul, neg, inv, eq, from_int), so the same code runs over Z/pZ and
over the black box field.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Tuple


class Mat2:
    """2x2 matrix over an abstract field."""

    __slots__ = ("field", "a", "b", "c", "d")

    def __init__(self, field, a, b, c, d):
        self.field = field
        self.a, self.b, self.c, self.d = a, b, c, d

    @classmethod
    def identity(cls, field) -> "Mat2":
        return cls(field, field.one, field.zero, field.zero, field.one)

    @classmethod
    def from_ints(cls, field, a, b, c, d) -> "Mat2":
        f = field.from_int
        return cls(field, f(a), f(b), f(c), f(d))

    @classmethod
    def upper(cls, field, t) -> "Mat2":
        return cls(field, field.one, t, field.zero, field.one)

    @classmethod
    def lower(cls, field, t) -> "Mat2":
        return cls(field, field.one, field.zero, t, field.one)

    @classmethod
    def diagonal(cls, field, a, d) -> "Mat2":
        return cls(field, a, field.zero, field.zero, d)

    def det(self):
        F = self.field
        return F.sub(F.mul(self.a, self.d), F.mul(self.b, self.c))

    def trace(self):
        return self.field.add(self.a, self.d)

    def __mul__(self, other: "Mat2") -> "Mat2":
        F = self.field
        return Mat2(
            F,
            F.add(F.mul(self.a, other.a), F.mul(self.b, other.c)),
            F.add(F.mul(self.a, other.b), F.mul(self.b, other.d)),
            F.add(F.mul(self.c, other.a), F.mul(self.d, other.c)),
            F.add(F.mul(self.c, other.b), F.mul(self.d, other.d)),
        )

    def inv(self) -> "Mat2":
        F = self.field
        det = self.det()
        if F.eq(det, F.zero):
            raise ZeroDivisionError("singular matrix")
        di = F.inv(det)
        return Mat2(
            F,
            F.mul(self.d, di),
            F.neg(F.mul(self.b, di)),
            F.neg(F.mul(self.c, di)),
            F.mul(self.a, di),
        )

    def neg(self) -> "Mat2":
        F = self.field
        return Mat2(F, F.neg(self.a), F.neg(self.b), F.neg(self.c), F.neg(self.d))

    def scale(self, s) -> "Mat2":
        F = self.field
        return Mat2(F, F.mul(self.a, s), F.mul(self.b, s), F.mul(self.c, s), F.mul(self.d, s))

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        F = self.field
        return all(F.eq(x, y) for x, y in zip(self.entries(), other.entries()))

    def __hash__(self):
        raise TypeError("Mat2 is not hashable; field elements may be oracle handles")

    def is_identity(self) -> bool:
        return self == Mat2.identity(self.field)

    def __repr__(self):
        return f"Mat2[{self.a},{self.b};{self.c},{self.d}]"


def require_sl2(g: Mat2) -> None:
    if not g.field.eq(g.det(), g.field.one):
        raise ValueError("matrix is not in SL2 (determinant != 1)")


class Mat3:
    """3x3 matrix over an abstract field, rows as tuples."""

    __slots__ = ("field", "rows")

    def __init__(self, field, rows):
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)

    @classmethod
    def identity(cls, field) -> "Mat3":
        z, o = field.zero, field.one
        return cls(field, ((o, z, z), (z, o, z), (z, z, o)))

    @classmethod
    def from_columns(cls, field, cols) -> "Mat3":
        return cls(field, tuple(tuple(cols[j][i] for j in range(3)) for i in range(3)))

    def column(self, j) -> tuple:
        return tuple(self.rows[i][j] for i in range(3))

    def __mul__(self, other: "Mat3") -> "Mat3":
        F = self.field
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = F.mul(self.rows[i][0], other.rows[0][j])
                acc = F.add(acc, F.mul(self.rows[i][1], other.rows[1][j]))
                acc = F.add(acc, F.mul(self.rows[i][2], other.rows[2][j]))
                row.append(acc)
            rows.append(tuple(row))
        return Mat3(F, rows)

    def apply(self, v) -> tuple:
        F = self.field
        return tuple(
            F.add(F.add(F.mul(self.rows[i][0], v[0]), F.mul(self.rows[i][1], v[1])), F.mul(self.rows[i][2], v[2]))
            for i in range(3)
        )

    def det(self):
        F = self.field
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        t1 = F.mul(a, F.sub(F.mul(e, i), F.mul(f, h)))
        t2 = F.mul(b, F.sub(F.mul(d, i), F.mul(f, g)))
        t3 = F.mul(c, F.sub(F.mul(d, h), F.mul(e, g)))
        return F.add(F.sub(t1, t2), t3)

    def inv(self) -> "Mat3":
        F = self.field
        det = self.det()
        if F.eq(det, F.zero):
            raise ZeroDivisionError("singular matrix")
        di = F.inv(det)
        (a, b, c), (d, e, f), (g, h, i) = self.rows
        cof = (
            (F.sub(F.mul(e, i), F.mul(f, h)), F.sub(F.mul(c, h), F.mul(b, i)), F.sub(F.mul(b, f), F.mul(c, e))),
            (F.sub(F.mul(f, g), F.mul(d, i)), F.sub(F.mul(a, i), F.mul(c, g)), F.sub(F.mul(c, d), F.mul(a, f))),
            (F.sub(F.mul(d, h), F.mul(e, g)), F.sub(F.mul(b, g), F.mul(a, h)), F.sub(F.mul(a, e), F.mul(b, d))),
        )
        return Mat3(F, tuple(tuple(F.mul(x, di) for x in row) for row in cof))

    def scale(self, s) -> "Mat3":
        F = self.field
        return Mat3(F, tuple(tuple(F.mul(x, s) for x in row) for row in self.rows))

    def __eq__(self, other):
        if not isinstance(other, Mat3):
            return NotImplemented
        F = self.field
        return all(
            F.eq(self.rows[i][j], other.rows[i][j]) for i in range(3) for j in range(3)
        )

    def __hash__(self):
        raise TypeError("Mat3 is not hashable")

    def proj_eq(self, other: "Mat3") -> bool:
        """Equality up to a nonzero global scalar."""
        F = self.field
        flat_a = [x for row in self.rows for x in row]
        flat_b = [x for row in other.rows for x in row]
        for x, y in zip(flat_a, flat_b):
            if not F.eq(x, F.zero):
                if F.eq(y, F.zero):
                    return False
                lam = F.mul(y, F.inv(x))
                return all(F.eq(F.mul(u, lam), v) for u, v in zip(flat_a, flat_b))
            if not F.eq(y, F.zero):
                return False
        return True  # both zero matrices

    def is_identity(self) -> bool:
        return self == Mat3.identity(self.field)

    def __repr__(self):
        return f"Mat3{self.rows}"


class ProjPoint:
    """Point of the projective plane, equality up to a nonzero scalar."""

    __slots__ = ("field", "coords")

    def __init__(self, field, coords):
        if all(field.eq(x, field.zero) for x in coords):
            raise ValueError("projective point needs a nonzero coordinate")
        self.field = field
        self.coords = tuple(coords)

    def canonical(self) -> tuple:
        """Rescale so the first nonzero coordinate is one."""
        F = self.field
        for x in self.coords:
            if not F.eq(x, F.zero):
                xi = F.inv(x)
                return tuple(F.mul(c, xi) for c in self.coords)
        raise AssertionError("unreachable: zero point")

    def __eq__(self, other):
        if not isinstance(other, ProjPoint):
            return NotImplemented
        F = self.field
        return all(F.eq(x, y) for x, y in zip(self.canonical(), other.canonical()))

    def __hash__(self):
        raise TypeError("ProjPoint is not hashable")

    def __repr__(self):
        return f"ProjPoint{self.coords}"


@dataclass(frozen=True)
class UnipotentFactor:
    """upper encodes [[1,t],[0,1]], lower encodes [[1,0],[t,1]]."""

    side: str  # "upper" | "lower"
    t: object

    def to_mat2(self, field) -> Mat2:
        if self.side == "upper":
            return Mat2.upper(field, self.t)
        if self.side == "lower":
            return Mat2.lower(field, self.t)
        raise ValueError(f"unknown side {self.side!r}")


def unipotent_decompose(g: Mat2) -> List[UnipotentFactor]:
    """Write g in SL2 as a product of at most 4 unipotent factors.

    If the lower-left entry c is nonzero the product is
    upper((a-1)/c) * lower(c) * upper((d-1)/c); identity factors (t = 0) are
    dropped. If c = 0 and g != I, premultiply by lower(1) to make it nonzero
    and prepend lower(-1).
    """
    F = g.field
    require_sl2(g)
    if g.is_identity():
        return []
    factors: List[UnipotentFactor] = []
    if F.eq(g.c, F.zero):
        factors.append(UnipotentFactor("lower", F.neg(F.one)))
        g = Mat2.lower(F, F.one) * g
    ci = F.inv(g.c)
    x = F.mul(F.sub(g.a, F.one), ci)
    y = F.mul(F.sub(g.d, F.one), ci)
    for side, t in (("upper", x), ("lower", g.c), ("upper", y)):
        if not F.eq(t, F.zero):
            factors.append(UnipotentFactor(side, t))
    return factors


def involution_pair(u: UnipotentFactor, field) -> Tuple[Mat2, Mat2]:
    """Split a nontrivial unipotent as J * (J u) with J = diag(1,-1).

    Both returned matrices square to the identity in GL2, hence are
    involutions in PGL2, and their product is the unipotent back.
    """
    if field.eq(u.t, field.zero):
        raise ValueError("identity factor has no involution splitting")
    J = Mat2.diagonal(field, field.one, field.neg(field.one))
    return J, J * u.to_mat2(field)


def adjoint(g: Mat2) -> Mat3:
    """Matrix of x -> g x g^-1 on trace-zero 2x2 matrices.

    Ordered basis (h, e, f) = ([[1,0],[0,-1]], [[0,1],[0,0]], [[0,0],[1,0]]);
    the coordinates (x, y, z) of x*h + y*e + z*f satisfy the invariant form
    Q = x^2 + yz. Defined for determinant +-1 (PGL2 involutions carry
    determinant -1); the kernel is exactly the scalars.
    """
    F = g.field
    det = g.det()
    if not (F.eq(det, F.one) or F.eq(det, F.neg(F.one))):
        raise ValueError("adjoint expects determinant +-1")
    return _adjoint_any(g)


def _adjoint_any(g: Mat2) -> Mat3:
    """Conjugation action matrix for any invertible g; scalar multiples of g
    give the same result, so this is well defined on the projective group."""
    F = g.field
    det = g.det()
    if F.eq(det, F.zero):
        raise ZeroDivisionError("singular matrix has no conjugation action")
    di = F.inv(det)
    a, b, c, d = g.a, g.b, g.c, g.d
    two = F.add(F.one, F.one)
    col1 = (
        F.add(F.mul(a, d), F.mul(b, c)),
        F.neg(F.mul(two, F.mul(a, b))),
        F.mul(two, F.mul(c, d)),
    )
    col2 = (F.neg(F.mul(a, c)), F.mul(a, a), F.neg(F.mul(c, c)))
    col3 = (F.mul(b, d), F.neg(F.mul(b, b)), F.mul(d, d))
    cols = [[F.mul(x, di) for x in col] for col in (col1, col2, col3)]
    return Mat3.from_columns(F, cols)


def quad_form(field, v):
    """Q(x, y, z) = x^2 + yz, the form preserved by the conjugation action."""
    return field.add(field.mul(v[0], v[0]), field.mul(v[1], v[2]))


def bilinear_form(field, u, v):
    """Polar form of Q: B(u, v) = u0*v0 + (u1*v2 + u2*v1)/2... kept doubled.

    Works in any odd characteristic: returns 2*B(u,v) = 2*u0*v0 + u1*v2 + u2*v1,
    which vanishes exactly when u and v are orthogonal.
    """
    t = field.add(field.mul(u[1], v[2]), field.mul(u[2], v[1]))
    d = field.mul(u[0], v[0])
    return field.add(field.add(d, d), t)


def _pow(x, n: int, mul):
    """x**n for n >= 1 by binary powering under a supplied multiplication."""
    if n < 1:
        raise ValueError("exponent must be >= 1")
    acc = None
    base = x
    while n:
        if n & 1:
            acc = base if acc is None else mul(acc, base)
        n >>= 1
        if n:
            base = mul(base, base)
    return acc


_FACTOR_CACHE: dict = {}


def factorize(n: int) -> dict:
    """Trial-division factorization; adequate while exponents stay below 2**32.

    Memoized: order computations hammer the same group exponent.
    """
    cached = _FACTOR_CACHE.get(n)
    if cached is not None:
        return cached
    out = {}
    m = n
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1 if d == 2 else 2
    if m > 1:
        out[m] = out.get(m, 0) + 1
    if len(_FACTOR_CACHE) > 4096:
        _FACTOR_CACHE.clear()
    _FACTOR_CACHE[n] = out
    return out


def element_order(g, E: int, mul: Callable, is_identity: Callable) -> int:
    """Exact multiplicative order of g given that g**E is the identity.

    Strips prime factors from E while the reduced power stays the identity.
    Generic over the carrier: works for matrices, opaque handles and pairs.
    """
    if is_identity(g):
        return 1
    if not is_identity(_pow(g, E, mul)):
        raise ValueError("g**E is not the identity; E is not an exponent for g")
    order = E
    for q in factorize(E):
        while order % q == 0 and is_identity(_pow(g, order // q, mul)):
            order //= q
    return order


def _cross(field, u, v):
    F = field
    return (
        F.sub(F.mul(u[1], v[2]), F.mul(u[2], v[1])),
        F.sub(F.mul(u[2], v[0]), F.mul(u[0], v[2])),
        F.sub(F.mul(u[0], v[1]), F.mul(u[1], v[0])),
    )


def axis_of_rotation(A: Mat3) -> ProjPoint:
    """Unique fixed projective point of a half-turn: kernel of A - I.

    Requires A != I with a rank-2 difference; the kernel vector is a formal
    cross product of two independent rows.
    """
    F = A.field
    ident = Mat3.identity(F)
    diff = [
        tuple(F.sub(A.rows[i][j], ident.rows[i][j]) for j in range(3)) for i in range(3)
    ]
    if all(F.eq(x, F.zero) for row in diff for x in row):
        raise ValueError("identity has no rotation axis")
    for i, j in ((0, 1), (0, 2), (1, 2)):
        v = _cross(F, diff[i], diff[j])
        if any(not F.eq(x, F.zero) for x in v):
            residual = Mat3(F, diff).apply(v)
            if any(not F.eq(x, F.zero) for x in residual):
                raise ValueError("kernel of A - I is not one-dimensional")
            return ProjPoint(F, v)
    raise ValueError("A - I has rank < 2; axis not unique")


def random_sl2(field, rng) -> Mat2:
    """Uniform element of SL2 over a prime field facade.

    First row uniform nonzero, second row uniform on the affine line of
    solutions of ad - bc = 1.
    """
    p = field.p
    while True:
        a, b = rng.randrange(p), rng.randrange(p)
        if a or b:
            break
    if a:
        c = rng.randrange(p)
        d = (1 + b * c) * pow(a, p - 2, p) % p
    else:
        d = rng.randrange(p)
        c = (a * d - 1) * pow(b, p - 2, p) % p
    return Mat2.from_ints(field, a, b, c, d)


def parse_matrix_text(text: str, field) -> Mat2:
    """Parse the CLI matrix format: row-major, e.g. "2,1;3,2"."""
    rows = text.strip().split(";")
    if len(rows) != 2:
        raise ValueError(f"expected 2 rows separated by ';', got {len(rows)}")
    entries = []
    for row in rows:
        cells = row.split(",")
        if len(cells) != 2:
            raise ValueError("each row needs exactly 2 comma-separated entries")
        entries.extend(int(c.strip()) for c in cells)
    return Mat2.from_ints(field, *entries)


def format_matrix_text(g: Mat2) -> str:
    a, b, c, d = (int(x) for x in g.entries())
    return f"{a},{b};{c},{d}"
