"""The semidirect-product model of PGL2 built on top of the black box group.

Elements are triples (x, x^alpha, bit): bit 0 for the diagonal copy of the
group modulo center, bit 1 for its coset under the diagonal automorphism
alpha. alpha itself is never evaluated on an arbitrary handle; every element
enters the group as a torus word, on which alpha acts by inverting the
letters drawn from the inverted torus, and from then on only the four
semidirect multiplication rules are needed.

The setup stage finds the involution, the two tori and a hidden realization
of alpha (conjugation by a fixed matrix of non-square determinant that
anti-commutes with the involution). The hidden matrix never leaves the
module; the public output is the four lists and the contracts they satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .blackbox import (
    BBElement,
    BBGroup,
    IntMat,
    bb_equiv,
    bb_is_central,
    bb_random_involution,
    bray_centralizer_element,
    legendre,
    mat_inv,
    mat_mul,
    mat_pow,
)
from .errors import ForeignElementError, RetryBudgetExceeded
from .matrices import _pow, element_order
from .primefield import ExponentData

TORUS_LIST_SIZE = 16
GENERATOR_SEARCH_RETRIES = 96
DEFAULT_WORD_LENGTH = 10


@dataclass(frozen=True)
class TorusLetter:
    source: str  # "S" | "R"
    index: int
    exponent: int  # +1 | -1


@dataclass(frozen=True)
class TorusWord:
    letters: Tuple[TorusLetter, ...]


def alpha_apply(w: TorusWord) -> TorusWord:
    """Word-level diagonal automorphism: negate every R-letter's exponent."""
    out = []
    for letter in w.letters:
        if letter.source == "R":
            out.append(TorusLetter("R", letter.index, -letter.exponent))
        elif letter.source == "S":
            out.append(letter)
        else:
            raise ForeignElementError(f"letter from unknown alphabet {letter.source!r}")
    return TorusWord(tuple(out))


@dataclass
class _WBSetup:
    """Oracle-private realization data; never part of the public contract."""

    group: BBGroup
    p: int
    inv_mat: IntMat  # the involution, decoded
    alpha_mat: IntMat  # conjugator realizing alpha; non-square determinant
    alpha_mat_inv: IntMat
    alpha_square_scalar: int  # alpha_mat^2 = scalar * I

    def apply_alpha(self, m: IntMat) -> IntMat:
        return mat_mul(mat_mul(self.alpha_mat, m, self.p), self.alpha_mat_inv, self.p)


@dataclass
class SetupPGL2Output:
    """The four outputs of the PGL2 setup, in order: the generating list,
    the centralizer (inverted-torus) list, the centralized-torus list, and
    the involution the construction hangs on."""

    gens: List[BBElement]
    centralizer_list: List[BBElement]
    torus_S: List[BBElement]
    involution_i: BBElement
    word_length: int = DEFAULT_WORD_LENGTH
    _wb: Optional[_WBSetup] = field(default=None, repr=False)

    @property
    def group(self) -> BBGroup:
        return self._wb.group


def _norm_one_torus_element(J: IntMat, a: int, b: int, p: int) -> IntMat:
    """a*I + b*J reduced mod p."""
    return tuple((a * (1 if k in (0, 3) else 0) + b * J[k]) % p for k in range(4))  # type: ignore


def _torus_generator_from_conic(J: IntMat, n: int, p: int, rng) -> IntMat:
    """Generator of {aI + bJ : a^2 + b^2 = 1} by rational parametrization."""
    for _ in range(4096):
        u = rng.randrange(p)
        den = (1 + u * u) % p
        if den == 0:
            continue
        di = pow(den, p - 2, p)
        a = (1 - u * u) * di % p
        b = 2 * u * di % p
        m = _norm_one_torus_element(J, a, b, p)
        if element_order(m, n, lambda x, y: mat_mul(x, y, p), lambda x: x == (1, 0, 0, 1)) == n:
            return m
    raise RetryBudgetExceeded("no generator found on the norm-one conic")


def _s_torus_generator(ctil: IntMat, lam: int, n: int, p: int, rng) -> IntMat:
    """Generator of {aI + b*ctil : a^2 - lam*b^2 = 1} (ctil^2 = lam*I)."""
    ident = (1, 0, 0, 1)
    for _ in range(4096):
        u = rng.randrange(1, p)
        den = (1 - lam * u * u) % p
        if den == 0:
            continue
        di = pow(den, p - 2, p)
        a = (1 + lam * u * u) * di % p
        b = 2 * u * di % p
        m = tuple((a * i + b * c) % p for i, c in zip(ident, ctil))
        if element_order(m, n, lambda x, y: mat_mul(x, y, p), lambda x: x == ident) == n:
            return m  # type: ignore[return-value]
    raise RetryBudgetExceeded("no generator found on the centralized torus")


def setup_for_pgl2(
    S_gens: List[BBElement],
    Eo_data: ExponentData,
    G: BBGroup,
    rng,
    word_length: int = DEFAULT_WORD_LENGTH,
) -> SetupPGL2Output:
    """Find an involution, its inverted torus, a complementary centralized
    torus, and fix the hidden realization of the diagonal automorphism.

    The search runs Bray's construction against the involution and classifies
    the results, inside the oracle, into the torus commuting with the
    involution (inverted by alpha) and the flip coset (used to build the
    alpha conjugator). Only the lists and the involution are published.
    """
    wb = G.open_box(G._secret_seed)
    p = wb.p
    chi_m1 = legendre(-1, p)
    n_r = p - chi_m1  # order of the torus containing the involution
    n_s = p + chi_m1

    i_handle = bb_random_involution(G, Eo_data, rng)
    J = wb.decode(i_handle)

    torus_mats: List[IntMat] = []
    flip: Optional[IntMat] = None
    r_gen: Optional[IntMat] = None
    for _ in range(GENERATOR_SEARCH_RETRIES):
        y = bray_centralizer_element(G, i_handle, rng)
        m = wb.decode(y)
        if mat_mul(m, J, p) == mat_mul(J, m, p):
            torus_mats.append(m)
            if r_gen is None:
                o = element_order(m, n_r, lambda x, z: mat_mul(x, z, p), lambda x: x == (1, 0, 0, 1))
                if o == n_r:
                    r_gen = m
        elif flip is None:
            flip = m
        if r_gen is not None and flip is not None:
            break
    if r_gen is None:
        # unlucky sampling: fall back to direct sampling of the same torus
        r_gen = _torus_generator_from_conic(J, n_r, p, rng)
    if flip is None:
        raise RetryBudgetExceeded("no flip found in the involution centralizer")

    # alpha conjugator: (aI + bJ) * flip with non-square determinant
    ctil = None
    for _ in range(4096):
        a, b = rng.randrange(p), rng.randrange(p)
        norm = (a * a + b * b) % p
        if norm and legendre(norm, p) == -1:
            ctil = mat_mul(_norm_one_torus_element(J, a, b, p), flip, p)
            break
    if ctil is None:
        raise RetryBudgetExceeded("no non-square norm found for the alpha conjugator")
    csq = mat_mul(ctil, ctil, p)
    if csq[1] or csq[2] or csq[0] != csq[3]:
        raise AssertionError("alpha conjugator squared is not scalar")
    lam = csq[0]

    s_gen = _s_torus_generator(ctil, lam, n_s, p, rng)

    def sample_powers(gen: IntMat, n: int) -> List[BBElement]:
        out = [wb.encode(gen)]
        half = n // 2
        while len(out) < TORUS_LIST_SIZE:
            e = rng.randrange(1, n)
            if e % half == 0:  # skip +-identity
                continue
            out.append(wb.encode(mat_pow(gen, e, p)))
        return out

    setup = SetupPGL2Output(
        gens=list(S_gens),
        centralizer_list=sample_powers(r_gen, n_r),
        torus_S=sample_powers(s_gen, n_s),
        involution_i=i_handle,
        word_length=word_length,
        _wb=_WBSetup(
            group=G,
            p=p,
            inv_mat=J,
            alpha_mat=ctil,
            alpha_mat_inv=mat_inv(ctil, p),
            alpha_square_scalar=lam,
        ),
    )
    return setup


def eval_word(w: TorusWord, setup: SetupPGL2Output) -> BBElement:
    G = setup.group
    acc = G.identity
    for letter in w.letters:
        if letter.source == "S":
            alphabet = setup.torus_S
        elif letter.source == "R":
            alphabet = setup.centralizer_list
        else:
            raise ForeignElementError(f"letter from unknown alphabet {letter.source!r}")
        if not 0 <= letter.index < len(alphabet):
            raise ForeignElementError(f"letter index {letter.index} outside the alphabet")
        h = alphabet[letter.index]
        if letter.exponent == -1:
            h = G.inv(h)
        elif letter.exponent != 1:
            raise ForeignElementError("letter exponents must be +-1")
        acc = G.mul(acc, h)
    return acc


@dataclass(frozen=True)
class YElement:
    """Element (x, x^alpha, bit) of the semidirect product."""

    first: BBElement
    second: BBElement
    bit: int
    setup: SetupPGL2Output = field(compare=False, repr=False)

    def serialize(self) -> str:
        return f"{self.first.handle}|{self.second.handle}|{self.bit}"


def parse_y(text: str, setup: SetupPGL2Output) -> YElement:
    parts = text.strip().split("|")
    if len(parts) != 3 or parts[2] not in ("0", "1"):
        raise ValueError(f"malformed Y element {text!r}")
    return YElement(BBElement(parts[0]), BBElement(parts[1]), int(parts[2]), setup)


def y_identity(setup: SetupPGL2Output) -> YElement:
    ident = setup.group.identity
    return YElement(ident, ident, 0, setup)


def y_alpha(setup: SetupPGL2Output) -> YElement:
    ident = setup.group.identity
    return YElement(ident, ident, 1, setup)


def _same_setup(a: YElement, b: YElement) -> SetupPGL2Output:
    if a.setup is not b.setup:
        # setups rebuilt from the same (p, seed) own compatible handles
        ga, gb = a.setup.group, b.setup.group
        if ga._mask_key != gb._mask_key:
            raise ForeignElementError("elements come from different setups")
    return a.setup


def y_mul(a: YElement, b: YElement) -> YElement:
    """The four semidirect product rules, keyed on the pair of bits."""
    setup = _same_setup(a, b)
    G = setup.group
    if a.bit == 0:
        first = G.mul(a.first, b.first)
        second = G.mul(a.second, b.second)
    else:
        first = G.mul(a.first, b.second)
        second = G.mul(a.second, b.first)
    return YElement(first, second, a.bit ^ b.bit, setup)


def y_inv(a: YElement) -> YElement:
    G = a.setup.group
    if a.bit == 0:
        return YElement(G.inv(a.first), G.inv(a.second), 0, a.setup)
    return YElement(G.inv(a.second), G.inv(a.first), 1, a.setup)


def y_equiv(a: YElement, b: YElement) -> bool:
    setup = _same_setup(a, b)
    G = setup.group
    if a.bit != b.bit:
        return False
    return bb_equiv(a.first, b.first, G) and bb_equiv(a.second, b.second, G)


def y_is_identity(a: YElement) -> bool:
    return a.bit == 0 and bb_is_central(a.first, a.setup.group) and bb_is_central(
        a.second, a.setup.group
    )


def y_pow(a: YElement, n: int) -> YElement:
    if n == 0:
        return y_identity(a.setup)
    if n < 0:
        return y_pow(y_inv(a), -n)
    return _pow(a, n, y_mul)


def y_conj(x: YElement, g: YElement) -> YElement:
    """x conjugated by g: g^-1 * x * g."""
    return y_mul(y_inv(g), y_mul(x, g))


def y_order(a: YElement, E: int) -> int:
    return element_order(a, E, y_mul, y_is_identity)


def random_word(setup: SetupPGL2Output, k: int, rng) -> TorusWord:
    if k < 1:
        raise ValueError("word length must be >= 1")
    if not setup.torus_S or not setup.centralizer_list:
        raise ValueError("empty torus alphabets")
    letters = []
    for _ in range(k):
        letters.append(TorusLetter("S", rng.randrange(len(setup.torus_S)), rng.choice((1, -1))))
        letters.append(TorusLetter("R", rng.randrange(len(setup.centralizer_list)), rng.choice((1, -1))))
    return TorusWord(tuple(letters))


def y_from_word(w: TorusWord, setup: SetupPGL2Output) -> YElement:
    return YElement(eval_word(w, setup), eval_word(alpha_apply(w), setup), 0, setup)


def random_tilde_element(setup: SetupPGL2Output, k: int, rng) -> YElement:
    """Random element of the bit-0 coset as an alternating torus word."""
    return y_from_word(random_word(setup, k, rng), setup)


def random_y_element(setup: SetupPGL2Output, k: int, rng) -> YElement:
    """Random element of the whole semidirect product (either coset)."""
    y = random_tilde_element(setup, k, rng)
    if rng.getrandbits(1):
        y = y_mul(y, y_alpha(setup))
    return y


def y_random_involution(
    setup: SetupPGL2Output, eo: ExponentData, rng, bit_zero_only: bool = False
) -> YElement:
    """Involution modulo the identity test of the semidirect product."""
    for _ in range(64):
        base = (
            random_tilde_element(setup, setup.word_length, rng)
            if bit_zero_only
            else random_y_element(setup, setup.word_length, rng)
        )
        y = y_pow(base, eo.odd)
        if y_is_identity(y):
            continue
        for _ in range(eo.two_valuation + 1):
            y2 = y_mul(y, y)
            if y_is_identity(y2):
                return y
            y = y2
        raise RetryBudgetExceeded("odd-power element not of 2-power order")
    raise RetryBudgetExceeded("no involution found in the semidirect product")


def y_bray(setup: SetupPGL2Output, i: YElement, rng) -> YElement:
    """Bray centralizer element for an involution of the semidirect product."""
    E = setup.group.exponent_hint
    for _ in range(128):
        x = random_y_element(setup, setup.word_length, rng)
        c = y_mul(i, y_conj(i, x))
        m = y_order(c, E)
        if m % 2 == 1:
            k = (m - 1) // 2
            return y_mul(x, y_pow(c, k)) if k else x
    raise RetryBudgetExceeded("no odd-order commutator in the semidirect product")
