"""The black box group: opaque string handles over a hidden copy of SL2(p).

Internally an element is a 2x2 matrix over Z/pZ in a secret basis (the
standard generators are conjugated once, at construction, by a seed-derived
invertible matrix). A handle is the masked, authenticated serialization of
that matrix; the public surface is generators, multiply, invert, the identity
handle and string comparison. Nothing else leaves the box: algorithm code can
only combine handles, test equality of strings, and apply the central
equivalence below.

White-box decoding exists for tests and for the oracle-assisted searches, and
is gated on presenting the secret seed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import List, Tuple

from .errors import ForeignElementError, RetryBudgetExceeded
from .matrices import _pow, element_order
from .primefield import ExponentData
from .utils import derive_rng

RANDOM_WORD_LENGTH = 50
INVOLUTION_RETRIES = 64
BRAY_RETRIES = 128

IntMat = Tuple[int, int, int, int]


# --- integer 2x2 helpers (shared by the oracle internals and the
# white-box searches in the setup and toolbox layers) ---

def mat_mul(m: IntMat, n: IntMat, p: int) -> IntMat:
    a, b, c, d = m
    e, f, g, h = n
    return ((a * e + b * g) % p, (a * f + b * h) % p, (c * e + d * g) % p, (c * f + d * h) % p)


def mat_det(m: IntMat, p: int) -> int:
    return (m[0] * m[3] - m[1] * m[2]) % p


def mat_inv(m: IntMat, p: int) -> IntMat:
    det = mat_det(m, p)
    if det == 0:
        raise ZeroDivisionError("singular matrix")
    di = pow(det, p - 2, p)
    a, b, c, d = m
    return (d * di % p, -b * di % p, -c * di % p, a * di % p)


def mat_pow(m: IntMat, n: int, p: int) -> IntMat:
    r: IntMat = (1, 0, 0, 1)
    while n > 0:
        if n & 1:
            r = mat_mul(r, m, p)
        m = mat_mul(m, m, p)
        n >>= 1
    return r


def mat_conj(m: IntMat, by: IntMat, p: int) -> IntMat:
    return mat_mul(mat_mul(by, m, p), mat_inv(by, p), p)


def mat_scale(m: IntMat, s: int, p: int) -> IntMat:
    return tuple(x * s % p for x in m)  # type: ignore[return-value]


def mat_proj_eq(m: IntMat, n: IntMat, p: int) -> bool:
    for i in range(4):
        if m[i] % p:
            lam = n[i] * pow(m[i], p - 2, p) % p
            return lam != 0 and all((m[k] * lam - n[k]) % p == 0 for k in range(4))
        if n[i] % p:
            return False
    return False


def legendre(x: int, p: int) -> int:
    x %= p
    if x == 0:
        return 0
    return 1 if pow(x, (p - 1) // 2, p) == 1 else -1


def _label_stream(key: bytes, label: str, n: int) -> bytes:
    out = b""
    counter = 0
    while len(out) < n:
        out += hashlib.sha256(key + label.encode() + counter.to_bytes(4, "big")).digest()
        counter += 1
    return out[:n]


def mask_ints(G: "BBGroup", label: str, values) -> str:
    """Serialize oracle-private integers, masked under the group's key."""
    payload = b"".join(int(v).to_bytes(8, "big") for v in values)
    stream = _label_stream(G._mask_key, label, len(payload))
    return bytes(a ^ b for a, b in zip(payload, stream)).hex()


def unmask_ints(G: "BBGroup", label: str, text: str, count: int) -> List[int]:
    raw = bytes.fromhex(text)
    if len(raw) != 8 * count:
        raise ValueError("masked field has the wrong length")
    stream = _label_stream(G._mask_key, label, len(raw))
    payload = bytes(a ^ b for a, b in zip(raw, stream))
    return [int.from_bytes(payload[8 * i : 8 * (i + 1)], "big") for i in range(count)]


@dataclass(frozen=True)
class BBElement:
    """Opaque handle naming an element of a black box group."""

    handle: str

    def __repr__(self):
        return f"BB({self.handle[:12]}..)" if len(self.handle) > 16 else f"BB({self.handle})"


class WhiteBox:
    """Test-only window into a black box group, obtained via the secret seed."""

    def __init__(self, group: "BBGroup"):
        self._group = group

    @property
    def p(self) -> int:
        return self._group._p

    def decode(self, x: BBElement) -> IntMat:
        return self._group._decode(x)

    def encode(self, m: IntMat) -> BBElement:
        return self._group._encode(m)


class BBGroup:
    """A black box group encrypting SL2(p).

    Public surface: ``generators``, ``identity``, ``exponent_hint``,
    ``mul``, ``inv`` and handle string equality. Handles are stable across
    runs for equal (p, seed).
    """

    def __init__(self, p: int, secret_seed: int):
        self._p = p
        self._secret_seed = secret_seed
        key = hashlib.sha256(f"bbgroup/{p}/{secret_seed}".encode()).digest()
        self._mask_key = key
        self._width = (p.bit_length() + 7) // 8
        rng = derive_rng(secret_seed, f"bb-conjugator/{p}")
        while True:
            t = tuple(rng.randrange(p) for _ in range(4))
            if mat_det(t, p) != 0:
                break
        self._t = t
        gens_plain = [(1, 1, 0, 1), (0, 1, p - 1, 0)]
        g0 = 2
        while pow(g0, (p - 1) // 2, p) == 1 or g0 >= p:
            g0 += 1
        gens_plain.append((g0, 0, 0, pow(g0, p - 2, p)))
        self._gen_mats = [mat_conj(g, t, p) for g in gens_plain]
        self.generators: List[BBElement] = [self._encode(m) for m in self._gen_mats]
        self.identity: BBElement = self._encode((1, 0, 0, 1))
        import math

        self.exponent_hint: int = math.lcm(2 * p, p - 1, p + 1)
        self._cache: dict = {}

    # -- handle codec --

    def _encode(self, m: IntMat) -> BBElement:
        payload = b"".join(int(x % self._p).to_bytes(self._width, "big") for x in m)
        mac = hashlib.sha256(self._mask_key + b"|" + payload).digest()[:4]
        # per-element mask: xor of two handles reveals nothing about entries
        stream = _label_stream(self._mask_key, mac.hex(), len(payload))
        masked = bytes(a ^ b for a, b in zip(payload, stream))
        return BBElement((masked + mac).hex())

    def _decode(self, x: BBElement) -> IntMat:
        if not isinstance(x, BBElement):
            raise ForeignElementError(f"not a black box handle: {x!r}")
        cached = self._cache.get(x.handle)
        if cached is not None:
            return cached
        try:
            raw = bytes.fromhex(x.handle)
        except ValueError as exc:
            raise ForeignElementError("malformed handle") from exc
        if len(raw) != 4 * self._width + 4:
            raise ForeignElementError("handle has the wrong length for this group")
        masked, mac = raw[:-4], raw[-4:]
        stream = _label_stream(self._mask_key, mac.hex(), len(masked))
        payload = bytes(a ^ b for a, b in zip(masked, stream))
        if hashlib.sha256(self._mask_key + b"|" + payload).digest()[:4] != mac:
            raise ForeignElementError("handle was not issued by this group")
        w = self._width
        m = tuple(int.from_bytes(payload[i * w : (i + 1) * w], "big") for i in range(4))
        if mat_det(m, self._p) != 1:
            raise ForeignElementError("handle decodes outside the group")
        if len(self._cache) > 1 << 16:
            self._cache.clear()
        self._cache[x.handle] = m
        return m

    # -- oracle operations --

    def mul(self, x: BBElement, y: BBElement) -> BBElement:
        return self._encode(mat_mul(self._decode(x), self._decode(y), self._p))

    def inv(self, x: BBElement) -> BBElement:
        return self._encode(mat_inv(self._decode(x), self._p))

    def pow(self, x: BBElement, n: int) -> BBElement:
        if n == 0:
            return self.identity
        if n < 0:
            return self.pow(self.inv(x), -n)
        return _pow(x, n, self.mul)

    def open_box(self, secret_seed: int) -> WhiteBox:
        """White-box access; raises unless the construction seed is presented."""
        if secret_seed != self._secret_seed:
            raise PermissionError("wrong seed: the box stays shut")
        return WhiteBox(self)

    def __repr__(self):
        return f"BBGroup(p=?, gens={len(self.generators)})"


def make_blackbox_sl2(p, secret_seed: int) -> BBGroup:
    """Construct a black box group encrypting SL2(p).

    Accepts a PrimeModulus or a validated prime int. Two instances with
    different seeds produce mutually foreign handles.
    """
    pv = p if isinstance(p, int) else p.p
    return BBGroup(pv, secret_seed)


def bb_equiv(x: BBElement, y: BBElement, G: BBGroup) -> bool:
    """String equivalence modulo the center: x ~ y iff x*y^-1 is central.

    Centrality is decided by commuting with every generator; for SL2 the
    center is exactly what commutes with a generating set.
    """
    z = G.mul(x, G.inv(y))
    if z == G.identity:
        return True
    return all(G.mul(z, g) == G.mul(g, z) for g in G.generators)


def bb_is_central(z: BBElement, G: BBGroup) -> bool:
    return bb_equiv(z, G.identity, G)


def bb_random(G: BBGroup, rng) -> BBElement:
    """Fixed-length random word in the generators and their inverses."""
    letters = G.generators + [G.inv(g) for g in G.generators]
    acc = G.identity
    for _ in range(RANDOM_WORD_LENGTH):
        acc = G.mul(acc, rng.choice(letters))
    return acc


def bb_random_involution(
    G: BBGroup, eo: ExponentData, rng, retries: int = INVOLUTION_RETRIES
) -> BBElement:
    """An element that is an involution modulo the center and not central.

    Powers a random element by the odd part of the exponent, then squares
    through the 2-group until the next square is central.
    """
    for _ in range(retries):
        y = G.pow(bb_random(G, rng), eo.odd)
        if bb_is_central(y, G):
            continue
        for _ in range(eo.two_valuation + 1):
            y2 = G.mul(y, y)
            if bb_is_central(y2, G):
                return y
            y = y2
        raise RetryBudgetExceeded("element of non 2-power order after odd powering")
    raise RetryBudgetExceeded("no involution found; exponent data is wrong for this group")


def bray_centralizer_element(
    G: BBGroup, i: BBElement, rng, retries: int = BRAY_RETRIES
) -> BBElement:
    """Random element commuting with the involution i modulo the center.

    For random x set c = i * (x^-1 i x); when c has odd order m = 2k+1
    modulo the center, x * c^k centralizes i there. Even orders are retried.
    """
    E = G.exponent_hint
    for _ in range(retries):
        x = bb_random(G, rng)
        c = G.mul(i, G.mul(G.inv(x), G.mul(i, x)))
        m = element_order(c, E, G.mul, lambda z: bb_is_central(z, G))
        if m % 2 == 1:
            k = (m - 1) // 2
            return G.mul(x, G.pow(c, k)) if k else x
    raise RetryBudgetExceeded("no odd-order commutator found for the Bray construction")
