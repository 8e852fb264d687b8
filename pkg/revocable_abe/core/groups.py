"""
Asymmetric bilinear groups over BN254, backed by py_ecc.

Elements are wrapped per group so a G1 element can never be passed where a G2
element is expected; group operations use multiplicative notation
(`a * b`, `a / b`, `a ** k`).
"""
from __future__ import annotations

import functools
import hashlib
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from py_ecc import optimized_bn128 as bn

from .algebra import PrimeField, Scalar, default_rng
from .attributes import normalize_attribute
from .errors import ContextMismatch, InvalidComponent, MalformedInput

FQ = bn.FQ
FQ2 = bn.FQ2
FQ12 = bn.FQ12

FIELD_MODULUS: int = bn.field_modulus
CURVE_ORDER: int = bn.curve_order

# #E'(F_p^2) = n * (2p - n) for BN curves
G2_COFACTOR = 2 * FIELD_MODULUS - CURVE_ORDER

_FLAG_INFINITY = 0x80
_FLAG_SIGN = 0x40
_COORD_BYTES = 32

_HASH_TO_G2_DST = b"revocable-abe/hash-to-g2/v1/"


def _as_int(value) -> int:
    return value if isinstance(value, int) else int(value.n)


def _fq2_parts(value) -> tuple[int, int]:
    c0, c1 = value.coeffs
    return _as_int(c0), _as_int(c1)


def _fq_sqrt(a) -> Optional[FQ]:
    # p = 3 mod 4
    root = a ** ((FIELD_MODULUS + 1) // 4)
    return root if root * root == a else None


def _fq2_sqrt(a) -> Optional[FQ2]:
    """Square root in F_p^2 for p = 3 mod 4, or None if a is a non-residue."""
    if a == FQ2.zero():
        return FQ2.zero()
    minus_one = FQ2([FIELD_MODULUS - 1, 0])
    a1 = a ** ((FIELD_MODULUS - 3) // 4)
    alpha = a1 * a1 * a
    if (alpha ** FIELD_MODULUS) * alpha == minus_one:
        return None
    x0 = a1 * a
    if alpha == minus_one:
        root = FQ2([0, 1]) * x0
    else:
        root = ((alpha + FQ2.one()) ** ((FIELD_MODULUS - 1) // 2)) * x0
    return root if root * root == a else None


def _fq2_sign(value) -> int:
    c0, c1 = _fq2_parts(value)
    return (c0 & 1) if c0 != 0 else (c1 & 1)


class _CurveElement:
    """Shared arithmetic for points of G1 and G2."""

    __slots__ = ("point",)
    group_name = ""

    def __init__(self, point):
        self.point = point

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise ContextMismatch(
                f"cannot combine {self.group_name} with {getattr(other, 'group_name', type(other).__name__)}"
            )

    def __mul__(self, other):
        self._check(other)
        return type(self)(bn.add(self.point, other.point))

    def __truediv__(self, other):
        self._check(other)
        return type(self)(bn.add(self.point, bn.neg(other.point)))

    def __pow__(self, exponent: int):
        return type(self)(bn.multiply(self.point, exponent % CURVE_ORDER))

    def __neg__(self):
        # group inverse, written additively by py_ecc
        return type(self)(bn.neg(self.point))

    def inverse(self):
        return -self

    def is_identity(self) -> bool:
        return bn.is_inf(self.point)

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        if self.is_identity() or other.is_identity():
            return self.is_identity() and other.is_identity()
        return bn.eq(self.point, other.point)

    def __hash__(self) -> int:
        if self.is_identity():
            return hash((self.group_name, None))
        return hash((self.group_name, bn.normalize(self.point)))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(...)"


class G1Element(_CurveElement):
    """Point of G1 (curve over F_p)."""
    __slots__ = ()
    group_name = "G1"


class G2Element(_CurveElement):
    """Point of G2 (sextic twist over F_p^2)."""
    __slots__ = ()
    group_name = "G2"


class GTElement:
    """Element of the order-n subgroup of F_p^12^*."""

    __slots__ = ("value",)
    group_name = "GT"

    def __init__(self, value):
        self.value = value

    def _check(self, other) -> None:
        if not isinstance(other, GTElement):
            raise ContextMismatch(f"cannot combine GT with {type(other).__name__}")

    def __mul__(self, other: GTElement) -> GTElement:
        self._check(other)
        return GTElement(self.value * other.value)

    def __truediv__(self, other: GTElement) -> GTElement:
        self._check(other)
        return GTElement(self.value / other.value)

    def __pow__(self, exponent: int) -> GTElement:
        return GTElement(self.value ** (exponent % CURVE_ORDER))

    def is_identity(self) -> bool:
        return self.value == FQ12.one()

    def __eq__(self, other) -> bool:
        if not isinstance(other, GTElement):
            return NotImplemented
        return self.value == other.value

    def __hash__(self) -> int:
        return hash(tuple(_as_int(c) for c in self.value.coeffs))

    def __repr__(self) -> str:
        return "GTElement(...)"


@dataclass(frozen=True)
class PairingDescriptor:
    """Curve identity and canonical encoding widths (bytes, before length prefix)."""
    curve: str
    security_bits: int
    g1_bytes: int
    g2_bytes: int
    gt_bytes: int
    zp_bytes: int


BN254_DESCRIPTOR = PairingDescriptor(
    curve="bn254",
    security_bits=100,
    g1_bytes=_COORD_BYTES,
    g2_bytes=2 * _COORD_BYTES,
    gt_bytes=12 * _COORD_BYTES,
    zp_bytes=_COORD_BYTES,
)


@functools.lru_cache(maxsize=4096)
def _hash_to_g2_point(name: str):
    data = name.encode("utf-8")
    for counter in range(256):
        digest = hashlib.sha512(_HASH_TO_G2_DST + bytes([counter]) + data).digest()
        x = FQ2([
            int.from_bytes(digest[:32], "big") % FIELD_MODULUS,
            int.from_bytes(digest[32:], "big") % FIELD_MODULUS,
        ])
        y = _fq2_sqrt(x ** 3 + bn.b2)
        if y is None:
            continue
        sign = hashlib.sha256(digest).digest()[0] & 1
        if _fq2_sign(y) != sign:
            y = -y
        point = bn.multiply((x, y, FQ2.one()), G2_COFACTOR)
        if not bn.is_inf(point):
            return point
    raise RuntimeError(f"hash_to_g2 exhausted its counter for {name!r}")


class BilinearContext:
    """
    The pairing e: G1 x G2 -> GT with generators, group order and encodings.

    No map between G1 and G2 is exposed, so a ciphertext component cannot
    be substituted for a key component of the other group.
    """

    def __init__(self, descriptor: PairingDescriptor = BN254_DESCRIPTOR):
        self.descriptor = descriptor
        self.field = PrimeField(CURVE_ORDER)
        self.g1 = G1Element(bn.G1)
        self.g2 = G2Element(bn.G2)

    @property
    def name(self) -> str:
        return self.descriptor.curve

    @property
    def order(self) -> int:
        return self.field.modulus

    @functools.cached_property
    def gt_generator(self) -> GTElement:
        """e(g1, g2)."""
        return self.pairing(self.g1, self.g2)

    @property
    def gt_identity(self) -> GTElement:
        return GTElement(FQ12.one())

    def random_scalar(self, rng: Optional[random.Random] = None) -> Scalar:
        return self.field.random_scalar(rng)

    def random_gt(self, rng: Optional[random.Random] = None) -> GTElement:
        """Uniform GT element, used as the hybrid container's key seed."""
        return self.gt_generator ** self.random_scalar(rng or default_rng())

    # Pairing

    def pairing(self, a: G1Element, b: G2Element) -> GTElement:
        """e(a, b) for a in G1 and b in G2."""
        if not isinstance(a, G1Element) or not isinstance(b, G2Element):
            raise ContextMismatch("pairing expects (G1Element, G2Element)")
        if a.is_identity() or b.is_identity():
            return self.gt_identity
        return GTElement(bn.pairing(b.point, a.point))

    def pairing_product(self, pairs: Iterable[tuple[G1Element, G2Element]]) -> GTElement:
        """
        Product of e(a_i, b_i) with a single final exponentiation.

        Args:
            pairs: (G1, G2) element pairs

        Returns:
            prod_i e(a_i, b_i)
        """
        acc = FQ12.one()
        for a, b in pairs:
            if not isinstance(a, G1Element) or not isinstance(b, G2Element):
                raise ContextMismatch("pairing expects (G1Element, G2Element)")
            if a.is_identity() or b.is_identity():
                continue
            acc = acc * bn.pairing(b.point, a.point, final_exponentiate=False)
        return GTElement(bn.final_exponentiate(acc))

    def hash_to_g2(self, attribute: str) -> G2Element:
        """Deterministic hash of a normalized attribute name into G2."""
        return G2Element(_hash_to_g2_point(normalize_attribute(attribute)))

    # Canonical encodings

    def encode_scalar(self, value: int) -> bytes:
        return self.field.to_bytes(value)

    def decode_scalar(self, data: bytes) -> Scalar:
        if len(data) != self.descriptor.zp_bytes:
            raise MalformedInput(f"scalar must be {self.descriptor.zp_bytes} bytes")
        value = self.field.from_bytes(data)
        if value >= self.order:
            raise InvalidComponent("scalar is not reduced modulo the group order")
        return value

    def encode_g1(self, element: G1Element) -> bytes:
        if not isinstance(element, G1Element):
            raise ContextMismatch("expected a G1 element")
        if element.is_identity():
            return bytes([_FLAG_INFINITY]) + bytes(_COORD_BYTES - 1)
        x, y = bn.normalize(element.point)
        out = bytearray(_as_int(x).to_bytes(_COORD_BYTES, "big"))
        if _as_int(y) & 1:
            out[0] |= _FLAG_SIGN
        return bytes(out)

    def decode_g1(self, data: bytes) -> G1Element:
        if len(data) != self.descriptor.g1_bytes:
            raise MalformedInput(f"G1 element must be {self.descriptor.g1_bytes} bytes")
        flags = data[0] & (_FLAG_INFINITY | _FLAG_SIGN)
        if flags & _FLAG_INFINITY:
            if data != bytes([_FLAG_INFINITY]) + bytes(_COORD_BYTES - 1):
                raise InvalidComponent("non-canonical G1 identity encoding")
            return G1Element(bn.Z1)
        x_int = int.from_bytes(bytes([data[0] & 0x3F]) + data[1:], "big")
        if x_int >= FIELD_MODULUS:
            raise InvalidComponent("G1 x-coordinate out of range")
        x = FQ(x_int)
        y = _fq_sqrt(x ** 3 + bn.b)
        if y is None:
            raise InvalidComponent("G1 x-coordinate is not on the curve")
        if (_as_int(y) & 1) != bool(flags & _FLAG_SIGN):
            y = -y
        return G1Element((x, y, FQ.one()))

    def encode_g2(self, element: G2Element) -> bytes:
        if not isinstance(element, G2Element):
            raise ContextMismatch("expected a G2 element")
        if element.is_identity():
            return bytes([_FLAG_INFINITY]) + bytes(2 * _COORD_BYTES - 1)
        x, y = bn.normalize(element.point)
        x0, x1 = _fq2_parts(x)
        out = bytearray(x0.to_bytes(_COORD_BYTES, "big") + x1.to_bytes(_COORD_BYTES, "big"))
        if _fq2_sign(y):
            out[0] |= _FLAG_SIGN
        return bytes(out)

    def decode_g2(self, data: bytes) -> G2Element:
        if len(data) != self.descriptor.g2_bytes:
            raise MalformedInput(f"G2 element must be {self.descriptor.g2_bytes} bytes")
        flags = data[0] & (_FLAG_INFINITY | _FLAG_SIGN)
        if flags & _FLAG_INFINITY:
            if data != bytes([_FLAG_INFINITY]) + bytes(2 * _COORD_BYTES - 1):
                raise InvalidComponent("non-canonical G2 identity encoding")
            return G2Element(bn.Z2)
        x0 = int.from_bytes(bytes([data[0] & 0x3F]) + data[1:_COORD_BYTES], "big")
        x1 = int.from_bytes(data[_COORD_BYTES:], "big")
        if x0 >= FIELD_MODULUS or x1 >= FIELD_MODULUS:
            raise InvalidComponent("G2 x-coordinate out of range")
        x = FQ2([x0, x1])
        y = _fq2_sqrt(x ** 3 + bn.b2)
        if y is None:
            raise InvalidComponent("G2 x-coordinate is not on the twist")
        if _fq2_sign(y) != bool(flags & _FLAG_SIGN):
            y = -y
        point = (x, y, FQ2.one())
        if not bn.is_inf(bn.multiply(point, CURVE_ORDER)):
            raise InvalidComponent("G2 point is outside the prime-order subgroup")
        return G2Element(point)

    def encode_gt(self, element: GTElement) -> bytes:
        if not isinstance(element, GTElement):
            raise ContextMismatch("expected a GT element")
        return b"".join(_as_int(c).to_bytes(_COORD_BYTES, "big") for c in element.value.coeffs)

    def decode_gt(self, data: bytes) -> GTElement:
        if len(data) != self.descriptor.gt_bytes:
            raise MalformedInput(f"GT element must be {self.descriptor.gt_bytes} bytes")
        coeffs = [
            int.from_bytes(data[i:i + _COORD_BYTES], "big")
            for i in range(0, len(data), _COORD_BYTES)
        ]
        if any(c >= FIELD_MODULUS for c in coeffs):
            raise InvalidComponent("GT coefficient out of range")
        value = FQ12(coeffs)
        if value ** CURVE_ORDER != FQ12.one():
            raise InvalidComponent("GT element is outside the order-n subgroup")
        return GTElement(value)


@functools.lru_cache(maxsize=1)
def get_context() -> BilinearContext:
    """The process-wide pairing context."""
    return BilinearContext()
