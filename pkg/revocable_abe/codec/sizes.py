"""
Closed-form serialized sizes, in terms of the context's element widths.

Every formula counts the wire header, the 2-byte length prefixes and the
4-byte counts exactly, so measured sizes equal predictions byte for byte.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from ..core.groups import BilinearContext, get_context
from .wire import HEADER_SIZE, INT_SIZE, NONCE_SIZE, PREFIX_SIZE


def name_bytes(names: Iterable[str]) -> int:
    """Total UTF-8 length of attribute names (the `a` term)."""
    return sum(len(n.encode("utf-8")) for n in names)


@dataclass(frozen=True)
class SizeModel:
    """Element widths |G1|, |G2|, |GT|, |Zp| in bytes, before length prefixes."""
    g1: int
    g2: int
    gt: int
    zp: int

    @classmethod
    def from_context(cls, ctx: Optional[BilinearContext] = None) -> SizeModel:
        d = (ctx or get_context()).descriptor
        return cls(g1=d.g1_bytes, g2=d.g2_bytes, gt=d.gt_bytes, zp=d.zp_bytes)

    @classmethod
    def mnt159(cls) -> SizeModel:
        """Widths of the 159-bit MNT curve, for comparing shapes only."""
        return cls(g1=44, g2=124, gt=124, zp=24)

    # Prefixed field widths
    @property
    def g1_field(self) -> int:
        return self.g1 + PREFIX_SIZE

    @property
    def g2_field(self) -> int:
        return self.g2 + PREFIX_SIZE

    @property
    def gt_field(self) -> int:
        return self.gt + PREFIX_SIZE

    @property
    def zp_field(self) -> int:
        return self.zp + PREFIX_SIZE

    # Slopes
    @property
    def bsw_key_slope(self) -> int:
        """Per-attribute bytes of a baseline key, excluding the name itself."""
        return PREFIX_SIZE + self.g2_field + self.g1_field

    @property
    def key_slope(self) -> int:
        """Per-attribute bytes of a revocable key: one more G1 field than the baseline."""
        return PREFIX_SIZE + self.g2_field + 2 * self.g1_field

    @property
    def leaf_slope(self) -> int:
        """Per-leaf ciphertext bytes: components plus the tree node, excluding the name."""
        return self.g1_field + self.g2_field + 2 * INT_SIZE + PREFIX_SIZE

    @property
    def proxy_key_slope(self) -> int:
        """Per-share bytes; a share carries both coordinates."""
        return 2 * self.zp_field

    @property
    def conversion_slope(self) -> int:
        """Per-leaf bytes of a conversion request or response: leaf id and one G2 field."""
        return INT_SIZE + self.g2_field

    # Component sizes

    def public_key(self) -> int:
        return HEADER_SIZE + self.g1_field + self.gt_field + self.g2_field

    def bsw_secret_key(self, n: int, a: int) -> int:
        return HEADER_SIZE + self.g2_field + INT_SIZE + n * self.bsw_key_slope + a

    def secret_key(self, n: int, a: int) -> int:
        return HEADER_SIZE + self.zp_field + self.g2_field + INT_SIZE + n * self.key_slope + a

    def delegated_single(self, n: int, a: int) -> int:
        return (HEADER_SIZE + self.zp_field + INT_SIZE + self.g2_field + INT_SIZE
                + n * self.key_slope + a)

    def delegated_multi(self, n: int, a: int) -> int:
        return (HEADER_SIZE + 2 * self.zp_field + self.g2_field + INT_SIZE
                + n * (self.key_slope + self.g1_field) + a)

    def ciphertext(self, leaves: int, internal: int, a: int) -> int:
        """Tree (8 bytes per node, prefixed names) plus C~, C and per-leaf components."""
        return (HEADER_SIZE + 2 * INT_SIZE * internal + self.gt_field + self.g1_field + INT_SIZE
                + leaves * self.leaf_slope + a)

    def hybrid_container(self, leaves: int, internal: int, a: int, payload: int) -> int:
        """AES-GCM adds a 16-byte tag to the payload."""
        return (HEADER_SIZE + INT_SIZE + self.ciphertext(leaves, internal, a)
                + PREFIX_SIZE + NONCE_SIZE + INT_SIZE + payload + 16)

    def proxy_key(self, t: int) -> int:
        return HEADER_SIZE + 2 * INT_SIZE + t * self.proxy_key_slope

    def attr_proxy_key(self, t: int, attributes: int, a: int) -> int:
        per_attribute = PREFIX_SIZE + INT_SIZE + t * self.proxy_key_slope
        return HEADER_SIZE + 2 * INT_SIZE + attributes * per_attribute + a

    def conversion_request(self, leaves: int) -> int:
        return HEADER_SIZE + 1 + self.zp_field + INT_SIZE + leaves * self.conversion_slope

    def conversion_response(self, leaves: int) -> int:
        return HEADER_SIZE + INT_SIZE + self.zp_field + INT_SIZE + leaves * self.conversion_slope
