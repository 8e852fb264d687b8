"""
Binary wire format for every key, ciphertext and proxy artifact.

Layout: magic b"PIR1", one tag byte, one format-version byte, then the body.
Group elements, scalars and strings carry a 2-byte big-endian length prefix;
counts and integers are 4-byte big-endian. Access trees are written preorder,
each node as threshold and child count, leaves followed by their attribute.
"""
from __future__ import annotations

import logging
import struct
from enum import IntEnum
from pathlib import Path
from typing import Any, Callable, Optional, Union

from ..core.algebra import Polynomial, Scalar, Share
from ..core.errors import AbeError, InvalidComponent, MalformedInput
from ..core.groups import BilinearContext, G1Element, G2Element, GTElement, get_context
from ..core.models import (
    AttrConversionBundle,
    AttributeKey,
    AttrMasterKey,
    AttrProxyKey,
    BswAttributeKey,
    BswMasterKey,
    BswSecretKey,
    Ciphertext,
    CiphertextLeaf,
    ConversionBundle,
    ConversionRequest,
    DelegatedKeyMulti,
    DelegatedKeySingle,
    HybridContainer,
    MasterKey,
    MultiAttributeKey,
    ProxyKey,
    PublicKey,
    RequestLeaf,
    RevocationList,
    RevocationMode,
    SecretKey,
    UserRegistry,
)
from ..core.policy import AccessNode, AccessTree

logger = logging.getLogger(__name__)

MAGIC = b"PIR1"
FORMAT_VERSION = 1
HEADER_SIZE = len(MAGIC) + 2
PREFIX_SIZE = 2
INT_SIZE = 4
NONCE_SIZE = 12
DIGEST_SIZE = 32

_MAX_TREE_DEPTH = 64


class ComponentTag(IntEnum):
    """Tag byte identifying the encoded type."""
    PK = 1
    MK = 2
    SK = 3
    CT = 4
    PXK = 5
    BUNDLE_REQUEST = 6
    BUNDLE_RESPONSE = 7
    DELEGATED_SINGLE = 8
    DELEGATED_MULTI = 9
    HYBRID_CONTAINER = 10
    BSW_MK = 11
    BSW_SK = 12
    ATTR_MK = 13
    ATTR_PXK = 14
    ATTR_BUNDLE = 15


# File extensions used by the CLI, keyed by tag
EXTENSIONS = {
    ComponentTag.PK: ".pk",
    ComponentTag.MK: ".mk",
    ComponentTag.ATTR_MK: ".mk",
    ComponentTag.SK: ".sk",
    ComponentTag.CT: ".ct",
    ComponentTag.PXK: ".pxk",
    ComponentTag.ATTR_PXK: ".pxk",
    ComponentTag.HYBRID_CONTAINER: ".ct",
}


class Writer:
    """Accumulates a body in the canonical layout."""

    def __init__(self, ctx: BilinearContext):
        self.ctx = ctx
        self._parts: list[bytes] = []

    def raw(self, data: bytes) -> None:
        self._parts.append(data)

    def u8(self, value: int) -> None:
        self._parts.append(struct.pack(">B", value))

    def u32(self, value: int) -> None:
        self._parts.append(struct.pack(">I", value))

    def prefixed(self, data: bytes) -> None:
        if len(data) > 0xFFFF:
            raise InvalidComponent("length-prefixed field longer than 65535 bytes")
        self._parts.append(struct.pack(">H", len(data)) + data)

    def blob(self, data: bytes) -> None:
        self.u32(len(data))
        self._parts.append(data)

    def string(self, value: str) -> None:
        self.prefixed(value.encode("utf-8"))

    def scalar(self, value: Scalar) -> None:
        self.prefixed(self.ctx.encode_scalar(value))

    def g1(self, element: G1Element) -> None:
        self.prefixed(self.ctx.encode_g1(element))

    def g2(self, element: G2Element) -> None:
        self.prefixed(self.ctx.encode_g2(element))

    def gt(self, element: GTElement) -> None:
        self.prefixed(self.ctx.encode_gt(element))

    def share(self, share: Share) -> None:
        self.scalar(share.x)
        self.scalar(share.y)

    def tree(self, tree: AccessTree) -> None:
        def node(n: AccessNode) -> None:
            self.u32(n.threshold)
            self.u32(len(n.children))
            if n.is_leaf:
                self.string(n.attribute)
            for child in n.children:
                node(child)
        node(tree.root)

    def getvalue(self) -> bytes:
        return b"".join(self._parts)


class Reader:
    """Consumes a body; every short read is MalformedInput."""

    def __init__(self, ctx: BilinearContext, data: bytes):
        self.ctx = ctx
        self.data = data
        self.offset = 0

    def take(self, size: int) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise MalformedInput(
                f"truncated input: need {size} bytes at offset {self.offset}, "
                f"have {len(self.data) - self.offset}"
            )
        chunk = self.data[self.offset:end]
        self.offset = end
        return chunk

    def u8(self) -> int:
        return struct.unpack(">B", self.take(1))[0]

    def u32(self) -> int:
        return struct.unpack(">I", self.take(INT_SIZE))[0]

    def count(self, min_item_size: int) -> int:
        n = self.u32()
        if n * min_item_size > len(self.data) - self.offset:
            raise MalformedInput(f"count {n} exceeds the remaining input")
        return n

    def prefixed(self, expected: Optional[int] = None) -> bytes:
        size = struct.unpack(">H", self.take(PREFIX_SIZE))[0]
        if expected is not None and size != expected:
            raise MalformedInput(f"field length {size}, expected {expected}")
        return self.take(size)

    def blob(self) -> bytes:
        return self.take(self.u32())

    def string(self) -> str:
        try:
            return self.prefixed().decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedInput("string is not valid UTF-8") from exc

    def scalar(self) -> Scalar:
        return self.ctx.decode_scalar(self.prefixed(self.ctx.descriptor.zp_bytes))

    def nonzero_scalar(self) -> Scalar:
        value = self.scalar()
        if value == 0:
            raise InvalidComponent("identity scalar is zero")
        return value

    def g1(self) -> G1Element:
        return self.ctx.decode_g1(self.prefixed(self.ctx.descriptor.g1_bytes))

    def g2(self) -> G2Element:
        return self.ctx.decode_g2(self.prefixed(self.ctx.descriptor.g2_bytes))

    def gt(self) -> GTElement:
        return self.ctx.decode_gt(self.prefixed(self.ctx.descriptor.gt_bytes))

    def share(self) -> Share:
        x = self.nonzero_scalar()
        return Share(x, self.scalar())

    def tree(self) -> AccessTree:
        def node(depth: int) -> AccessNode:
            if depth > _MAX_TREE_DEPTH:
                raise InvalidComponent("access tree nested too deeply")
            threshold = self.u32()
            n_children = self.count(2 * INT_SIZE)
            if n_children == 0:
                return AccessNode(threshold=threshold, attribute=self.string())
            children = tuple(node(depth + 1) for _ in range(n_children))
            return AccessNode(threshold=threshold, children=children)
        return AccessTree(node(0))

    def done(self) -> None:
        if self.offset != len(self.data):
            raise MalformedInput(f"{len(self.data) - self.offset} trailing bytes")


# Per-type body codecs

def _enc_pk(w: Writer, pk: PublicKey) -> None:
    w.g1(pk.h)
    w.gt(pk.egg_alpha)
    w.g2(pk.f)


def _dec_pk(r: Reader) -> PublicKey:
    return PublicKey(h=r.g1(), egg_alpha=r.gt(), f=r.g2())


def _enc_registry(w: Writer, state) -> None:
    items = state.registry.items()
    w.u32(len(items))
    for name, identity in items:
        w.string(name)
        w.scalar(identity)
    digests = sorted(state.dummy_digests)
    w.u32(len(digests))
    for digest in digests:
        w.prefixed(digest)


def _dec_registry(r: Reader) -> tuple[UserRegistry, set[bytes]]:
    registry = UserRegistry()
    for _ in range(r.count(PREFIX_SIZE)):
        name = r.string()
        registry.register(name, r.nonzero_scalar())
    digests = {r.prefixed(DIGEST_SIZE) for _ in range(r.count(PREFIX_SIZE))}
    return registry, digests


def _enc_identities(w: Writer, identities) -> None:
    identities = tuple(identities)
    w.u32(len(identities))
    for identity in identities:
        w.scalar(identity)


def _dec_identities(r: Reader) -> RevocationList:
    return RevocationList(tuple(r.nonzero_scalar() for _ in range(r.count(PREFIX_SIZE))))


def _enc_polynomial(w: Writer, poly: Polynomial) -> None:
    w.u32(poly.degree)
    for coeff in poly.coefficients:
        w.scalar(coeff)


def _dec_polynomial(r: Reader) -> Polynomial:
    degree = r.count(PREFIX_SIZE)
    coefficients = tuple(r.scalar() for _ in range(degree + 1))
    return Polynomial(coefficients, r.ctx.field)


def _enc_mk(w: Writer, mk: MasterKey) -> None:
    with mk.lock:
        w.scalar(mk.beta)
        w.g2(mk.g2_alpha)
        _enc_polynomial(w, mk.polynomial)
        _enc_registry(w, mk)
        _enc_identities(w, mk.revocation_state)
        w.u32(mk.proxy_version)


def _dec_mk(r: Reader) -> MasterKey:
    beta = r.nonzero_scalar()
    g2_alpha = r.g2()
    polynomial = _dec_polynomial(r)
    if polynomial.degree < 1:
        raise InvalidComponent("master polynomial degree below 1")
    registry, digests = _dec_registry(r)
    revoked = _dec_identities(r)
    return MasterKey(
        beta=beta,
        g2_alpha=g2_alpha,
        polynomial=polynomial,
        registry=registry,
        dummy_digests=digests,
        revocation_state=revoked,
        proxy_version=r.u32(),
    )


def _enc_attr_mk(w: Writer, mk: AttrMasterKey) -> None:
    with mk.lock:
        w.scalar(mk.beta)
        w.g2(mk.g2_alpha)
        w.u32(mk.t)
        w.u32(len(mk.polynomials))
        for attribute, poly in sorted(mk.polynomials.items()):
            w.string(attribute)
            _enc_polynomial(w, poly)
        _enc_registry(w, mk)
        w.u32(len(mk.revocations))
        for attribute, revoked in sorted(mk.revocations.items()):
            w.string(attribute)
            _enc_identities(w, revoked)
        w.u32(mk.proxy_version)


def _dec_attr_mk(r: Reader) -> AttrMasterKey:
    beta = r.nonzero_scalar()
    g2_alpha = r.g2()
    t = r.u32()
    if t < 1:
        raise InvalidComponent("degree below 1")
    polynomials = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        poly = _dec_polynomial(r)
        if poly.degree != t:
            raise InvalidComponent(f"polynomial for {attribute!r} has degree {poly.degree}, expected {t}")
        polynomials[attribute] = poly
    registry, digests = _dec_registry(r)
    revocations = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        revocations[attribute] = _dec_identities(r)
    return AttrMasterKey(
        beta=beta,
        g2_alpha=g2_alpha,
        t=t,
        polynomials=polynomials,
        revocations=revocations,
        registry=registry,
        dummy_digests=digests,
        proxy_version=r.u32(),
    )


def _enc_bsw_mk(w: Writer, mk: BswMasterKey) -> None:
    w.scalar(mk.beta)
    w.g2(mk.g2_alpha)


def _dec_bsw_mk(r: Reader) -> BswMasterKey:
    return BswMasterKey(beta=r.nonzero_scalar(), g2_alpha=r.g2())


def _enc_bsw_sk(w: Writer, sk: BswSecretKey) -> None:
    w.g2(sk.d)
    w.u32(len(sk.components))
    for attribute, key in sorted(sk.components.items()):
        w.string(attribute)
        w.g2(key.d)
        w.g1(key.d_prime)


def _dec_bsw_sk(r: Reader) -> BswSecretKey:
    d = r.g2()
    components = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        components[attribute] = BswAttributeKey(d=r.g2(), d_prime=r.g1())
    return BswSecretKey(d=d, components=components)


def _enc_attribute_keys(w: Writer, components) -> None:
    w.u32(len(components))
    for attribute, key in sorted(components.items()):
        w.string(attribute)
        w.g2(key.d)
        w.g1(key.d_prime)
        w.g1(key.d_dprime)


def _dec_attribute_keys(r: Reader) -> dict[str, AttributeKey]:
    components = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        components[attribute] = AttributeKey(d=r.g2(), d_prime=r.g1(), d_dprime=r.g1())
    return components


def _enc_sk(w: Writer, sk: SecretKey) -> None:
    w.scalar(sk.user_id)
    w.g2(sk.d)
    _enc_attribute_keys(w, sk.components)


def _dec_sk(r: Reader) -> SecretKey:
    user_id = r.nonzero_scalar()
    d = r.g2()
    return SecretKey(user_id=user_id, d=d, components=_dec_attribute_keys(r))


def _enc_ct(w: Writer, ct: Ciphertext) -> None:
    w.tree(ct.tree)
    w.gt(ct.c_tilde)
    w.g1(ct.c)
    w.u32(len(ct.leaves))
    for leaf in ct.leaves:
        w.g1(leaf.c)
        w.g2(leaf.c_prime)


def _dec_ct(r: Reader) -> Ciphertext:
    tree = r.tree()
    c_tilde = r.gt()
    c = r.g1()
    leaves = tuple(CiphertextLeaf(c=r.g1(), c_prime=r.g2()) for _ in range(r.count(2 * PREFIX_SIZE)))
    return Ciphertext(tree=tree, c_tilde=c_tilde, c=c, leaves=leaves)


def _enc_shares(w: Writer, shares) -> None:
    w.u32(len(shares))
    for share in shares:
        w.share(share)


def _dec_shares(r: Reader) -> tuple[Share, ...]:
    return tuple(r.share() for _ in range(r.count(2 * PREFIX_SIZE)))


def _enc_pxk(w: Writer, pxk: ProxyKey) -> None:
    w.u32(pxk.version)
    _enc_shares(w, pxk.shares)


def _dec_pxk(r: Reader) -> ProxyKey:
    return ProxyKey(version=r.u32(), shares=_dec_shares(r))


def _enc_attr_pxk(w: Writer, pxk: AttrProxyKey) -> None:
    w.u32(pxk.version)
    w.u32(len(pxk.shares))
    for attribute, shares in sorted(pxk.shares.items()):
        w.string(attribute)
        _enc_shares(w, shares)


def _dec_attr_pxk(r: Reader) -> AttrProxyKey:
    version = r.u32()
    shares = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        shares[attribute] = _dec_shares(r)
    return AttrProxyKey(version=version, shares=shares)


_MODE_BYTES = {RevocationMode.KEY: 0, RevocationMode.ATTR: 1}


def _enc_request(w: Writer, request: ConversionRequest) -> None:
    w.u8(_MODE_BYTES[request.mode])
    w.scalar(request.user_id)
    w.u32(len(request.leaves))
    for leaf in request.leaves:
        w.u32(leaf.leaf_id)
        if request.mode is RevocationMode.ATTR:
            w.string(leaf.attribute)
        w.g2(leaf.c_prime)


def _dec_request(r: Reader) -> ConversionRequest:
    mode_byte = r.u8()
    modes = {v: k for k, v in _MODE_BYTES.items()}
    if mode_byte not in modes:
        raise MalformedInput(f"unknown request mode {mode_byte}")
    mode = modes[mode_byte]
    user_id = r.nonzero_scalar()
    leaves = []
    for _ in range(r.count(INT_SIZE + PREFIX_SIZE)):
        leaf_id = r.u32()
        attribute = r.string() if mode is RevocationMode.ATTR else None
        leaves.append(RequestLeaf(leaf_id=leaf_id, c_prime=r.g2(), attribute=attribute))
    return ConversionRequest(mode=mode, user_id=user_id, leaves=tuple(leaves))


def _enc_bundle(w: Writer, bundle: ConversionBundle) -> None:
    w.u32(bundle.version)
    w.scalar(bundle.lambda_k)
    w.u32(len(bundle.converted))
    for leaf_id, component in sorted(bundle.converted.items()):
        w.u32(leaf_id)
        w.g2(component)


def _dec_bundle(r: Reader) -> ConversionBundle:
    version = r.u32()
    lambda_k = r.scalar()
    converted = {}
    for _ in range(r.count(INT_SIZE + PREFIX_SIZE)):
        leaf_id = r.u32()
        converted[leaf_id] = r.g2()
    return ConversionBundle(version=version, lambda_k=lambda_k, converted=converted)


def _enc_attr_bundle(w: Writer, bundle: AttrConversionBundle) -> None:
    w.u32(bundle.version)
    w.u32(len(bundle.converted))
    for leaf_id, component in sorted(bundle.converted.items()):
        w.u32(leaf_id)
        w.scalar(bundle.lambdas[leaf_id])
        w.g2(component)
    w.u32(len(bundle.revoked_leaves))
    for leaf_id in sorted(bundle.revoked_leaves):
        w.u32(leaf_id)


def _dec_attr_bundle(r: Reader) -> AttrConversionBundle:
    version = r.u32()
    converted, lambdas = {}, {}
    for _ in range(r.count(INT_SIZE + 2 * PREFIX_SIZE)):
        leaf_id = r.u32()
        lambdas[leaf_id] = r.scalar()
        converted[leaf_id] = r.g2()
    revoked = frozenset(r.u32() for _ in range(r.count(INT_SIZE)))
    return AttrConversionBundle(
        version=version, converted=converted, lambdas=lambdas, revoked_leaves=revoked
    )


def _enc_delegated_single(w: Writer, dk: DelegatedKeySingle) -> None:
    w.scalar(dk.user_id)
    w.u32(dk.lambda_version)
    w.g2(dk.d)
    _enc_attribute_keys(w, dk.components)


def _dec_delegated_single(r: Reader) -> DelegatedKeySingle:
    user_id = r.nonzero_scalar()
    lambda_version = r.u32()
    d = r.g2()
    return DelegatedKeySingle(
        user_id=user_id, lambda_version=lambda_version, d=d, components=_dec_attribute_keys(r)
    )


def _enc_delegated_multi(w: Writer, dk: DelegatedKeyMulti) -> None:
    w.scalar(dk.delegator_id)
    w.scalar(dk.user_id)
    w.g2(dk.d)
    w.u32(len(dk.components))
    for attribute, key in sorted(dk.components.items()):
        w.string(attribute)
        w.g2(key.d)
        w.g1(key.d_prime)
        w.g1(key.d_dprime)
        w.g1(key.d_tprime)


def _dec_delegated_multi(r: Reader) -> DelegatedKeyMulti:
    delegator_id = r.nonzero_scalar()
    user_id = r.nonzero_scalar()
    d = r.g2()
    components = {}
    for _ in range(r.count(PREFIX_SIZE)):
        attribute = r.string()
        components[attribute] = MultiAttributeKey(
            d=r.g2(), d_prime=r.g1(), d_dprime=r.g1(), d_tprime=r.g1()
        )
    return DelegatedKeyMulti(delegator_id=delegator_id, user_id=user_id, d=d, components=components)


def _enc_hybrid(w: Writer, container: HybridContainer) -> None:
    w.blob(encode(container.ciphertext, w.ctx))
    w.prefixed(container.nonce)
    w.blob(container.sealed)


def _dec_hybrid(r: Reader) -> HybridContainer:
    ciphertext = decode(r.blob(), ComponentTag.CT, r.ctx)
    nonce = r.prefixed(NONCE_SIZE)
    return HybridContainer(ciphertext=ciphertext, nonce=nonce, sealed=r.blob())


_CODECS: dict[ComponentTag, tuple[type, Callable[[Writer, Any], None], Callable[[Reader], Any]]] = {
    ComponentTag.PK: (PublicKey, _enc_pk, _dec_pk),
    ComponentTag.MK: (MasterKey, _enc_mk, _dec_mk),
    ComponentTag.SK: (SecretKey, _enc_sk, _dec_sk),
    ComponentTag.CT: (Ciphertext, _enc_ct, _dec_ct),
    ComponentTag.PXK: (ProxyKey, _enc_pxk, _dec_pxk),
    ComponentTag.BUNDLE_REQUEST: (ConversionRequest, _enc_request, _dec_request),
    ComponentTag.BUNDLE_RESPONSE: (ConversionBundle, _enc_bundle, _dec_bundle),
    ComponentTag.DELEGATED_SINGLE: (DelegatedKeySingle, _enc_delegated_single, _dec_delegated_single),
    ComponentTag.DELEGATED_MULTI: (DelegatedKeyMulti, _enc_delegated_multi, _dec_delegated_multi),
    ComponentTag.HYBRID_CONTAINER: (HybridContainer, _enc_hybrid, _dec_hybrid),
    ComponentTag.BSW_MK: (BswMasterKey, _enc_bsw_mk, _dec_bsw_mk),
    ComponentTag.BSW_SK: (BswSecretKey, _enc_bsw_sk, _dec_bsw_sk),
    ComponentTag.ATTR_MK: (AttrMasterKey, _enc_attr_mk, _dec_attr_mk),
    ComponentTag.ATTR_PXK: (AttrProxyKey, _enc_attr_pxk, _dec_attr_pxk),
    ComponentTag.ATTR_BUNDLE: (AttrConversionBundle, _enc_attr_bundle, _dec_attr_bundle),
}

_TAG_BY_TYPE = {cls: tag for tag, (cls, _, _) in _CODECS.items()}


def tag_for(value: Any) -> ComponentTag:
    try:
        return _TAG_BY_TYPE[type(value)]
    except KeyError:
        raise TypeError(f"no wire encoding for {type(value).__name__}") from None


def encode(value: Any, ctx: Optional[BilinearContext] = None) -> bytes:
    """Canonical encoding of a domain value, header included."""
    ctx = ctx or get_context()
    tag = tag_for(value)
    writer = Writer(ctx)
    writer.raw(MAGIC + bytes([tag, FORMAT_VERSION]))
    _CODECS[tag][1](writer, value)
    return writer.getvalue()


def peek_tag(data: bytes) -> ComponentTag:
    """Validate the header and return the tag."""
    if len(data) < HEADER_SIZE:
        raise MalformedInput("input shorter than the header")
    if data[:len(MAGIC)] != MAGIC:
        raise MalformedInput("bad magic")
    tag_byte, version = data[len(MAGIC)], data[len(MAGIC) + 1]
    if version != FORMAT_VERSION:
        raise MalformedInput(f"unsupported format version {version}")
    try:
        return ComponentTag(tag_byte)
    except ValueError:
        raise MalformedInput(f"unknown component tag {tag_byte}") from None


def decode(
    data: bytes,
    expected_tag: Union[ComponentTag, tuple[ComponentTag, ...], None] = None,
    ctx: Optional[BilinearContext] = None,
) -> Any:
    """
    Parse and validate an encoded value.

    Args:
        data: Encoded bytes
        expected_tag: Tag (or tags) the caller accepts; any tag if None
        ctx: Pairing context

    Raises:
        MalformedInput: bad magic, tag, version, length or trailing bytes
        InvalidComponent: well-formed bytes violating a type invariant
    """
    ctx = ctx or get_context()
    tag = peek_tag(data)
    if expected_tag is not None:
        accepted = expected_tag if isinstance(expected_tag, tuple) else (expected_tag,)
        if tag not in accepted:
            names = ", ".join(t.name for t in accepted)
            raise MalformedInput(f"expected {names}, found {tag.name}")
    reader = Reader(ctx, data[HEADER_SIZE:])
    try:
        value = _CODECS[tag][2](reader)
    except (MalformedInput, InvalidComponent):
        raise
    except (AbeError, ValueError) as exc:
        raise InvalidComponent(f"{tag.name}: {exc}") from exc
    reader.done()
    return value


def write_component(path: Union[str, Path], value: Any, ctx: Optional[BilinearContext] = None) -> int:
    """Encode `value` into `path`; returns the number of bytes written."""
    data = encode(value, ctx)
    Path(path).write_bytes(data)
    logger.debug("wrote %s (%d bytes) to %s", tag_for(value).name, len(data), path)
    return len(data)


def read_component(
    path: Union[str, Path],
    expected_tag: Union[ComponentTag, tuple[ComponentTag, ...], None] = None,
    ctx: Optional[BilinearContext] = None,
) -> Any:
    data = Path(path).read_bytes()
    logger.debug("read %d bytes from %s", len(data), path)
    return decode(data, expected_tag, ctx)
