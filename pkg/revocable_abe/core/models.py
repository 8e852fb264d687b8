"""
Key material, ciphertexts and proxy artifacts.

Everything here is immutable except the two master keys, whose user registry
and revocation state change under the key authority's single-writer lock.
"""
from __future__ import annotations

import hashlib
import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Optional

from .algebra import Polynomial, Scalar, Share
from .errors import InvalidAttributeSet, InvalidComponent, UnknownUser
from .groups import G1Element, G2Element, GTElement
from .policy import AccessTree


class RevocationMode(Enum):
    """Which revocation construction a master key or proxy serves."""
    KEY = "key"     # whole-key revocation, one polynomial
    ATTR = "attr"   # per-attribute revocation, one polynomial per attribute


# Public parameters and ciphertexts

@dataclass(frozen=True)
class PublicKey:
    """h = g1^beta, egg_alpha = e(g1, g2)^alpha and f = g2^(1/beta)."""
    h: G1Element
    egg_alpha: GTElement
    f: G2Element


@dataclass(frozen=True)
class CiphertextLeaf:
    c: G1Element         # g1^q_y(0)
    c_prime: G2Element   # H(att(y))^q_y(0)


@dataclass(frozen=True)
class Ciphertext:
    """Encryption of a GT element under an access tree, one component per leaf."""
    tree: AccessTree
    c_tilde: GTElement
    c: G1Element
    leaves: tuple[CiphertextLeaf, ...]

    def __post_init__(self):
        if len(self.leaves) != self.tree.leaf_count:
            raise InvalidComponent(
                f"ciphertext has {len(self.leaves)} leaf components for "
                f"{self.tree.leaf_count} leaves"
            )


# Baseline keys

@dataclass(frozen=True)
class BswMasterKey:
    beta: Scalar
    g2_alpha: G2Element


@dataclass(frozen=True)
class BswAttributeKey:
    d: G2Element        # g2^r H(j)^r_j
    d_prime: G1Element  # g1^r_j


@dataclass(frozen=True)
class BswSecretKey:
    d: G2Element
    components: Mapping[str, BswAttributeKey]

    def __post_init__(self):
        if not self.components:
            raise InvalidAttributeSet("a secret key needs at least one attribute")

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.components)


# Revocable keys

@dataclass(frozen=True)
class AttributeKey:
    d: G2Element         # g2^r H(j)^(r_j P(0))
    d_prime: G1Element   # g1^r_j
    d_dprime: G1Element  # g1^(r_j P(u_k))


@dataclass(frozen=True)
class SecretKey:
    """A user key bound to identity u_k."""
    user_id: Scalar
    d: G2Element
    components: Mapping[str, AttributeKey]

    def __post_init__(self):
        if not self.components:
            raise InvalidAttributeSet("a secret key needs at least one attribute")

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.components)


@dataclass(frozen=True)
class RevocationList:
    """The complete set of currently revoked identities, in revocation order."""
    identities: tuple[Scalar, ...] = ()

    def __post_init__(self):
        if any(u == 0 for u in self.identities):
            raise InvalidComponent("identity 0 cannot be revoked")
        if len(set(self.identities)) != len(self.identities):
            raise InvalidComponent("revocation list has duplicate identities")

    def __len__(self) -> int:
        return len(self.identities)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.identities)

    def __contains__(self, identity: object) -> bool:
        return identity in self.identities


def _check_share_points(shares: tuple[Share, ...], label: str) -> None:
    if not shares:
        raise InvalidComponent(f"{label} has no shares")
    xs = [s.x for s in shares]
    if len(set(xs)) != len(xs):
        raise InvalidComponent(f"{label} has duplicate share points")


@dataclass(frozen=True)
class ProxyKey:
    """Exactly t points of P: revoked identities first, dummy padding after."""
    version: int
    shares: tuple[Share, ...]

    def __post_init__(self):
        _check_share_points(self.shares, "proxy key")

    @property
    def t(self) -> int:
        return len(self.shares)

    @property
    def points(self) -> tuple[Scalar, ...]:
        return tuple(s.x for s in self.shares)


@dataclass(frozen=True)
class AttrProxyKey:
    """Per-attribute share lists, each exactly t points of P_y."""
    version: int
    shares: Mapping[str, tuple[Share, ...]]

    def __post_init__(self):
        sizes = {len(v) for v in self.shares.values()}
        if len(sizes) > 1:
            raise InvalidComponent("attribute share lists differ in length")
        for attribute, shares in self.shares.items():
            _check_share_points(shares, f"share list for {attribute!r}")

    @property
    def t(self) -> int:
        return next((len(v) for v in self.shares.values()), 0)

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.shares)


@dataclass(frozen=True)
class ConversionBundle:
    """Proxy output: converted C'' per requested leaf plus the requester's lambda_k."""
    version: int
    lambda_k: Scalar
    converted: Mapping[int, G2Element]

    @property
    def leaf_ids(self) -> frozenset[int]:
        return frozenset(self.converted)


@dataclass(frozen=True)
class AttrConversionBundle:
    """
    Per-attribute proxy output.

    Leaves whose attribute lists the requester as revoked carry no component
    and appear in `revoked_leaves` instead.
    """
    version: int
    converted: Mapping[int, G2Element]
    lambdas: Mapping[int, Scalar]
    revoked_leaves: frozenset[int] = frozenset()

    def __post_init__(self):
        if set(self.converted) != set(self.lambdas):
            raise InvalidComponent("converted leaves and lambda entries disagree")
        if self.revoked_leaves & set(self.converted):
            raise InvalidComponent("a leaf cannot be both converted and revoked")

    @property
    def leaf_ids(self) -> frozenset[int]:
        return frozenset(self.converted) | self.revoked_leaves


@dataclass(frozen=True)
class RequestLeaf:
    leaf_id: int
    c_prime: G2Element
    attribute: Optional[str] = None   # per-attribute mode only


@dataclass(frozen=True)
class ConversionRequest:
    """What a decryptor sends to the proxy: its identity and the C'_y to convert."""
    mode: RevocationMode
    user_id: Scalar
    leaves: tuple[RequestLeaf, ...]

    def __post_init__(self):
        if self.mode is RevocationMode.ATTR and any(l.attribute is None for l in self.leaves):
            raise InvalidComponent("per-attribute requests name the attribute of every leaf")


@dataclass(frozen=True)
class HybridContainer:
    """ABE-encrypted key seed plus the AEAD-sealed payload."""
    ciphertext: Ciphertext
    nonce: bytes
    sealed: bytes


# Delegated keys

@dataclass(frozen=True)
class DelegatedKeySingle:
    """
    Subset key derived by the holder of `user_id`'s key.

    `lambda_version` is the proxy-key version whose lambda_k is folded into
    the d_dprime components; the key stops working once that coefficient
    changes.
    """
    user_id: Scalar
    lambda_version: int
    d: G2Element
    components: Mapping[str, AttributeKey]

    def __post_init__(self):
        if not self.components:
            raise InvalidAttributeSet("a delegated key needs at least one attribute")

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.components)


@dataclass(frozen=True)
class MultiAttributeKey:
    d: G2Element
    d_prime: G1Element
    d_dprime: G1Element   # D''^(1/P_B(0))
    d_tprime: G1Element   # D''^(P_B(C)/P_B(0))


@dataclass(frozen=True)
class DelegatedKeyMulti:
    """Key issued by B to C out of a key A issued to B."""
    delegator_id: Scalar  # B, presented to A's proxy
    user_id: Scalar       # C, presented to B's proxy
    d: G2Element
    components: Mapping[str, MultiAttributeKey]

    def __post_init__(self):
        if not self.components:
            raise InvalidAttributeSet("a delegated key needs at least one attribute")

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.components)


# Key authority state

class UserRegistry:
    """User name to identity map; identities are unique and nonzero."""

    def __init__(self, entries: Optional[Mapping[str, Scalar]] = None):
        self._by_name: dict[str, Scalar] = {}
        self._by_identity: dict[Scalar, str] = {}
        for name, identity in (entries or {}).items():
            self.register(name, identity)

    def register(self, name: str, identity: Scalar) -> None:
        if identity == 0:
            raise InvalidComponent("identity 0 is reserved")
        if identity in self._by_identity and self._by_identity[identity] != name:
            raise InvalidComponent("identity already registered to another user")
        self._by_name[name] = identity
        self._by_identity[identity] = name

    def identity_of(self, name: str) -> Scalar:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownUser(f"unknown user: {name!r}") from None

    def name_of(self, identity: Scalar) -> str:
        try:
            return self._by_identity[identity]
        except KeyError:
            raise UnknownUser("identity is not registered") from None

    def has_identity(self, identity: Scalar) -> bool:
        return identity in self._by_identity

    def names(self) -> list[str]:
        return sorted(self._by_name)

    def items(self) -> list[tuple[str, Scalar]]:
        return sorted(self._by_name.items())

    def __contains__(self, name: object) -> bool:
        return name in self._by_name

    def __len__(self) -> int:
        return len(self._by_name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UserRegistry):
            return NotImplemented
        return self._by_name == other._by_name


def point_digest(x: Scalar) -> bytes:
    """Digest under which issued dummy points are remembered."""
    return hashlib.sha256(x.to_bytes(32, "big")).digest()


@dataclass(eq=False)
class _AuthorityState:
    """Registry, dummy-point digests and proxy version shared by both master keys."""
    registry: UserRegistry = field(default_factory=UserRegistry)
    dummy_digests: set[bytes] = field(default_factory=set)
    proxy_version: int = 0
    lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def point_in_use(self, x: Scalar) -> bool:
        return self.registry.has_identity(x) or point_digest(x) in self.dummy_digests


@dataclass(eq=False)
class MasterKey(_AuthorityState):
    """Whole-key revocation master key: beta, g2^alpha and the degree-t polynomial P."""
    beta: Scalar = 0
    g2_alpha: Optional[G2Element] = None
    polynomial: Optional[Polynomial] = None
    revocation_state: RevocationList = field(default_factory=RevocationList)

    @property
    def t(self) -> int:
        return self.polynomial.degree


@dataclass(eq=False)
class AttrMasterKey(_AuthorityState):
    """Per-attribute master key: one degree-t polynomial per attribute, created lazily."""
    beta: Scalar = 0
    g2_alpha: Optional[G2Element] = None
    t: int = 1
    polynomials: dict[str, Polynomial] = field(default_factory=dict)
    revocations: dict[str, RevocationList] = field(default_factory=dict)

    @property
    def attributes(self) -> frozenset[str]:
        return frozenset(self.polynomials)
