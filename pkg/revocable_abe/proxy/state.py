"""
Proxy-side state: precomputed Lagrange products and the atomically swapped slot.

For shares at x_1..x_t the proxy stores lambda'_i = prod_{j!=i} x_j/(x_j - x_i)
and l'_i = lambda'_i P(x_i) once per proxy key. A request from u_k then needs
l_i = l'_i u_k/(u_k - x_i), one multiplication and one division per share.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

from ..core.algebra import PrimeField, Scalar, Share, extend_at_zero, lagrange_at
from ..core.attributes import normalize_attribute
from ..core.errors import (
    ContextMismatch,
    EmptyRequest,
    InvalidComponent,
    InvalidIdentity,
    RequesterRevoked,
    StaleProxyKey,
    UnprovisionedAttribute,
)
from ..core.groups import BilinearContext, G2Element
from ..core.models import (
    AttrConversionBundle,
    AttrProxyKey,
    ConversionBundle,
    ConversionRequest,
    ProxyKey,
    RevocationMode,
)

logger = logging.getLogger(__name__)

AnyProxyKey = Union[ProxyKey, AttrProxyKey]


@dataclass(frozen=True)
class PrecomputedShares:
    """lambda'_i and l'_i for one share list."""
    points: tuple[Scalar, ...]
    lambda_primes: tuple[Scalar, ...]
    l_primes: tuple[Scalar, ...]


def precompute_shares(field_: PrimeField, shares: Sequence[Share]) -> PrecomputedShares:
    """lambda'_i and l'_i; linear in t when the dummy points form a geometric run."""
    points = tuple(s.x for s in shares)
    lambda_primes = tuple(lagrange_at(field_, points, 0))
    p = field_.modulus
    l_primes = tuple((lp * s.y) % p for lp, s in zip(lambda_primes, shares))
    return PrecomputedShares(points, lambda_primes, l_primes)


def fast_exponent(field_: PrimeField, pre: PrecomputedShares, user_id: Scalar) -> tuple[Scalar, Scalar]:
    """
    (lambda_k, sum_i l_i) for requester u_k from the precomputed products.

    Equal to the direct Lagrange computation over {x_1..x_t, u_k}.

    Raises:
        InvalidIdentity: u_k is 0
        RequesterRevoked: u_k is one of the share points
    """
    u = user_id % field_.modulus
    if u == 0:
        raise InvalidIdentity("identity 0 is reserved for the secret")
    if u in pre.points:
        raise RequesterRevoked("requester identity is one of the proxy key's share points")
    return extend_at_zero(field_, pre.points, pre.l_primes, u)


@dataclass(frozen=True)
class PrecomputedProxyState:
    """Everything a conversion needs, tied to one proxy-key version."""
    version: int
    mode: RevocationMode
    t: int
    single: Optional[PrecomputedShares] = None
    per_attribute: Mapping[str, PrecomputedShares] = field(default_factory=dict)


def precompute(field_: PrimeField, pxk: AnyProxyKey) -> PrecomputedProxyState:
    if isinstance(pxk, ProxyKey):
        return PrecomputedProxyState(
            version=pxk.version,
            mode=RevocationMode.KEY,
            t=pxk.t,
            single=precompute_shares(field_, pxk.shares),
        )
    return PrecomputedProxyState(
        version=pxk.version,
        mode=RevocationMode.ATTR,
        t=pxk.t,
        per_attribute={a: precompute_shares(field_, s) for a, s in pxk.shares.items()},
    )


def fast_convert(
    ctx: BilinearContext, state: PrecomputedProxyState, request: ConversionRequest
) -> Union[ConversionBundle, AttrConversionBundle]:
    """
    Convert a request against one precomputed state.

    Raises:
        EmptyRequest: no leaves
        InvalidAttribute: per-attribute mode and a name is not a valid attribute
        InvalidIdentity: u_k is 0
        RequesterRevoked: whole-key mode and u_k is a share point
        UnprovisionedAttribute: per-attribute mode and an attribute has no list
    """
    if request.mode is not state.mode:
        raise InvalidComponent(f"{request.mode.value}-mode request sent to a {state.mode.value}-mode proxy")
    if not request.leaves:
        raise EmptyRequest("conversion request has no leaf components")
    for leaf in request.leaves:
        if not isinstance(leaf.c_prime, G2Element):
            raise ContextMismatch("conversion components must be G2 elements")

    if state.mode is RevocationMode.KEY:
        lambda_k, exponent = fast_exponent(ctx.field, state.single, request.user_id)
        return ConversionBundle(
            version=state.version,
            lambda_k=lambda_k,
            converted={leaf.leaf_id: leaf.c_prime ** exponent for leaf in request.leaves},
        )

    cache: dict[str, Optional[tuple[Scalar, Scalar]]] = {}
    converted, lambdas, revoked = {}, {}, set()
    for leaf in request.leaves:
        attribute = normalize_attribute(leaf.attribute)
        if attribute not in cache:
            pre = state.per_attribute.get(attribute)
            if pre is None:
                raise UnprovisionedAttribute(f"no share list for attribute {attribute!r}")
            try:
                cache[attribute] = fast_exponent(ctx.field, pre, request.user_id)
            except RequesterRevoked:
                cache[attribute] = None
        entry = cache[attribute]
        if entry is None:
            revoked.add(leaf.leaf_id)
            continue
        converted[leaf.leaf_id] = leaf.c_prime ** entry[1]
        lambdas[leaf.leaf_id] = entry[0]
    return AttrConversionBundle(
        version=state.version,
        converted=converted,
        lambdas=lambdas,
        revoked_leaves=frozenset(revoked),
    )


class ProxySlot:
    """
    Holds the installed (proxy key, precomputed state) pair.

    Readers take one snapshot per request; install builds the new state
    before swapping it in under the lock.
    """

    def __init__(self, field_: PrimeField, mode: RevocationMode):
        self.field = field_
        self.mode = mode
        self._lock = threading.Lock()
        self._current: Optional[tuple[AnyProxyKey, PrecomputedProxyState]] = None

    def snapshot(self) -> Optional[tuple[AnyProxyKey, PrecomputedProxyState]]:
        return self._current

    @property
    def version(self) -> int:
        current = self._current
        return current[1].version if current else 0

    def install(self, pxk: AnyProxyKey) -> int:
        """
        Precompute and swap in a proxy key; returns the new version.

        Raises:
            InvalidComponent: key mode differs from the slot's
            StaleProxyKey: version does not exceed the installed one
        """
        expected = ProxyKey if self.mode is RevocationMode.KEY else AttrProxyKey
        if not isinstance(pxk, expected):
            raise InvalidComponent(f"a {self.mode.value}-mode proxy cannot install {type(pxk).__name__}")
        state = precompute(self.field, pxk)
        with self._lock:
            current = self.version
            if pxk.version <= current:
                raise StaleProxyKey(f"version {pxk.version} does not advance {current}")
            self._current = (pxk, state)
        logger.info("installed proxy key version %d (was %d, t=%d)", pxk.version, current, state.t)
        return pxk.version
