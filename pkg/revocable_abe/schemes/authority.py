"""
Key-authority bookkeeping shared by both revocable schemes: identity
registration, dummy share points and the conversion exponent.
"""
from __future__ import annotations

import logging
import random
from typing import Iterable, Optional, Sequence

from ..core.algebra import (
    Polynomial,
    PrimeField,
    Scalar,
    Share,
    eval_on_coset,
    extend_at_zero,
    lagrange_at,
)
from ..core.errors import (
    InvalidIdentity,
    RequesterRevoked,
    RevocationCapacityExceeded,
    UnknownUser,
)
from ..core.models import RevocationList, _AuthorityState, point_digest

logger = logging.getLogger(__name__)


def ensure_identity(
    field: PrimeField, state: _AuthorityState, user_name: str, rng: random.Random
) -> Scalar:
    """
    Identity of `user_name`, registering a fresh one on first issue.

    New identities are uniform in Z_p minus zero and never coincide with a
    registered identity or an issued dummy point.
    """
    with state.lock:
        if user_name in state.registry:
            return state.registry.identity_of(user_name)
        while True:
            candidate = field.random_scalar(rng)
            if not state.point_in_use(candidate):
                break
        state.registry.register(user_name, candidate)
    logger.info("registered user %s (%d users)", user_name, len(state.registry))
    return candidate


def revocation_list_for(state: _AuthorityState, user_names: Iterable[str]) -> RevocationList:
    """Map user names to a revocation list, keeping the given order."""
    identities = []
    for name in user_names:
        identity = state.registry.identity_of(name)
        if identity not in identities:
            identities.append(identity)
    return RevocationList(tuple(identities))


def check_revocation_list(state: _AuthorityState, revoked: RevocationList, t: int) -> None:
    if len(revoked) > t:
        raise RevocationCapacityExceeded(
            f"at most {t} users can be revoked, got {len(revoked)}"
        )
    for identity in revoked:
        if not state.registry.has_identity(identity):
            raise UnknownUser("revocation list contains an unregistered identity")


_COSET_ATTEMPTS = 8


def _coset_dummies(
    field: PrimeField, state: _AuthorityState, polynomial: Polynomial, count: int, taken: set, rng: random.Random
) -> Optional[list[Share]]:
    # count consecutive points c w^k of a random coset of the order-n subgroup, n = 2^ceil(log2 count)
    n = 1 << (count - 1).bit_length()
    root = field.root_of_unity(n)
    if root is None:
        return None
    for _ in range(_COSET_ATTEMPTS):
        offset = field.random_scalar(rng)
        xs = [offset]
        for _ in range(count - 1):
            xs.append((xs[-1] * root) % field.modulus)
        if any(x in taken or state.point_in_use(x) for x in xs):
            continue
        ys = eval_on_coset(polynomial, offset, root, n)
        return [Share(x, y) for x, y in zip(xs, ys)]
    return None


def _random_dummies(
    field: PrimeField, state: _AuthorityState, polynomial: Polynomial, count: int, taken: set, rng: random.Random
) -> list[Share]:
    shares = []
    while len(shares) < count:
        x = field.random_scalar(rng)
        if x in taken or state.point_in_use(x):
            continue
        taken.add(x)
        shares.append(Share(x, polynomial(x)))
    return shares


def padded_shares(
    field: PrimeField,
    state: _AuthorityState,
    polynomial: Polynomial,
    revoked: RevocationList,
    t: int,
    rng: random.Random,
) -> tuple[Share, ...]:
    """
    Exactly t points of `polynomial`: the revoked identities, then fresh dummies.

    Dummies lie on a random coset of a power-of-two subgroup and are evaluated
    with one NTT; fields without such a subgroup get independent random points.
    Caller holds `state.lock`. Dummy points are remembered by digest so later
    identities never collide with them.
    """
    shares = [Share(u, polynomial.memoized(u)) for u in revoked]
    taken = {s.x for s in shares}
    count = t - len(shares)
    if count > 0:
        dummies = _coset_dummies(field, state, polynomial, count, taken, rng)
        if dummies is None:
            logger.debug("no coset for %d dummies, sampling points one by one", count)
            dummies = _random_dummies(field, state, polynomial, count, taken, rng)
        state.dummy_digests.update(point_digest(s.x) for s in dummies)
        shares.extend(dummies)
    return tuple(shares)


def conversion_exponent(
    field: PrimeField, shares: Sequence[Share], user_id: Scalar
) -> tuple[Scalar, Scalar]:
    """
    Lagrange weight of the requester and the proxy's exponent.

    Over the point set {x_1..x_t, u_k} evaluated at 0 this returns
    (lambda_k, sum_i lambda_i P(x_i)).

    Raises:
        InvalidIdentity: u_k is 0
        RequesterRevoked: u_k is one of the share points
    """
    u = user_id % field.modulus
    if u == 0:
        raise InvalidIdentity("identity 0 is reserved for the secret")
    xs = [s.x for s in shares]
    if u in xs:
        raise RequesterRevoked("requester identity is one of the proxy key's share points")
    p = field.modulus
    weighted = [(l * s.y) % p for l, s in zip(lagrange_at(field, xs, 0), shares)]
    return extend_at_zero(field, xs, weighted, u)
