"""
Per-attribute revocation: one degree-t polynomial per attribute.

Revoking attribute y for a user only removes that user's ability to use
leaves labelled y; leaf selection routes around revoked leaves whenever the
remaining attributes still satisfy the policy.
"""
from __future__ import annotations

import logging
import random
from typing import Iterable, Mapping, Optional, Sequence, Union

from ..core.algebra import Polynomial, Scalar, default_rng, random_polynomial
from ..core.attributes import normalize_attribute, normalize_attributes
from ..core.errors import (
    AttributeRevoked,
    ContextMismatch,
    EmptyRequest,
    InvalidDegree,
    NotSatisfied,
    RequesterRevoked,
    UnprovisionedAttribute,
)
from ..core.groups import BilinearContext, G2Element, GTElement, get_context
from ..core.models import (
    AttrConversionBundle,
    AttributeKey,
    AttrMasterKey,
    AttrProxyKey,
    Ciphertext,
    PublicKey,
    RevocationList,
    SecretKey,
)
from ..core.policy import AccessTree, SatisfyingSelection, select_satisfying_leaves
from .authority import (
    check_revocation_list,
    conversion_exponent,
    ensure_identity,
    padded_shares,
    revocation_list_for,
)
from .bsw import (
    PairList,
    encrypt_tree,
    finish_decryption,
    make_public_key,
    require_attributes,
    sample_master_secrets,
)
from .key_revocation import leaf_pairs, require_leaves

logger = logging.getLogger(__name__)

AttrLeafComponents = Sequence[tuple[int, str, G2Element]]


def convert_attr_components(
    ctx: BilinearContext,
    pxk: AttrProxyKey,
    leaf_components: AttrLeafComponents,
    user_id: Scalar,
) -> AttrConversionBundle:
    """
    Per-attribute conversion with the direct Lagrange formula.

    Each attribute's (lambda^y_k, exponent) pair is computed once per request.
    Leaves whose attribute has u_k among its share points are returned in
    `revoked_leaves` instead of failing the whole request.

    Raises:
        EmptyRequest: no components
        UnprovisionedAttribute: the proxy key has no list for an attribute
    """
    if not leaf_components:
        raise EmptyRequest("conversion request has no leaf components")
    per_attribute: dict[str, Optional[tuple[Scalar, Scalar]]] = {}
    converted: dict[int, G2Element] = {}
    lambdas: dict[int, Scalar] = {}
    revoked: set[int] = set()
    for leaf_id, attribute, component in leaf_components:
        if not isinstance(component, G2Element):
            raise ContextMismatch("conversion components must be G2 elements")
        attribute = normalize_attribute(attribute)
        if attribute not in per_attribute:
            shares = pxk.shares.get(attribute)
            if shares is None:
                raise UnprovisionedAttribute(f"no share list for attribute {attribute!r}")
            try:
                per_attribute[attribute] = conversion_exponent(ctx.field, shares, user_id)
            except RequesterRevoked:
                per_attribute[attribute] = None
        entry = per_attribute[attribute]
        if entry is None:
            revoked.add(leaf_id)
            continue
        lambda_k, exponent = entry
        converted[leaf_id] = component ** exponent
        lambdas[leaf_id] = lambda_k
    return AttrConversionBundle(
        version=pxk.version,
        converted=converted,
        lambdas=lambdas,
        revoked_leaves=frozenset(revoked),
    )


class AttrRevocationScheme:
    """Setup, keygen, rekey, convert and decrypt with per-attribute revocation."""

    def __init__(self, ctx: Optional[BilinearContext] = None):
        self.ctx = ctx or get_context()

    def setup(
        self,
        t: int,
        initial_attrs: Iterable[str] = (),
        rng: Optional[random.Random] = None,
    ) -> tuple[PublicKey, AttrMasterKey]:
        if t < 1:
            raise InvalidDegree(f"degree must be >= 1, got {t}")
        rng = rng or default_rng()
        alpha, beta = sample_master_secrets(self.ctx, rng)
        pk = make_public_key(self.ctx, alpha, beta)
        mk = AttrMasterKey(beta=beta, g2_alpha=self.ctx.g2 ** alpha, t=t)
        self.register_attributes(mk, initial_attrs, rng)
        logger.info("setup complete (t=%d, %d attributes)", t, len(mk.polynomials))
        return pk, mk

    def register_attributes(
        self,
        mk: AttrMasterKey,
        attrs: Iterable[str],
        rng: Optional[random.Random] = None,
    ) -> list[str]:
        """Create polynomials for attributes the authority has not seen; returns the new names."""
        rng = rng or default_rng()
        added = []
        with mk.lock:
            for attribute in sorted(normalize_attributes(attrs)):
                if attribute not in mk.polynomials:
                    mk.polynomials[attribute] = random_polynomial(self.ctx.field, mk.t, rng)
                    added.append(attribute)
        if added:
            logger.info("introduced attributes: %s", ", ".join(added))
        return added

    def _polynomial(self, mk: AttrMasterKey, attribute: str, rng: random.Random) -> Polynomial:
        self.register_attributes(mk, [attribute], rng)
        return mk.polynomials[attribute]

    def keygen(
        self,
        mk: AttrMasterKey,
        user_name: str,
        attrs: Iterable[str],
        rng: Optional[random.Random] = None,
    ) -> SecretKey:
        """As whole-key keygen, with D_j blinded by P_j(0) and D''_j bound by P_j(u_k)."""
        attributes = require_attributes(attrs)
        rng = rng or default_rng()
        ctx = self.ctx
        user_id = ensure_identity(ctx.field, mk, user_name, rng)
        r = ctx.random_scalar(rng)
        g2_r = ctx.g2 ** r
        d = (mk.g2_alpha * g2_r) ** ctx.field.inv(mk.beta)
        components = {}
        for attribute in sorted(attributes):
            polynomial = self._polynomial(mk, attribute, rng)
            r_j = ctx.random_scalar(rng)
            d_prime = ctx.g1 ** r_j
            components[attribute] = AttributeKey(
                d=g2_r * (ctx.hash_to_g2(attribute) ** (r_j * polynomial(0))),
                d_prime=d_prime,
                d_dprime=d_prime ** polynomial(user_id),
            )
        logger.info("issued key for %s with %d attributes", user_name, len(components))
        return SecretKey(user_id=user_id, d=d, components=components)

    def encrypt(
        self,
        pk: PublicKey,
        message: GTElement,
        tree: AccessTree,
        rng: Optional[random.Random] = None,
    ) -> Ciphertext:
        return encrypt_tree(self.ctx, pk, message, tree, rng)

    def revocation_list(self, mk: AttrMasterKey, user_names: Iterable[str]) -> RevocationList:
        return revocation_list_for(mk, user_names)

    def proxy_rekey(
        self,
        pk: Optional[PublicKey],
        mk: AttrMasterKey,
        revocations: Mapping[str, RevocationList],
        rng: Optional[random.Random] = None,
    ) -> AttrProxyKey:
        """
        Proxy key for the complete per-attribute revocation map.

        Every attribute known to the authority gets a list of exactly t
        shares; attributes absent from `revocations` get dummies only.
        """
        rng = rng or default_rng()
        normalized = {normalize_attribute(a): rl for a, rl in revocations.items()}
        self.register_attributes(mk, normalized, rng)
        with mk.lock:
            for revoked in normalized.values():
                check_revocation_list(mk, revoked, mk.t)
            shares = {
                attribute: padded_shares(
                    self.ctx.field, mk, polynomial,
                    normalized.get(attribute, RevocationList()), mk.t, rng,
                )
                for attribute, polynomial in sorted(mk.polynomials.items())
            }
            version = mk.proxy_version + 1
            mk.proxy_version = version
            mk.revocations = {a: rl for a, rl in normalized.items() if len(rl)}
        logger.info(
            "proxy rekey to version %d (%d attributes, %d with revocations)",
            version, len(shares), len(mk.revocations),
        )
        return AttrProxyKey(version=version, shares=shares)

    def extend_rekey(
        self,
        pk: Optional[PublicKey],
        mk: AttrMasterKey,
        pxk: AttrProxyKey,
        new_attrs: Iterable[str],
        rng: Optional[random.Random] = None,
    ) -> AttrProxyKey:
        """
        Add share lists for attributes introduced after `pxk` was built.

        Existing lists and the revocation map are kept; the version still
        advances so the proxy accepts the push.
        """
        rng = rng or default_rng()
        self.register_attributes(mk, new_attrs, rng)
        with mk.lock:
            shares = dict(pxk.shares)
            added = []
            for attribute in sorted(normalize_attributes(new_attrs)):
                if attribute in shares:
                    continue
                shares[attribute] = padded_shares(
                    self.ctx.field, mk, mk.polynomials[attribute],
                    mk.revocations.get(attribute, RevocationList()), mk.t, rng,
                )
                added.append(attribute)
            version = max(mk.proxy_version, pxk.version) + 1
            mk.proxy_version = version
        logger.info("extended proxy key to version %d with %d attributes", version, len(added))
        return AttrProxyKey(version=version, shares=shares)

    def convert(
        self, pxk: AttrProxyKey, leaf_components: AttrLeafComponents, user_id: Scalar
    ) -> AttrConversionBundle:
        return convert_attr_components(self.ctx, pxk, leaf_components, user_id)

    def conversion_request(
        self, ct: Ciphertext, sk: SecretKey
    ) -> Union[list[tuple[int, str, G2Element]], NotSatisfied]:
        """
        Every leaf the key holds an attribute for.

        The whole set is requested so decryption can route around leaves
        the proxy reports as revoked.
        """
        if isinstance(self._select(ct, sk), NotSatisfied):
            return NotSatisfied()
        return [
            (leaf_id, attribute, ct.leaves[leaf_id].c_prime)
            for leaf_id, attribute in enumerate(ct.tree.leaf_attributes())
            if attribute in sk.attributes
        ]

    def _select(
        self, ct: Ciphertext, sk: SecretKey, excluded: frozenset[int] = frozenset()
    ) -> Union[SatisfyingSelection, NotSatisfied]:
        return select_satisfying_leaves(ct.tree, sk.attributes, self.ctx.field, excluded)

    def decrypt(
        self, ct: Ciphertext, sk: SecretKey, bundle: AttrConversionBundle
    ) -> Union[GTElement, NotSatisfied]:
        """
        Recover the message using only leaves not revoked for this user.

        Returns NotSatisfied if sk's attributes cannot satisfy the tree at all.

        Raises:
            AttributeRevoked: the tree is satisfiable only through revoked leaves
            BundleMismatch: a chosen leaf is missing from the bundle
        """
        if isinstance(self._select(ct, sk), NotSatisfied):
            return NotSatisfied()
        selection = self._select(ct, sk, bundle.revoked_leaves)
        if isinstance(selection, NotSatisfied):
            raise AttributeRevoked("policy is only satisfiable through revoked attributes")
        require_leaves(bundle.converted, selection.leaf_ids)
        attributes = ct.tree.leaf_attributes()
        pairs: PairList = []
        for leaf_id in selection.leaf_ids:
            leaf = ct.leaves[leaf_id]
            pairs.extend(leaf_pairs(
                sk.components[attributes[leaf_id]], leaf.c, leaf.c_prime,
                bundle.converted[leaf_id], bundle.lambdas[leaf_id],
                selection.leaf_coefficients[leaf_id],
            ))
        return finish_decryption(self.ctx, ct, sk.d, pairs)
