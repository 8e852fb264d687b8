"""
Whole-key revocation through a conversion proxy.

The key authority blinds every key's attribute components by P(0) of a
degree-t polynomial P and binds them to the user's identity u_k through
P(u_k). The proxy holds t points of P (the revoked identities plus dummy
padding) and raises each requested C'_y to sum(lambda_i P(x_i)); only a
requester whose own point is not among the proxy's t points can complete the
interpolation of P(0).
"""
from __future__ import annotations

import logging
import random
from typing import Iterable, Optional, Sequence, Union

from ..core.algebra import Scalar, default_rng, random_polynomial
from ..core.errors import BundleMismatch, ContextMismatch, EmptyRequest, NotSatisfied
from ..core.groups import BilinearContext, G1Element, G2Element, GTElement, get_context
from ..core.models import (
    AttributeKey,
    Ciphertext,
    ConversionBundle,
    MasterKey,
    ProxyKey,
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

logger = logging.getLogger(__name__)

LeafComponents = Sequence[tuple[int, G2Element]]


def convert_components(
    ctx: BilinearContext,
    pxk: ProxyKey,
    leaf_components: LeafComponents,
    user_id: Scalar,
) -> ConversionBundle:
    """
    Proxy conversion with the direct Lagrange formula.

    Args:
        ctx: Pairing context
        pxk: The proxy's t shares
        leaf_components: (leaf id, C'_y) pairs to convert
        user_id: Requester identity u_k

    Returns:
        ConversionBundle with C''_y = C'_y^(sum lambda_i P(x_i)) and lambda_k

    Raises:
        EmptyRequest: no components
        RequesterRevoked: u_k is one of the share points
    """
    if not leaf_components:
        raise EmptyRequest("conversion request has no leaf components")
    for _, component in leaf_components:
        if not isinstance(component, G2Element):
            raise ContextMismatch("conversion components must be G2 elements")
    lambda_k, exponent = conversion_exponent(ctx.field, pxk.shares, user_id)
    converted = {leaf_id: component ** exponent for leaf_id, component in leaf_components}
    return ConversionBundle(version=pxk.version, lambda_k=lambda_k, converted=converted)


class KeyRevocationScheme:
    """Setup, keygen, encrypt, proxy rekey, convert and decrypt with whole-key revocation."""

    def __init__(self, ctx: Optional[BilinearContext] = None):
        self.ctx = ctx or get_context()

    def setup(self, t: int, rng: Optional[random.Random] = None) -> tuple[PublicKey, MasterKey]:
        """
        Create public parameters and a master key able to revoke up to t users.

        Raises:
            InvalidDegree: t < 1
        """
        rng = rng or default_rng()
        polynomial = random_polynomial(self.ctx.field, t, rng)
        alpha, beta = sample_master_secrets(self.ctx, rng)
        pk = make_public_key(self.ctx, alpha, beta)
        mk = MasterKey(beta=beta, g2_alpha=self.ctx.g2 ** alpha, polynomial=polynomial)
        logger.info("setup complete (t=%d)", t)
        return pk, mk

    def keygen(
        self,
        mk: MasterKey,
        user_name: str,
        attrs: Iterable[str],
        rng: Optional[random.Random] = None,
    ) -> SecretKey:
        """
        Issue a key for `user_name`; re-issue keeps the registered identity.

        D_j = g2^r H(j)^(r_j P(0)), D'_j = g1^r_j, D''_j = D'_j^P(u_k).
        """
        attributes = require_attributes(attrs)
        rng = rng or default_rng()
        ctx = self.ctx
        user_id = ensure_identity(ctx.field, mk, user_name, rng)
        p0 = mk.polynomial(0)
        pu = mk.polynomial(user_id)
        r = ctx.random_scalar(rng)
        g2_r = ctx.g2 ** r
        d = (mk.g2_alpha * g2_r) ** ctx.field.inv(mk.beta)
        components = {}
        for attribute in sorted(attributes):
            r_j = ctx.random_scalar(rng)
            d_prime = ctx.g1 ** r_j
            components[attribute] = AttributeKey(
                d=g2_r * (ctx.hash_to_g2(attribute) ** (r_j * p0)),
                d_prime=d_prime,
                d_dprime=d_prime ** pu,
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

    def revocation_list(self, mk: MasterKey, user_names: Iterable[str]) -> RevocationList:
        return revocation_list_for(mk, user_names)

    def proxy_rekey(
        self,
        pk: Optional[PublicKey],
        mk: MasterKey,
        revoked: RevocationList,
        rng: Optional[random.Random] = None,
    ) -> ProxyKey:
        """
        Build the proxy key for the complete current revocation list.

        Un-revoking a user is a rekey with a list that omits them.

        Raises:
            RevocationCapacityExceeded: more than t identities
            UnknownUser: an identity was never registered
        """
        rng = rng or default_rng()
        with mk.lock:
            check_revocation_list(mk, revoked, mk.t)
            shares = padded_shares(self.ctx.field, mk, mk.polynomial, revoked, mk.t, rng)
            version = mk.proxy_version + 1
            mk.proxy_version = version
            mk.revocation_state = revoked
        logger.info(
            "proxy rekey to version %d (%d revoked, %d dummies)",
            version, len(revoked), mk.t - len(revoked),
        )
        return ProxyKey(version=version, shares=shares)

    def convert(
        self, pxk: ProxyKey, leaf_components: LeafComponents, user_id: Scalar
    ) -> ConversionBundle:
        return convert_components(self.ctx, pxk, leaf_components, user_id)

    def current_lambda(self, pxk: ProxyKey, user_id: Scalar) -> tuple[int, Scalar]:
        """(version, lambda_k) for `user_id`, via a conversion of the G2 generator."""
        bundle = self.convert(pxk, [(0, self.ctx.g2)], user_id)
        return bundle.version, bundle.lambda_k

    def select(self, ct: Ciphertext, sk) -> Union[SatisfyingSelection, NotSatisfied]:
        return select_satisfying_leaves(ct.tree, sk.attributes, self.ctx.field)

    def conversion_request(self, ct: Ciphertext, sk) -> Union[list[tuple[int, G2Element]], NotSatisfied]:
        """The C'_y components of the minimal selection, for sending to the proxy."""
        selection = self.select(ct, sk)
        if isinstance(selection, NotSatisfied):
            return selection
        return [(leaf_id, ct.leaves[leaf_id].c_prime) for leaf_id in selection.leaf_ids]

    def decrypt(
        self, ct: Ciphertext, sk: SecretKey, bundle: ConversionBundle
    ) -> Union[GTElement, NotSatisfied]:
        """
        Recover the message with a proxy bundle for sk's identity.

        A revoked requester never receives a bundle; a bundle computed for
        another identity yields a GT element that is not the message.

        Raises:
            BundleMismatch: the bundle does not cover the chosen leaves
        """
        selection = self.select(ct, sk)
        if isinstance(selection, NotSatisfied):
            return selection
        require_leaves(bundle.converted, selection.leaf_ids)
        attributes = ct.tree.leaf_attributes()
        pairs: PairList = []
        for leaf_id in selection.leaf_ids:
            c = selection.leaf_coefficients[leaf_id]
            key = sk.components[attributes[leaf_id]]
            leaf = ct.leaves[leaf_id]
            pairs.extend(leaf_pairs(key, leaf.c, leaf.c_prime, bundle.converted[leaf_id],
                                    bundle.lambda_k, c))
        return finish_decryption(self.ctx, ct, sk.d, pairs)

    def decrypt_node(
        self, ct: Ciphertext, sk: SecretKey, bundle: ConversionBundle, leaf_id: int
    ) -> GTElement:
        """e(C_x, D_i) / (e(D''_i, C'_x)^lambda_k * e(D'_i, C''_x)) = e(g1,g2)^(r q_x(0))."""
        ctx = self.ctx
        key = sk.components[ct.tree.leaf_attributes()[leaf_id]]
        leaf = ct.leaves[leaf_id]
        numerator = ctx.pairing(leaf.c, key.d)
        denominator = (ctx.pairing(key.d_dprime, leaf.c_prime) ** bundle.lambda_k) * ctx.pairing(
            key.d_prime, bundle.converted[leaf_id]
        )
        return numerator / denominator


def leaf_pairs(
    key: AttributeKey,
    c: G1Element,
    c_prime: G2Element,
    c_dprime: G2Element,
    lambda_k: Scalar,
    coefficient: Scalar,
) -> PairList:
    """The three pairing inputs of one leaf, weighted by its path coefficient."""
    return [
        (c ** coefficient, key.d),
        ((key.d_dprime ** (lambda_k * coefficient)).inverse(), c_prime),
        ((key.d_prime ** coefficient).inverse(), c_dprime),
    ]


def require_leaves(available, needed: Iterable[int]) -> None:
    missing = [leaf_id for leaf_id in needed if leaf_id not in available]
    if missing:
        raise BundleMismatch(f"bundle is missing leaves {missing}")
