"""
Baseline ciphertext-policy ABE on the asymmetric layout.

Ciphertext components C and C_y live in G1, C'_y in G2; key components D and
D_j live in G2, D'_j in G1. The revocable schemes reuse `encrypt_tree`, so
all ciphertexts share one format.
"""
from __future__ import annotations

import logging
import random
from typing import AbstractSet, Iterable, Optional, Union

from ..core.algebra import Scalar, default_rng
from ..core.attributes import normalize_attributes
from ..core.errors import (
    ContextMismatch,
    DecryptionError,
    InvalidAttributeSet,
    NotASubset,
    NotSatisfied,
)
from ..core.groups import BilinearContext, G1Element, G2Element, GTElement, get_context
from ..core.models import (
    BswAttributeKey,
    BswMasterKey,
    BswSecretKey,
    Ciphertext,
    CiphertextLeaf,
    PublicKey,
)
from ..core.policy import AccessTree, SatisfyingSelection, select_satisfying_leaves, share_over_tree

logger = logging.getLogger(__name__)

PairList = list[tuple[G1Element, G2Element]]


def make_public_key(ctx: BilinearContext, alpha: Scalar, beta: Scalar) -> PublicKey:
    return PublicKey(
        h=ctx.g1 ** beta,
        egg_alpha=ctx.gt_generator ** alpha,
        f=ctx.g2 ** ctx.field.inv(beta),
    )


def sample_master_secrets(ctx: BilinearContext, rng: random.Random) -> tuple[Scalar, Scalar]:
    """(alpha, beta), both nonzero."""
    return ctx.random_scalar(rng), ctx.random_scalar(rng)


def require_attributes(attrs: Iterable[str]) -> frozenset[str]:
    normalized = normalize_attributes(attrs)
    if not normalized:
        raise InvalidAttributeSet("attribute set is empty")
    return normalized


def require_subset(subset: Iterable[str], held: AbstractSet[str]) -> frozenset[str]:
    normalized = normalize_attributes(subset)
    if not normalized:
        raise NotASubset("delegation subset is empty")
    missing = normalized - held
    if missing:
        raise NotASubset(f"attributes not held by the source key: {', '.join(sorted(missing))}")
    return normalized


def encrypt_tree(
    ctx: BilinearContext,
    pk: PublicKey,
    message: GTElement,
    tree: AccessTree,
    rng: Optional[random.Random] = None,
    secret: Optional[Scalar] = None,
) -> Ciphertext:
    """
    Encrypt a GT element under an access tree.

    Args:
        ctx: Pairing context
        pk: Public key
        message: Plaintext in GT
        tree: Access policy
        rng: Randomness source
        secret: Fixed s, for instrumented tests only

    Returns:
        Ciphertext with C~ = m e(g1,g2)^(alpha s), C = h^s and per-leaf components
    """
    if not isinstance(message, GTElement):
        raise ContextMismatch("messages are GT elements")
    rng = rng or default_rng()
    s = ctx.random_scalar(rng) if secret is None else ctx.field.normalize(secret)
    shares = share_over_tree(ctx.field, tree, s, rng)
    leaves = tuple(
        CiphertextLeaf(c=ctx.g1 ** q, c_prime=ctx.hash_to_g2(attribute) ** q)
        for q, attribute in zip(shares.shares, tree.leaf_attributes())
    )
    return Ciphertext(
        tree=tree,
        c_tilde=message * (pk.egg_alpha ** s),
        c=pk.h ** s,
        leaves=leaves,
    )


def finish_decryption(
    ctx: BilinearContext, ct: Ciphertext, d: G2Element, pairs: PairList
) -> GTElement:
    """C~ * e(C, D)^-1 * prod(pairs), evaluated as one pairing product."""
    pairs.append((ct.c.inverse(), d))
    try:
        return ct.c_tilde * ctx.pairing_product(pairs)
    except ContextMismatch as exc:
        raise DecryptionError(f"malformed decryption component: {exc}") from exc


class BswScheme:
    """
    The baseline scheme: setup, keygen, encrypt, decrypt and delegate.

    No revocation; it is the correctness and performance reference for the
    revocable schemes.
    """

    def __init__(self, ctx: Optional[BilinearContext] = None):
        self.ctx = ctx or get_context()

    def setup(self, rng: Optional[random.Random] = None) -> tuple[PublicKey, BswMasterKey]:
        rng = rng or default_rng()
        alpha, beta = sample_master_secrets(self.ctx, rng)
        pk = make_public_key(self.ctx, alpha, beta)
        return pk, BswMasterKey(beta=beta, g2_alpha=self.ctx.g2 ** alpha)

    def keygen(
        self,
        mk: BswMasterKey,
        attrs: Iterable[str],
        rng: Optional[random.Random] = None,
    ) -> BswSecretKey:
        attributes = require_attributes(attrs)
        rng = rng or default_rng()
        ctx = self.ctx
        r = ctx.random_scalar(rng)
        g2_r = ctx.g2 ** r
        d = (mk.g2_alpha * g2_r) ** ctx.field.inv(mk.beta)
        components = {}
        for attribute in sorted(attributes):
            r_j = ctx.random_scalar(rng)
            components[attribute] = BswAttributeKey(
                d=g2_r * (ctx.hash_to_g2(attribute) ** r_j),
                d_prime=ctx.g1 ** r_j,
            )
        logger.debug("issued baseline key with %d attributes", len(components))
        return BswSecretKey(d=d, components=components)

    def encrypt(
        self,
        pk: PublicKey,
        message: GTElement,
        tree: AccessTree,
        rng: Optional[random.Random] = None,
    ) -> Ciphertext:
        return encrypt_tree(self.ctx, pk, message, tree, rng)

    def select(self, ct: Ciphertext, sk: BswSecretKey) -> Union[SatisfyingSelection, NotSatisfied]:
        return select_satisfying_leaves(ct.tree, sk.attributes, self.ctx.field)

    def decrypt(self, ct: Ciphertext, sk: BswSecretKey) -> Union[GTElement, NotSatisfied]:
        """
        Recover the message if the key's attributes satisfy the tree.

        Per chosen leaf x with path coefficient c this contributes
        e(C_x^c, D_j) and e(D'_j^-c, C'_x); the blinding e(C, D) is divided
        out in the same product.
        """
        selection = self.select(ct, sk)
        if isinstance(selection, NotSatisfied):
            return selection
        attributes = ct.tree.leaf_attributes()
        pairs: PairList = []
        for leaf_id in selection.leaf_ids:
            c = selection.leaf_coefficients[leaf_id]
            leaf = ct.leaves[leaf_id]
            key = sk.components[attributes[leaf_id]]
            pairs.append((leaf.c ** c, key.d))
            pairs.append(((key.d_prime ** c).inverse(), leaf.c_prime))
        return finish_decryption(self.ctx, ct, sk.d, pairs)

    def delegate(
        self,
        sk: BswSecretKey,
        subset: Iterable[str],
        pk: PublicKey,
        rng: Optional[random.Random] = None,
    ) -> BswSecretKey:
        """Re-randomized key for a subset of sk's attributes."""
        attributes = require_subset(subset, sk.attributes)
        rng = rng or default_rng()
        ctx = self.ctx
        r_tilde = ctx.random_scalar(rng)
        g2_rt = ctx.g2 ** r_tilde
        components = {}
        for attribute in sorted(attributes):
            rt_k = ctx.random_scalar(rng)
            source = sk.components[attribute]
            components[attribute] = BswAttributeKey(
                d=source.d * g2_rt * (ctx.hash_to_g2(attribute) ** rt_k),
                d_prime=source.d_prime * (ctx.g1 ** rt_k),
            )
        return BswSecretKey(d=sk.d * (pk.f ** r_tilde), components=components)
