"""
Access delegation for whole-key revocation.

Single authority: a key holder derives a subset key using f = g2^(1/beta) and
the proxy's current lambda_k for their identity; the delegatee presents the
delegator's identity to the proxy.

Two authorities (friend of friend): B holds a key issued by A and a master key
of their own; the key B issues to C needs both A's proxy (converting for B)
and B's proxy (converting for C), so either revocation stops C.
"""
from __future__ import annotations

import logging
import random
from typing import Iterable, Optional, Union

from ..core.algebra import Scalar, default_rng
from ..core.errors import (
    BundleMismatch,
    DecryptionFailed,
    InvalidCoefficient,
    NotSatisfied,
    UnknownUser,
)
from ..core.groups import BilinearContext, G2Element, GTElement, get_context
from ..core.models import (
    AttributeKey,
    Ciphertext,
    ConversionBundle,
    DelegatedKeyMulti,
    DelegatedKeySingle,
    MasterKey,
    MultiAttributeKey,
    PublicKey,
    SecretKey,
)
from ..core.policy import SatisfyingSelection, select_satisfying_leaves
from .bsw import PairList, finish_decryption, require_subset
from .key_revocation import leaf_pairs, require_leaves

logger = logging.getLogger(__name__)

DelegatedKey = Union[DelegatedKeySingle, DelegatedKeyMulti]


class DelegationScheme:
    """Derive and use delegated keys."""

    def __init__(self, ctx: Optional[BilinearContext] = None):
        self.ctx = ctx or get_context()

    def delegate_single(
        self,
        sk: SecretKey,
        subset: Iterable[str],
        pk: PublicKey,
        lambda_k: Scalar,
        rng: Optional[random.Random] = None,
        lambda_version: int = 0,
    ) -> DelegatedKeySingle:
        """
        Subset key under the same authority.

        Args:
            sk: Delegator's key
            subset: Attributes to pass on, a nonempty subset of sk's
            pk: Public key (supplies f)
            lambda_k: Delegator's current coefficient from the proxy
            rng: Randomness source
            lambda_version: Proxy-key version lambda_k was obtained for

        Returns:
            D~ = D f^r~, D~_j = D_j g2^r~ H(j)^r~_j, D~''_j = D''_j g1^(r~_j / lambda_k)
        """
        attributes = require_subset(subset, sk.attributes)
        ctx = self.ctx
        if lambda_k % ctx.order == 0:
            raise InvalidCoefficient("lambda_k must be nonzero")
        rng = rng or default_rng()
        inv_lambda = ctx.field.inv(lambda_k)
        r_tilde = ctx.random_scalar(rng)
        g2_rt = ctx.g2 ** r_tilde
        components = {}
        for attribute in sorted(attributes):
            rt_j = ctx.random_scalar(rng)
            source = sk.components[attribute]
            components[attribute] = AttributeKey(
                d=source.d * g2_rt * (ctx.hash_to_g2(attribute) ** rt_j),
                d_prime=source.d_prime,
                d_dprime=source.d_dprime * (ctx.g1 ** (rt_j * inv_lambda)),
            )
        logger.info(
            "delegated %d attributes against proxy version %d", len(components), lambda_version
        )
        return DelegatedKeySingle(
            user_id=sk.user_id,
            lambda_version=lambda_version,
            d=sk.d * (pk.f ** r_tilde),
            components=components,
        )

    def delegate_multi(
        self,
        sk_from_a: SecretKey,
        subset: Iterable[str],
        mk_b: MasterKey,
        c_identity: Scalar,
        rng: Optional[random.Random] = None,
        pk_a: Optional[PublicKey] = None,
    ) -> DelegatedKeyMulti:
        """
        Key from B to C out of the key A issued to B.

        D~''_j = D''_j^(1/P_B(0)) and D~'''_j = D''_j^(P_B(C)/P_B(0)). When A's
        public key is given, r is re-randomized as well.

        Raises:
            NotASubset: subset empty or not held
            UnknownUser: C is not registered with B
        """
        attributes = require_subset(subset, sk_from_a.attributes)
        if not mk_b.registry.has_identity(c_identity):
            raise UnknownUser("delegatee is not registered with the delegating authority")
        ctx = self.ctx
        p_b0 = mk_b.polynomial(0)
        if p_b0 == 0:
            raise InvalidCoefficient("P_B(0) is zero")
        inv_p0 = ctx.field.inv(p_b0)
        tprime_exp = (mk_b.polynomial(c_identity) * inv_p0) % ctx.order

        d = sk_from_a.d
        g2_rt = None
        if pk_a is not None:
            r_tilde = ctx.random_scalar(rng or default_rng())
            d = d * (pk_a.f ** r_tilde)
            g2_rt = ctx.g2 ** r_tilde

        components = {}
        for attribute in sorted(attributes):
            source = sk_from_a.components[attribute]
            components[attribute] = MultiAttributeKey(
                d=source.d if g2_rt is None else source.d * g2_rt,
                d_prime=source.d_prime,
                d_dprime=source.d_dprime ** inv_p0,
                d_tprime=source.d_dprime ** tprime_exp,
            )
        logger.info("issued friend-of-friend key with %d attributes", len(components))
        return DelegatedKeyMulti(
            delegator_id=sk_from_a.user_id,
            user_id=c_identity,
            d=d,
            components=components,
        )

    def select(self, ct: Ciphertext, dk: DelegatedKey) -> Union[SatisfyingSelection, NotSatisfied]:
        return select_satisfying_leaves(ct.tree, dk.attributes, self.ctx.field)

    def conversion_request(
        self, ct: Ciphertext, dk: DelegatedKey
    ) -> Union[list[tuple[int, G2Element]], NotSatisfied]:
        """C'_y of the minimal selection; the same list goes to each proxy involved."""
        selection = self.select(ct, dk)
        if isinstance(selection, NotSatisfied):
            return selection
        return [(leaf_id, ct.leaves[leaf_id].c_prime) for leaf_id in selection.leaf_ids]

    def decrypt_delegated_single(
        self,
        ct: Ciphertext,
        dk: DelegatedKeySingle,
        bundle: ConversionBundle,
        lambda_k: Optional[Scalar] = None,
    ) -> Union[GTElement, NotSatisfied]:
        """
        Decrypt with a single-authority delegated key.

        `bundle` must be converted for the delegator's identity. lambda_k
        defaults to the bundle's.

        Raises:
            DecryptionFailed: the bundle comes from a different proxy-key
                version than the one the key was derived against
            BundleMismatch: a chosen leaf is missing from the bundle
        """
        selection = self.select(ct, dk)
        if isinstance(selection, NotSatisfied):
            return selection
        if dk.lambda_version and bundle.version != dk.lambda_version:
            raise DecryptionFailed(
                f"delegated key was derived for proxy version {dk.lambda_version}, "
                f"bundle is version {bundle.version}; re-delegate"
            )
        require_leaves(bundle.converted, selection.leaf_ids)
        lam = bundle.lambda_k if lambda_k is None else lambda_k
        attributes = ct.tree.leaf_attributes()
        pairs: PairList = []
        for leaf_id in selection.leaf_ids:
            leaf = ct.leaves[leaf_id]
            pairs.extend(leaf_pairs(
                dk.components[attributes[leaf_id]], leaf.c, leaf.c_prime,
                bundle.converted[leaf_id], lam, selection.leaf_coefficients[leaf_id],
            ))
        return finish_decryption(self.ctx, ct, dk.d, pairs)

    def decrypt_delegated_multi(
        self,
        ct: Ciphertext,
        dk: DelegatedKeyMulti,
        bundle_a: Optional[ConversionBundle],
        bundle_b: Optional[ConversionBundle],
    ) -> Union[GTElement, NotSatisfied]:
        """
        Decrypt with a friend-of-friend key.

        Args:
            ct: Ciphertext under A's public key
            dk: Key B issued to C
            bundle_a: A's proxy output for identity B (C''_xA, lambda_B)
            bundle_b: B's proxy output for identity C (C''_xB, lambda_C)

        Raises:
            BundleMismatch: a bundle is missing or does not cover the chosen leaves
        """
        if bundle_a is None or bundle_b is None:
            raise BundleMismatch("friend-of-friend decryption needs bundles from both proxies")
        selection = self.select(ct, dk)
        if isinstance(selection, NotSatisfied):
            return selection
        require_leaves(bundle_a.converted, selection.leaf_ids)
        require_leaves(bundle_b.converted, selection.leaf_ids)
        lambda_b = bundle_a.lambda_k
        lambda_bc = (bundle_a.lambda_k * bundle_b.lambda_k) % self.ctx.order
        attributes = ct.tree.leaf_attributes()
        pairs: PairList = []
        for leaf_id in selection.leaf_ids:
            c = selection.leaf_coefficients[leaf_id]
            key = dk.components[attributes[leaf_id]]
            leaf = ct.leaves[leaf_id]
            pairs.append((leaf.c ** c, key.d))
            pairs.append(((key.d_dprime ** (lambda_b * c)).inverse(), bundle_b.converted[leaf_id]))
            pairs.append(((key.d_tprime ** (lambda_bc * c)).inverse(), leaf.c_prime))
            pairs.append(((key.d_prime ** c).inverse(), bundle_a.converted[leaf_id]))
        return finish_decryption(self.ctx, ct, dk.d, pairs)
