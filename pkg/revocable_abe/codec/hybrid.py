"""
Hybrid container: an ABE-encrypted random GT element keys AES-GCM over the payload.

Opening with a wrong GT element (revoked requester, stale delegated key,
tampered body) fails the GCM tag check and surfaces as DecryptionFailed
rather than garbage bytes.
"""
from __future__ import annotations

import logging
import os
import random
from typing import Optional, Union

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..core.errors import BundleMismatch, DecryptionFailed, NotSatisfied, PolicyNotSatisfied
from ..core.groups import BilinearContext, GTElement, get_context
from ..core.models import (
    AttrConversionBundle,
    BswSecretKey,
    ConversionBundle,
    DelegatedKeyMulti,
    DelegatedKeySingle,
    HybridContainer,
    PublicKey,
    SecretKey,
)
from ..core.policy import AccessTree
from ..schemes.attr_revocation import AttrRevocationScheme
from ..schemes.bsw import BswScheme, encrypt_tree
from ..schemes.delegation import DelegationScheme
from ..schemes.key_revocation import KeyRevocationScheme
from .wire import NONCE_SIZE, encode

logger = logging.getLogger(__name__)

KDF_LABEL = b"revocable-abe/hybrid/aes-256-gcm/v1"
KEY_SIZE = 32

AnyKey = Union[SecretKey, BswSecretKey, DelegatedKeySingle, DelegatedKeyMulti]
AnyBundle = Union[
    ConversionBundle,
    AttrConversionBundle,
    tuple[ConversionBundle, ConversionBundle],
    None,
]


def derive_key(ctx: BilinearContext, element: GTElement) -> bytes:
    """HKDF-SHA256 over the canonical GT encoding."""
    return HKDF(
        algorithm=hashes.SHA256(),
        length=KEY_SIZE,
        salt=None,
        info=KDF_LABEL,
    ).derive(ctx.encode_gt(element))


def seal_hybrid(
    pk: PublicKey,
    payload: bytes,
    tree: AccessTree,
    rng: Optional[random.Random] = None,
    ctx: Optional[BilinearContext] = None,
) -> HybridContainer:
    """
    Encrypt an arbitrary payload under an access tree.

    The encoded ABE ciphertext is the AEAD's associated data, so swapping
    ciphertexts between containers is detected as well.
    """
    ctx = ctx or get_context()
    seed = ctx.random_gt(rng)
    ciphertext = encrypt_tree(ctx, pk, seed, tree, rng)
    nonce = os.urandom(NONCE_SIZE)
    sealed = AESGCM(derive_key(ctx, seed)).encrypt(nonce, payload, encode(ciphertext, ctx))
    logger.debug("sealed %d bytes under %d-leaf policy", len(payload), tree.leaf_count)
    return HybridContainer(ciphertext=ciphertext, nonce=nonce, sealed=sealed)


def recover_seed(
    container: HybridContainer,
    key: AnyKey,
    bundle: AnyBundle = None,
    ctx: Optional[BilinearContext] = None,
) -> Union[GTElement, NotSatisfied]:
    """Run the decryption path matching the key and bundle types."""
    ctx = ctx or get_context()
    ct = container.ciphertext
    if isinstance(key, BswSecretKey):
        return BswScheme(ctx).decrypt(ct, key)
    if bundle is None:
        raise BundleMismatch("revocable keys need a conversion bundle")
    if isinstance(key, DelegatedKeySingle):
        return DelegationScheme(ctx).decrypt_delegated_single(ct, key, bundle)
    if isinstance(key, DelegatedKeyMulti):
        bundle_a, bundle_b = bundle if isinstance(bundle, tuple) else (bundle, None)
        return DelegationScheme(ctx).decrypt_delegated_multi(ct, key, bundle_a, bundle_b)
    if isinstance(bundle, AttrConversionBundle):
        return AttrRevocationScheme(ctx).decrypt(ct, key, bundle)
    return KeyRevocationScheme(ctx).decrypt(ct, key, bundle)


def open_hybrid(
    container: HybridContainer,
    key: AnyKey,
    bundle: AnyBundle = None,
    ctx: Optional[BilinearContext] = None,
) -> bytes:
    """
    Decrypt a container.

    Args:
        container: The sealed container
        key: Baseline, revocable or delegated key
        bundle: Proxy output (a pair of bundles for friend-of-friend keys)
        ctx: Pairing context

    Raises:
        PolicyNotSatisfied: the key's attributes do not satisfy the policy
        DecryptionFailed: wrong key seed or tampered container
    """
    ctx = ctx or get_context()
    seed = recover_seed(container, key, bundle, ctx)
    if isinstance(seed, NotSatisfied):
        raise PolicyNotSatisfied(seed.reason)
    try:
        return AESGCM(derive_key(ctx, seed)).decrypt(
            container.nonce, container.sealed, encode(container.ciphertext, ctx)
        )
    except InvalidTag:
        raise DecryptionFailed(
            "authentication failed: revoked key, stale bundle or tampered container"
        ) from None
