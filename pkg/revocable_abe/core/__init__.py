"""
Core module for revocable ABE.
Contains field and group arithmetic, the policy language and key material models.
"""

from .algebra import (
    Polynomial,
    PrimeField,
    Share,
    eval_poly,
    interpolate_polynomial,
    lagrange_at,
    random_polynomial,
    reconstruct_secret,
)
from .attributes import normalize_attribute, normalize_attributes, split_attribute_list
from .groups import (
    BilinearContext,
    G1Element,
    G2Element,
    GTElement,
    PairingDescriptor,
    get_context,
)
from .policy import (
    AccessNode,
    AccessTree,
    LeafShareAssignment,
    SatisfyingSelection,
    format_policy,
    parse_policy,
    random_tree,
    select_satisfying_leaves,
    share_over_tree,
)
from .models import (
    AttrConversionBundle,
    AttrMasterKey,
    AttrProxyKey,
    AttributeKey,
    BswMasterKey,
    BswSecretKey,
    Ciphertext,
    ConversionBundle,
    DelegatedKeyMulti,
    DelegatedKeySingle,
    MasterKey,
    ProxyKey,
    PublicKey,
    RevocationList,
    RevocationMode,
    SecretKey,
    UserRegistry,
)
from .errors import AbeError, NotSatisfied

__all__ = [
    # Algebra
    "Polynomial",
    "PrimeField",
    "Share",
    "eval_poly",
    "interpolate_polynomial",
    "lagrange_at",
    "random_polynomial",
    "reconstruct_secret",
    # Attributes
    "normalize_attribute",
    "normalize_attributes",
    "split_attribute_list",
    # Groups
    "BilinearContext",
    "G1Element",
    "G2Element",
    "GTElement",
    "PairingDescriptor",
    "get_context",
    # Policy
    "AccessNode",
    "AccessTree",
    "LeafShareAssignment",
    "SatisfyingSelection",
    "format_policy",
    "parse_policy",
    "random_tree",
    "select_satisfying_leaves",
    "share_over_tree",
    # Models
    "AttrConversionBundle",
    "AttrMasterKey",
    "AttrProxyKey",
    "AttributeKey",
    "BswMasterKey",
    "BswSecretKey",
    "Ciphertext",
    "ConversionBundle",
    "DelegatedKeyMulti",
    "DelegatedKeySingle",
    "MasterKey",
    "ProxyKey",
    "PublicKey",
    "RevocationList",
    "RevocationMode",
    "SecretKey",
    "UserRegistry",
    # Errors
    "AbeError",
    "NotSatisfied",
]
