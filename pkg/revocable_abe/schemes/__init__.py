"""
Encryption schemes: the baseline, whole-key revocation, per-attribute
revocation and delegation.
"""

from .bsw import BswScheme, encrypt_tree
from .key_revocation import KeyRevocationScheme, convert_components
from .attr_revocation import AttrRevocationScheme, convert_attr_components
from .delegation import DelegationScheme

__all__ = [
    "BswScheme",
    "encrypt_tree",
    "KeyRevocationScheme",
    "convert_components",
    "AttrRevocationScheme",
    "convert_attr_components",
    "DelegationScheme",
]
