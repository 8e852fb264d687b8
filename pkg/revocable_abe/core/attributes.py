"""
Attribute name normalization shared by policies, keys and hashing.
"""
from __future__ import annotations

import re
from typing import Iterable

from .errors import InvalidAttribute

ATTRIBUTE_PATTERN = re.compile(r"^[a-z][a-z0-9_]*$")


def normalize_attribute(name: str) -> str:
    """Strip surrounding whitespace, lowercase, and validate an attribute name."""
    normalized = name.strip().lower()
    if not normalized:
        raise InvalidAttribute("attribute name is empty")
    if not ATTRIBUTE_PATTERN.match(normalized):
        raise InvalidAttribute(f"invalid attribute name: {name!r}")
    return normalized


def normalize_attributes(names: Iterable[str]) -> frozenset[str]:
    """Normalize a collection of attribute names into a set."""
    return frozenset(normalize_attribute(n) for n in names)


def split_attribute_list(text: str) -> frozenset[str]:
    """Parse a comma separated list such as 'friend, neighbor'."""
    return normalize_attributes(part for part in text.split(",") if part.strip())
