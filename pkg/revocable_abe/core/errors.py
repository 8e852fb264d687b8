"""
Exception hierarchy for the revocable ABE library.

Library code raises these; the CLI maps them to exit codes and the proxy
service maps them to HTTP statuses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


class AbeError(Exception):
    """Base class for every error raised by this package."""


# Algebra / groups

class ContextMismatch(AbeError, TypeError):
    """An element does not belong to the group the operation expects."""


class InvalidDegree(AbeError, ValueError):
    """Polynomial degree (or revocation capacity t) below 1."""


class DuplicatePoint(AbeError, ValueError):
    """Interpolation points are not pairwise distinct."""


class DegenerateTarget(AbeError, ValueError):
    """The interpolation target coincides with one of the points."""


class ReconstructionFailure(AbeError):
    """Too few or duplicate shares to recover the secret."""


class InvalidCoefficient(AbeError, ValueError):
    """A Lagrange coefficient that must be invertible is zero."""


# Policy

class InvalidAttribute(AbeError, ValueError):
    """Attribute name is empty or outside [a-z][a-z0-9_]*."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


class ParseError(AbeError, ValueError):
    """Policy text does not match the grammar."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ThresholdError(AbeError, ValueError):
    """Threshold gate with k outside 1..number of children."""

    def __init__(self, message: str, position: Optional[int] = None):
        super().__init__(message)
        self.position = position


# Schemes

class InvalidAttributeSet(AbeError, ValueError):
    """Key generation asked for an empty attribute set."""


class NotASubset(AbeError, ValueError):
    """Delegation subset is empty or not contained in the source key."""


class UnknownUser(AbeError, KeyError):
    """Identity or user name not present in the key authority registry."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown user"


class RevocationCapacityExceeded(AbeError):
    """More than t users in one revocation list."""


class InvalidIdentity(AbeError, ValueError):
    """An identity outside Z_p minus zero."""


class RequesterRevoked(AbeError):
    """The requester's identity is one of the proxy key's share points."""


class EmptyRequest(AbeError, ValueError):
    """A conversion request with no leaf components."""


class UnprovisionedAttribute(AbeError, KeyError):
    """The proxy key holds no share list for a requested attribute."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "attribute not provisioned"


class BundleMismatch(AbeError):
    """Conversion bundle does not cover the leaves decryption needs."""


class DecryptionError(AbeError):
    """Ciphertext or key components are malformed for decryption."""


class DecryptionFailed(AbeError):
    """Decryption ran but did not recover the plaintext (revoked or tampered)."""


class AttributeRevoked(DecryptionFailed):
    """The policy is only satisfiable through attributes revoked for this user."""


class PolicyNotSatisfied(AbeError):
    """Raised form of NotSatisfied, used where a value cannot be returned."""


class StaleProxyKey(AbeError):
    """A proxy key whose version does not advance the installed one."""


# Codec

class MalformedInput(AbeError, ValueError):
    """Bytes do not parse: bad magic, tag, version or length."""


class InvalidComponent(AbeError, ValueError):
    """Bytes parse but violate a type invariant (group membership, counts)."""


# Configuration

class ConfigError(AbeError):
    """Proxy service configuration is incomplete or inconsistent."""


class ProxyRequestError(AbeError):
    """The proxy answered with an error status or could not be reached."""

    def __init__(self, message: str, status: Optional[int] = None, code: Optional[str] = None):
        super().__init__(message)
        self.status = status
        self.code = code


@dataclass(frozen=True)
class NotSatisfied:
    """Value returned when an attribute set does not satisfy a policy."""
    reason: str = "attributes do not satisfy the policy"

    def __bool__(self) -> bool:
        return False
