"""
Shared fixtures for the revocable-abe test suite.
"""
import random

import pytest

from revocable_abe.core import PrimeField, get_context

SMALL_PRIME = 101


@pytest.fixture(scope="session")
def ctx():
    """The BN254 pairing context."""
    return get_context()


@pytest.fixture
def rng():
    """Seeded randomness so failures reproduce."""
    return random.Random(20120601)


@pytest.fixture
def small_field():
    """Z_101, small enough for exhaustive oracles."""
    return PrimeField(SMALL_PRIME)
