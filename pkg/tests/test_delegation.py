"""
Tests for single-authority and friend-of-friend delegation.
"""
import random

import pytest

from revocable_abe.core import NotSatisfied, get_context, parse_policy
from revocable_abe.core.errors import (
    BundleMismatch,
    DecryptionFailed,
    InvalidCoefficient,
    NotASubset,
    RequesterRevoked,
    UnknownUser,
)
from revocable_abe.core.models import RevocationList
from revocable_abe.schemes import DelegationScheme, KeyRevocationScheme


class TestSingleAuthorityDelegation:
    """Tests for delegate_single and decrypt_delegated_single."""

    def setup_method(self):
        self.ctx = get_context()
        self.rng = random.Random(79)
        self.scheme = KeyRevocationScheme(self.ctx)
        self.delegation = DelegationScheme(self.ctx)
        self.pk, self.mk = self.scheme.setup(2, self.rng)
        self.alice = self.scheme.keygen(self.mk, "alice", ["friend", "neighbor"], self.rng)
        self.scheme.keygen(self.mk, "bob", ["friend"], self.rng)
        self.pxk = self.scheme.proxy_rekey(None, self.mk, RevocationList(), self.rng)
        self.message = self.ctx.random_gt(self.rng)
        self.ct = self.scheme.encrypt(self.pk, self.message, parse_policy("friend"), self.rng)

    def delegate(self, pxk=None, versioned=True):
        version, lam = self.scheme.current_lambda(pxk or self.pxk, self.alice.user_id)
        return self.delegation.delegate_single(
            self.alice, ["friend"], self.pk, lam, self.rng,
            lambda_version=version if versioned else 0,
        )

    def bundle(self, pxk, dk):
        request = self.delegation.conversion_request(self.ct, dk)
        return self.scheme.convert(pxk, request, dk.user_id)

    def test_delegated_key_decrypts(self):
        """Test the delegatee decrypts through the delegator's identity."""
        dk = self.delegate()
        assert dk.user_id == self.alice.user_id
        assert dk.lambda_version == self.pxk.version
        assert self.delegation.decrypt_delegated_single(self.ct, dk, self.bundle(self.pxk, dk)) == self.message

    def test_revoking_delegator_stops_delegatee(self):
        """Test revoking alice also refuses conversions for her delegated key."""
        dk = self.delegate()
        revoked = self.scheme.proxy_rekey(
            None, self.mk, self.scheme.revocation_list(self.mk, ["alice"]), self.rng
        )
        with pytest.raises(RequesterRevoked):
            self.bundle(revoked, dk)

    def test_stale_version_refused(self):
        """Test a versioned key refuses bundles from a later proxy key."""
        dk = self.delegate()
        newer = self.scheme.proxy_rekey(
            None, self.mk, self.scheme.revocation_list(self.mk, ["bob"]), self.rng
        )
        with pytest.raises(DecryptionFailed):
            self.delegation.decrypt_delegated_single(self.ct, dk, self.bundle(newer, dk))

    def test_unversioned_key_garbles_after_rekey(self):
        """Test an unversioned key with a changed lambda yields a wrong element."""
        dk = self.delegate(versioned=False)
        newer = self.scheme.proxy_rekey(
            None, self.mk, self.scheme.revocation_list(self.mk, ["bob"]), self.rng
        )
        assert self.delegation.decrypt_delegated_single(self.ct, dk, self.bundle(newer, dk)) != self.message

    def test_redelegate_after_rekey(self):
        """Test re-delegating against the new proxy key restores access."""
        newer = self.scheme.proxy_rekey(
            None, self.mk, self.scheme.revocation_list(self.mk, ["bob"]), self.rng
        )
        dk = self.delegate(newer)
        assert self.delegation.decrypt_delegated_single(self.ct, dk, self.bundle(newer, dk)) == self.message

    def test_subset_checks(self):
        """Test delegating attributes not held, and a zero coefficient."""
        with pytest.raises(NotASubset):
            self.delegation.delegate_single(self.alice, ["colleague"], self.pk, 5, self.rng)
        with pytest.raises(InvalidCoefficient):
            self.delegation.delegate_single(self.alice, ["friend"], self.pk, 0, self.rng)

    def test_not_satisfied(self):
        """Test a subset key cannot decrypt what needs the dropped attribute."""
        dk = self.delegate()
        ct = self.scheme.encrypt(self.pk, self.message, parse_policy("neighbor"), self.rng)
        assert isinstance(self.delegation.conversion_request(ct, dk), NotSatisfied)


class TestFriendOfFriendDelegation:
    """Tests for keys B issues to C out of the key A issued to B."""

    def setup_method(self):
        self.ctx = get_context()
        self.rng = random.Random(83)
        self.scheme = KeyRevocationScheme(self.ctx)
        self.delegation = DelegationScheme(self.ctx)
        self.pk_a, self.mk_a = self.scheme.setup(1, self.rng)
        self.pk_b, self.mk_b = self.scheme.setup(1, self.rng)
        self.sk_b = self.scheme.keygen(self.mk_a, "bob", ["friend"], self.rng)
        self.carol = self.scheme.keygen(self.mk_b, "carol", ["placeholder"], self.rng).user_id
        self.message = self.ctx.random_gt(self.rng)
        self.ct = self.scheme.encrypt(self.pk_a, self.message, parse_policy("friend"), self.rng)
        self.dk = self.delegation.delegate_multi(
            self.sk_b, ["friend"], self.mk_b, self.carol, self.rng, pk_a=self.pk_a
        )

    def proxy_key(self, mk, revoked_name=None):
        revoked = self.scheme.revocation_list(mk, [revoked_name] if revoked_name else [])
        return self.scheme.proxy_rekey(None, mk, revoked, self.rng)

    def attempt(self, revoke_at_a, revoke_at_b):
        request = self.delegation.conversion_request(self.ct, self.dk)
        pxk_a = self.proxy_key(self.mk_a, "bob" if revoke_at_a else None)
        pxk_b = self.proxy_key(self.mk_b, "carol" if revoke_at_b else None)
        bundle_a = self.scheme.convert(pxk_a, request, self.dk.delegator_id)
        bundle_b = self.scheme.convert(pxk_b, request, self.dk.user_id)
        return self.delegation.decrypt_delegated_multi(self.ct, self.dk, bundle_a, bundle_b)

    def test_neither_revoked(self):
        """Test C decrypts when A has not revoked B and B has not revoked C."""
        assert self.attempt(False, False) == self.message

    def test_truth_table(self):
        """Test any revocation on either side refuses C."""
        for revoke_at_a, revoke_at_b in [(True, False), (False, True), (True, True)]:
            with pytest.raises(RequesterRevoked):
                self.attempt(revoke_at_a, revoke_at_b)

    def test_identities(self):
        """Test the key presents B to A's proxy and C to B's proxy."""
        assert self.dk.delegator_id == self.sk_b.user_id
        assert self.dk.user_id == self.carol

    def test_missing_bundle(self):
        """Test both bundles are required."""
        request = self.delegation.conversion_request(self.ct, self.dk)
        bundle_a = self.scheme.convert(self.proxy_key(self.mk_a), request, self.dk.delegator_id)
        with pytest.raises(BundleMismatch):
            self.delegation.decrypt_delegated_multi(self.ct, self.dk, bundle_a, None)

    def test_unregistered_delegatee(self):
        """Test C must be registered with B's authority."""
        with pytest.raises(UnknownUser):
            self.delegation.delegate_multi(self.sk_b, ["friend"], self.mk_b, 12345, self.rng)

    def test_without_rerandomization(self):
        """Test the key also works when A's public key is not supplied."""
        self.dk = self.delegation.delegate_multi(self.sk_b, ["friend"], self.mk_b, self.carol, self.rng)
        assert self.attempt(False, False) == self.message

    def test_single_leaf_of_disjunction(self):
        """Test C decrypts `x or fof` through exactly one leaf with one conversion at each proxy."""
        sk_b = self.scheme.keygen(self.mk_a, "bob", ["fof"], self.rng)
        dk = self.delegation.delegate_multi(sk_b, ["fof"], self.mk_b, self.carol, self.rng, pk_a=self.pk_a)
        ct = self.scheme.encrypt(self.pk_a, self.message, parse_policy("x or fof"), self.rng)
        selection = self.delegation.select(ct, dk)
        assert len(selection.leaf_ids) == 1
        assert selection.leaf_ids == (1,)
        request = self.delegation.conversion_request(ct, dk)
        assert [leaf_id for leaf_id, _ in request] == [1]
        bundle_a = self.scheme.convert(self.proxy_key(self.mk_a), request, dk.delegator_id)
        bundle_b = self.scheme.convert(self.proxy_key(self.mk_b), request, dk.user_id)
        assert set(bundle_a.converted) == {1}
        assert set(bundle_b.converted) == {1}
        assert self.delegation.decrypt_delegated_multi(ct, dk, bundle_a, bundle_b) == self.message
