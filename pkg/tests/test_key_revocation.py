"""
Tests for whole-key revocation through the conversion proxy.
"""
import random

import pytest

from revocable_abe.core import (
    PrimeField,
    SecretKey,
    Share,
    get_context,
    parse_policy,
    random_polynomial,
)
from revocable_abe.core.errors import (
    BundleMismatch,
    EmptyRequest,
    InvalidDegree,
    InvalidIdentity,
    NotSatisfied,
    RequesterRevoked,
    RevocationCapacityExceeded,
    UnknownUser,
)
from revocable_abe.core.models import ConversionBundle, MasterKey, RevocationList
from revocable_abe.schemes import KeyRevocationScheme
from revocable_abe.schemes.authority import conversion_exponent, padded_shares

POLICY = "friend and neighbor"


class TestConversionExponent:
    """Exhaustive checks of the proxy exponent over Z_101."""

    def setup_method(self):
        self.field = PrimeField(101)
        self.rng = random.Random(67)

    def test_completes_interpolation_for_every_identity(self):
        """Test lambda_k P(u) + exponent = P(0) for every identity off the share points."""
        for t in (1, 2, 3):
            poly = random_polynomial(self.field, t, self.rng)
            mk = MasterKey(polynomial=poly)
            shares = padded_shares(self.field, mk, poly, RevocationList(), t, self.rng)
            points = {s.x for s in shares}
            for u in range(1, 101):
                if u in points:
                    with pytest.raises(RequesterRevoked):
                        conversion_exponent(self.field, shares, u)
                    continue
                lambda_k, exponent = conversion_exponent(self.field, shares, u)
                assert (lambda_k * poly(u) + exponent) % 101 == poly(0)

    def test_revoked_shares_come_first(self):
        """Test revoked identities occupy the first share slots."""
        poly = random_polynomial(self.field, 3, self.rng)
        mk = MasterKey(polynomial=poly)
        mk.registry.register("alice", 7)
        mk.registry.register("bob", 9)
        shares = padded_shares(self.field, mk, poly, RevocationList((9, 7)), 3, self.rng)
        assert [s.x for s in shares[:2]] == [9, 7]
        assert len({s.x for s in shares}) == 3
        assert shares[2].x not in (7, 9)

    def test_dummies_on_a_coset(self):
        """Test dummies are consecutive coset points, lie on P and are recorded."""
        poly = random_polynomial(self.field, 4, self.rng)
        mk = MasterKey(polynomial=poly)
        mk.registry.register("alice", 7)
        shares = padded_shares(self.field, mk, poly, RevocationList((7,)), 4, self.rng)
        w = self.field.root_of_unity(4)
        dummies = [s.x for s in shares[1:]]
        assert dummies[1] == dummies[0] * w % 101
        assert dummies[2] == dummies[1] * w % 101
        assert all(s.y == poly(s.x) for s in shares)
        assert all(mk.point_in_use(x) for x in dummies)

    def test_fallback_without_subgroup(self):
        """Test a field whose p - 1 lacks the needed power of two still pads with fresh points."""
        field = PrimeField(103)
        poly = random_polynomial(field, 3, self.rng)
        mk = MasterKey(polynomial=poly)
        first = padded_shares(field, mk, poly, RevocationList(), 3, self.rng)
        second = padded_shares(field, mk, poly, RevocationList(), 3, self.rng)
        xs = [s.x for s in first + second]
        assert len(set(xs)) == 6
        assert all(s.y == poly(s.x) for s in first + second)

    def test_large_threshold_over_group_order(self):
        """Test a t = 200 key with revoked users completes interpolation for a fresh identity."""
        field = get_context().field
        poly = random_polynomial(field, 200, self.rng)
        mk = MasterKey(polynomial=poly)
        for i in range(1, 6):
            mk.registry.register(f"user{i}", i)
        shares = padded_shares(field, mk, poly, RevocationList((1, 2, 3, 4, 5)), 200, self.rng)
        assert [s.x for s in shares[:5]] == [1, 2, 3, 4, 5]
        assert all(s.y == poly(s.x) for s in shares)
        lambda_k, exponent = conversion_exponent(field, shares, 6)
        assert (lambda_k * poly(6) + exponent) % field.modulus == poly(0)
        with pytest.raises(RequesterRevoked):
            conversion_exponent(field, shares, 3)

    def test_identity_zero(self):
        """Test identity 0 is malformed, not revoked."""
        with pytest.raises(InvalidIdentity):
            conversion_exponent(self.field, [Share(3, 5)], 0)


class TestKeyRevocationScheme:
    """Tests for keygen, rekey, convert and decrypt."""

    def setup_method(self):
        self.ctx = get_context()
        self.rng = random.Random(71)
        self.scheme = KeyRevocationScheme(self.ctx)
        self.pk, self.mk = self.scheme.setup(2, self.rng)
        self.alice = self.scheme.keygen(self.mk, "alice", ["friend", "neighbor"], self.rng)
        self.bob = self.scheme.keygen(self.mk, "bob", ["friend", "neighbor"], self.rng)
        self.message = self.ctx.random_gt(self.rng)
        self.ct = self.scheme.encrypt(self.pk, self.message, parse_policy(POLICY), self.rng)

    def rekey(self, *names):
        revoked = self.scheme.revocation_list(self.mk, names)
        return self.scheme.proxy_rekey(None, self.mk, revoked, self.rng)

    def bundle_for(self, pxk, sk, user_id=None):
        request = self.scheme.conversion_request(self.ct, sk)
        return self.scheme.convert(pxk, request, sk.user_id if user_id is None else user_id)

    def test_setup_rejects_zero_capacity(self):
        """Test t must be at least one."""
        with pytest.raises(InvalidDegree):
            self.scheme.setup(0, self.rng)

    def test_identities_distinct_and_stable(self):
        """Test users get distinct identities and re-issue keeps them."""
        assert self.alice.user_id != self.bob.user_id
        again = self.scheme.keygen(self.mk, "alice", ["friend"], self.rng)
        assert again.user_id == self.alice.user_id

    def test_unrevoked_user_decrypts(self):
        """Test decryption with an empty revocation list."""
        pxk = self.rekey()
        assert pxk.t == 2
        assert self.scheme.decrypt(self.ct, self.alice, self.bundle_for(pxk, self.alice)) == self.message

    def test_revoked_user_refused(self):
        """Test the proxy refuses a revoked requester while others still decrypt."""
        pxk = self.rekey("alice")
        assert pxk.points[0] == self.alice.user_id
        with pytest.raises(RequesterRevoked):
            self.bundle_for(pxk, self.alice)
        assert self.scheme.decrypt(self.ct, self.bob, self.bundle_for(pxk, self.bob)) == self.message

    def test_unrevoke(self):
        """Test a rekey without the user restores access and advances the version."""
        first = self.rekey("alice")
        second = self.rekey()
        assert second.version == first.version + 1
        assert self.mk.revocation_state == RevocationList()
        assert self.scheme.decrypt(self.ct, self.alice, self.bundle_for(second, self.alice)) == self.message

    def test_capacity(self):
        """Test revoking more than t users."""
        self.scheme.keygen(self.mk, "carol", ["friend"], self.rng)
        with pytest.raises(RevocationCapacityExceeded):
            self.rekey("alice", "bob", "carol")

    def test_unknown_user(self):
        """Test revoking a name the authority never issued."""
        with pytest.raises(UnknownUser):
            self.rekey("mallory")

    def test_bundle_for_other_identity(self):
        """Test a bundle converted for bob does not decrypt for alice."""
        pxk = self.rekey()
        bundle = self.bundle_for(pxk, self.alice, user_id=self.bob.user_id)
        assert self.scheme.decrypt(self.ct, self.alice, bundle) != self.message

    def test_collusion_across_identities(self):
        """Test a key assembled from alice's and bob's components fails."""
        pxk = self.rekey()
        merged = SecretKey(
            user_id=self.alice.user_id,
            d=self.alice.d,
            components={
                "friend": self.alice.components["friend"],
                "neighbor": self.bob.components["neighbor"],
            },
        )
        bundle = self.bundle_for(pxk, merged)
        assert self.scheme.decrypt(self.ct, merged, bundle) != self.message

    def test_bundle_missing_leaf(self):
        """Test a bundle without every chosen leaf is rejected."""
        pxk = self.rekey()
        full = self.bundle_for(pxk, self.alice)
        partial = ConversionBundle(full.version, full.lambda_k, {0: full.converted[0]})
        with pytest.raises(BundleMismatch):
            self.scheme.decrypt(self.ct, self.alice, partial)

    def test_not_satisfied(self):
        """Test a key missing an attribute gets NotSatisfied before any proxy call."""
        sk = self.scheme.keygen(self.mk, "dave", ["friend"], self.rng)
        assert isinstance(self.scheme.conversion_request(self.ct, sk), NotSatisfied)

    def test_empty_request(self):
        """Test converting nothing."""
        with pytest.raises(EmptyRequest):
            self.scheme.convert(self.rekey(), [], self.alice.user_id)

    def test_current_lambda(self):
        """Test current_lambda reports the version and the bundle coefficient."""
        pxk = self.rekey()
        version, lam = self.scheme.current_lambda(pxk, self.alice.user_id)
        assert version == pxk.version
        assert lam == self.bundle_for(pxk, self.alice).lambda_k

    def test_node_values_agree_under_or(self):
        """Test both leaves of an OR gate decrypt to the same node value."""
        ct = self.scheme.encrypt(self.pk, self.message, parse_policy("friend or neighbor"), self.rng)
        pxk = self.rekey()
        bundle = self.scheme.convert(
            pxk, [(0, ct.leaves[0].c_prime), (1, ct.leaves[1].c_prime)], self.alice.user_id
        )
        left = self.scheme.decrypt_node(ct, self.alice, bundle, 0)
        right = self.scheme.decrypt_node(ct, self.alice, bundle, 1)
        assert left == right
        assert not left.is_identity()
