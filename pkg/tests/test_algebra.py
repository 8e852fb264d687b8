"""
Tests for field arithmetic, secret sharing and Lagrange interpolation.
"""
import random
from itertools import combinations

import pytest

from revocable_abe.core import (
    Polynomial,
    PrimeField,
    Share,
    eval_poly,
    get_context,
    interpolate_polynomial,
    lagrange_at,
    random_polynomial,
    reconstruct_secret,
)
from revocable_abe.core.algebra import batch_inverse, eval_on_coset, extend_at_zero, ntt
from revocable_abe.core.errors import (
    DegenerateTarget,
    DuplicatePoint,
    InvalidDegree,
    ReconstructionFailure,
)
from tests.helpers import naive_lagrange

P = 101


class TestPrimeField:
    """Tests for PrimeField helpers."""

    def setup_method(self):
        self.field = PrimeField(P)

    def test_byte_width(self):
        """Test the canonical width follows the modulus size."""
        assert self.field.byte_width == 1
        assert PrimeField(2 ** 255 - 19).byte_width == 32

    def test_inverse(self):
        """Test inverses multiply to one."""
        for value in range(1, P):
            assert (value * self.field.inv(value)) % P == 1

    def test_inverse_of_zero(self):
        """Test zero has no inverse."""
        with pytest.raises(ZeroDivisionError):
            self.field.inv(0)

    def test_random_scalar_nonzero(self):
        """Test random scalars stay in 1..p-1 by default."""
        rng = random.Random(3)
        values = {self.field.random_scalar(rng) for _ in range(2000)}
        assert 0 not in values
        assert max(values) < P

    def test_root_of_unity(self):
        """Test a primitive 4th root exists mod 101 and an 8th root does not."""
        w = self.field.root_of_unity(4)
        assert pow(w, 4, P) == 1
        assert pow(w, 2, P) == P - 1
        assert self.field.root_of_unity(8) is None
        assert self.field.root_of_unity(3) is None
        assert self.field.root_of_unity(1) == 1

    def test_root_of_unity_group_order(self):
        """Test the pairing group order has a primitive 1024th root."""
        field = get_context().field
        w = field.root_of_unity(1024)
        assert pow(w, 1024, field.modulus) == 1
        assert pow(w, 512, field.modulus) == field.modulus - 1


class TestEvalPoly:
    """Tests for Horner evaluation."""

    def setup_method(self):
        self.field = PrimeField(P)

    def test_linear_examples(self):
        """Test P(x) = 3 + 2x at 0 and 2."""
        poly = Polynomial((3, 2), self.field)
        assert eval_poly(poly, 0) == 3
        assert eval_poly(poly, 2) == 7
        assert poly(2) == 7

    def test_matches_term_sum(self):
        """Test Horner agrees with the term-by-term sum for every x in Z_101."""
        rng = random.Random(5)
        poly = random_polynomial(self.field, 5, rng)
        for x in range(P):
            expected = sum(c * x ** i for i, c in enumerate(poly.coefficients)) % P
            assert eval_poly(poly, x) == expected

    def test_memoized(self):
        """Test memoized evaluation agrees with Horner and leaves equality alone."""
        poly = random_polynomial(self.field, 4, random.Random(6))
        for x in (1, 7, 7, 108):
            assert poly.memoized(x) == poly(x)
        assert poly == Polynomial(poly.coefficients, self.field)


class TestRandomPolynomial:
    """Tests for random_polynomial."""

    def setup_method(self):
        self.field = PrimeField(P)
        self.rng = random.Random(11)

    def test_fixed_constant(self):
        """Test the constant term is forced when given."""
        poly = random_polynomial(self.field, 3, self.rng, fixed_constant=42)
        assert poly(0) == 42
        assert poly.constant == 42

    def test_degree(self):
        """Test the requested degree is kept."""
        assert random_polynomial(self.field, 3, self.rng).degree == 3

    def test_distinct_samples(self):
        """Test two samples over the full field differ."""
        big = PrimeField(2 ** 127 - 1)
        assert random_polynomial(big, 3, self.rng) != random_polynomial(big, 3, self.rng)

    def test_degree_zero_rejected(self):
        """Test degree below one is rejected."""
        with pytest.raises(InvalidDegree):
            random_polynomial(self.field, 0, self.rng)


class TestLagrange:
    """Tests for lagrange_at."""

    def setup_method(self):
        self.field = PrimeField(P)

    def test_two_points_at_zero(self):
        """Test xs=[1,2] at 0 gives [2, p-1]."""
        assert lagrange_at(self.field, [1, 2], 0) == [2, P - 1]

    def test_requester_companion_coefficient(self):
        """Test the coefficient of an added point 3 next to share point 2."""
        assert lagrange_at(self.field, [2], 3) == [1]
        assert lagrange_at(self.field, [2, 3], 0) == [3, P - 2]

    def test_duplicate_points(self):
        """Test duplicate points are rejected."""
        with pytest.raises(DuplicatePoint):
            lagrange_at(self.field, [4, 4], 0)

    def test_target_among_points(self):
        """Test a target equal to a point is rejected."""
        with pytest.raises(DegenerateTarget):
            lagrange_at(self.field, [1, 2], 2)

    def test_interpolation_oracle(self):
        """Test weighted evaluations reproduce P(target) for every point set of size t+1."""
        rng = random.Random(17)
        for degree in range(1, 4):
            poly = random_polynomial(self.field, degree, rng)
            for xs in combinations(range(1, 9), degree + 1):
                target = next(x for x in range(P) if x not in xs)
                lambdas = lagrange_at(self.field, xs, target)
                value = sum(l * poly(x) for l, x in zip(lambdas, xs)) % P
                assert value == poly(target)

    def test_zero_point_rejected(self):
        """Test x = 0 is refused as an interpolation point."""
        with pytest.raises(DuplicatePoint):
            lagrange_at(self.field, [0, 2], 5)
        with pytest.raises(DuplicatePoint):
            lagrange_at(self.field, [3, P], 0)

    def test_geometric_runs_match_oracle(self):
        """Test weights at zero for point sets ending in a geometric run, with and without a head."""
        for q in (2, 3, 10, 100):
            for c in (1, 7, 55):
                for m in range(2, 6):
                    run = [c * pow(q, k, P) % P for k in range(m)]
                    for head in ([], [4], [4, 9], [13, 29, 44]):
                        xs = head + run
                        if len(set(xs)) != len(xs):
                            continue
                        assert lagrange_at(self.field, xs, 0) == naive_lagrange(P, xs, 0)

    def test_coset_points_over_group_order(self):
        """Test 64 coset points plus a revoked head over the pairing group order."""
        field = get_context().field
        p = field.modulus
        w = field.root_of_unity(64)
        run = [123456789 * pow(w, k, p) % p for k in range(60)]
        xs = [5, 17, 99] + run
        assert lagrange_at(field, xs, 0) == naive_lagrange(p, xs, 0)

    def test_extend_at_zero(self):
        """Test adding a requester point reproduces the weights over the larger set."""
        rng = random.Random(19)
        poly = random_polynomial(self.field, 3, rng)
        xs = [3, 6, 12]
        weighted = [l * poly(x) % P for l, x in zip(lagrange_at(self.field, xs, 0), xs)]
        for u in (1, 2, 50, 100):
            lambda_u, total = extend_at_zero(self.field, xs, weighted, u)
            full = naive_lagrange(P, xs + [u], 0)
            assert lambda_u == full[-1]
            assert total == sum(l * poly(x) for l, x in zip(full, xs)) % P
            assert (lambda_u * poly(u) + total) % P == poly(0)


class TestTransforms:
    """Tests for batch inversion, the NTT and coset evaluation."""

    def setup_method(self):
        self.field = PrimeField(P)
        self.rng = random.Random(29)

    def test_batch_inverse(self):
        """Test every batched inverse matches the single inversion."""
        values = list(range(1, 30)) + [P + 5]
        assert batch_inverse(self.field, values) == [pow(v, -1, P) for v in values]
        assert batch_inverse(self.field, []) == []

    def test_batch_inverse_zero(self):
        """Test a zero anywhere in the batch is refused."""
        with pytest.raises(ZeroDivisionError):
            batch_inverse(self.field, [3, P, 4])

    def test_ntt_matches_horner(self):
        """Test the transform evaluates at the powers of the root."""
        w = self.field.root_of_unity(4)
        coefficients = (5, 0, 17, 99)
        values = ntt(self.field, coefficients, w)
        poly = Polynomial(coefficients, self.field)
        assert values == [poly(pow(w, i, P)) for i in range(4)]

    def test_ntt_length(self):
        """Test a length that is not a power of two is refused."""
        with pytest.raises(ValueError):
            ntt(self.field, [1, 2, 3], 1)

    def test_coset_folds_high_degree(self):
        """Test coset evaluation of a degree-6 polynomial on a 4-point coset."""
        w = self.field.root_of_unity(4)
        poly = random_polynomial(self.field, 6, self.rng)
        for offset in (1, 3, 58):
            expected = [poly(offset * pow(w, i, P)) for i in range(4)]
            assert eval_on_coset(poly, offset, w, 4) == expected

    def test_coset_over_group_order(self):
        """Test a degree-40 polynomial on a 64-point coset of the pairing group order."""
        field = get_context().field
        p = field.modulus
        w = field.root_of_unity(64)
        poly = random_polynomial(field, 40, self.rng)
        values = eval_on_coset(poly, 987654321, w, 64)
        assert values == [poly(987654321 * pow(w, i, p)) for i in range(64)]


class TestReconstruction:
    """Tests for reconstruct_secret and interpolate_polynomial."""

    def setup_method(self):
        self.field = PrimeField(P)
        self.rng = random.Random(23)

    def test_linear_shares(self):
        """Test shares (1,5),(2,7) of 3+2x give 3."""
        assert reconstruct_secret(self.field, [Share(1, 5), Share(2, 7)]) == 3

    def test_constant_polynomial(self):
        """Test one share of a constant polynomial is the constant."""
        assert reconstruct_secret(self.field, [Share(4, 9)]) == 9

    def test_every_subset_agrees(self):
        """Test every 5-subset of 8 shares of a degree-4 polynomial gives P(0)."""
        poly = random_polynomial(self.field, 4, self.rng)
        shares = [Share(x, poly(x)) for x in range(1, 9)]
        for subset in combinations(shares, 5):
            assert reconstruct_secret(self.field, subset, threshold=5) == poly(0)

    def test_too_few_shares(self):
        """Test reconstruction refuses fewer shares than the threshold."""
        with pytest.raises(ReconstructionFailure):
            reconstruct_secret(self.field, [Share(1, 5)], threshold=2)

    def test_duplicate_shares(self):
        """Test duplicate x-coordinates fail reconstruction."""
        with pytest.raises(ReconstructionFailure):
            reconstruct_secret(self.field, [Share(1, 5), Share(1, 5)])

    def test_zero_x_rejected(self):
        """Test x = 0 is reserved for the secret."""
        with pytest.raises(ValueError):
            Share(0, 3)

    def test_t_shares_rarely_give_secret(self):
        """Test t shares interpolated at degree t-1 almost never hit P(0)."""
        hits = 0
        trials = 200
        for _ in range(trials):
            poly = random_polynomial(self.field, 3, self.rng)
            xs = self.rng.sample(range(1, P), 3)
            if reconstruct_secret(self.field, [Share(x, poly(x)) for x in xs]) == poly(0):
                hits += 1
        assert hits <= 10

    def test_interpolate_recovers_coefficients(self):
        """Test exact interpolation through t+1 points returns the polynomial."""
        for degree in range(1, 6):
            poly = random_polynomial(self.field, degree, self.rng)
            points = [(x, poly(x)) for x in range(1, degree + 2)]
            assert interpolate_polynomial(self.field, points).coefficients == poly.coefficients

    def test_interpolate_duplicate_points(self):
        """Test interpolation rejects repeated x."""
        with pytest.raises(DuplicatePoint):
            interpolate_polynomial(self.field, [(1, 2), (1, 3)])
