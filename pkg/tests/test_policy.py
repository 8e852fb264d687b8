"""
Tests for policy parsing, formatting, sharing and leaf selection.
"""
import random
from itertools import chain, combinations

import pytest

from revocable_abe.core import (
    AccessNode,
    AccessTree,
    PrimeField,
    format_policy,
    parse_policy,
    random_tree,
    select_satisfying_leaves,
    share_over_tree,
)
from revocable_abe.core.errors import InvalidAttribute, NotSatisfied, ParseError, ThresholdError
from tests.helpers import brute_force_minimum

P = 101
UNIVERSE = ["a", "b", "c", "d"]


def all_subsets(items):
    return chain.from_iterable(combinations(items, r) for r in range(len(items) + 1))


class TestParsePolicy:
    """Tests for parse_policy."""

    def test_and(self):
        """Test AND becomes a k=n gate."""
        tree = parse_policy("friend and neighbor")
        assert tree.root.threshold == 2
        assert tree.leaf_attributes() == ("friend", "neighbor")

    def test_or_flattened(self):
        """Test a chain of ORs becomes one k=1 gate."""
        tree = parse_policy("a or b or c")
        assert tree.root.threshold == 1
        assert len(tree.root.children) == 3
        assert all(child.is_leaf for child in tree.root.children)

    def test_nested_group(self):
        """Test parentheses keep a separate gate."""
        tree = parse_policy("colleague or (friend and neighbor)")
        expected = AccessNode.gate(1, [
            AccessNode.leaf("colleague"),
            AccessNode.gate(2, [AccessNode.leaf("friend"), AccessNode.leaf("neighbor")]),
        ])
        assert tree == AccessTree(expected)

    def test_and_binds_tighter_than_or(self):
        """Test 'a or b and c' groups as a or (b and c)."""
        assert parse_policy("a or b and c") == parse_policy("a or (b and c)")

    def test_threshold_gate(self):
        """Test 'k of (...)' builds an explicit threshold gate."""
        tree = parse_policy("2 of (a, b, c)")
        assert tree.root.threshold == 2
        assert tree.leaf_count == 3

    def test_keywords_case_insensitive(self):
        """Test keywords and attribute names ignore case."""
        assert parse_policy("Friend AND Neighbor") == parse_policy("friend and neighbor")

    def test_missing_operand_position(self):
        """Test a dangling operator reports the end-of-input position."""
        with pytest.raises(ParseError) as info:
            parse_policy("friend and")
        assert info.value.position == 10

    def test_unexpected_token_position(self):
        """Test two adjacent attributes report the second one's position."""
        with pytest.raises(ParseError) as info:
            parse_policy("friend neighbor")
        assert info.value.position == 7

    def test_unbalanced_parenthesis(self):
        """Test a missing closing parenthesis is a parse error."""
        with pytest.raises(ParseError):
            parse_policy("(a and b")

    def test_empty_policy(self):
        """Test empty text is a parse error."""
        with pytest.raises(ParseError):
            parse_policy("   ")

    def test_threshold_out_of_range(self):
        """Test k larger than the child count."""
        with pytest.raises(ThresholdError):
            parse_policy("3 of (a, b)")

    def test_bad_attribute(self):
        """Test attribute names outside the allowed alphabet."""
        with pytest.raises(InvalidAttribute) as info:
            parse_policy("friend and 9lives")
        assert info.value.position == 11
        with pytest.raises(InvalidAttribute):
            parse_policy("a-b")

    def test_preorder_leaf_ids(self):
        """Test leaf ids follow a preorder walk."""
        tree = parse_policy("(a and b) or c")
        assert tree.leaf_attributes() == ("a", "b", "c")
        assert tree.internal_count == 2


class TestFormatPolicy:
    """Tests for format_policy roundtrips."""

    def test_and_roundtrip(self):
        """Test 'friend and neighbor' roundtrips."""
        tree = parse_policy("friend and neighbor")
        assert format_policy(tree) == "friend and neighbor"
        assert parse_policy(format_policy(tree)) == tree

    def test_threshold_roundtrip(self):
        """Test '2 of (a, b, c)' roundtrips."""
        tree = parse_policy("2 of (a, b, c)")
        assert format_policy(tree) == "2 of (a, b, c)"
        assert parse_policy(format_policy(tree)) == tree

    def test_nested_same_operator_stays_nested(self):
        """Test an explicit nested AND is preserved."""
        tree = parse_policy("(a and b) and c")
        assert len(tree.root.children) == 2
        assert parse_policy(format_policy(tree)) == tree

    def test_random_trees_roundtrip(self):
        """Test 100 random trees of depth <= 4 and fanout <= 4 roundtrip."""
        rng = random.Random(41)
        for _ in range(100):
            tree = random_tree(rng, rng.randint(1, 20), UNIVERSE, max_fanout=4, max_depth=4)
            assert parse_policy(format_policy(tree)) == tree


class TestShareOverTree:
    """Tests for top-down sharing."""

    def setup_method(self):
        self.field = PrimeField(P)
        self.rng = random.Random(43)

    def test_single_leaf(self):
        """Test a single-leaf policy hands the secret to the leaf."""
        shares = share_over_tree(self.field, parse_policy("a"), 57, self.rng)
        assert shares.shares == (57,)

    def test_or_gate(self):
        """Test both children of an OR gate get the secret."""
        shares = share_over_tree(self.field, parse_policy("a or b"), 57, self.rng)
        assert shares.shares == (57, 57)

    def test_reconstruction_oracle(self):
        """Test every satisfying attribute set reconstructs the secret on random trees."""
        for _ in range(30):
            tree = random_tree(self.rng, self.rng.randint(1, 6), UNIVERSE)
            secret = self.rng.randrange(P)
            shares = share_over_tree(self.field, tree, secret, self.rng)
            for attrs in all_subsets(UNIVERSE):
                selection = select_satisfying_leaves(tree, set(attrs), self.field)
                if isinstance(selection, NotSatisfied):
                    continue
                total = sum(selection.leaf_coefficients[i] * shares[i] for i in selection.leaf_ids) % P
                assert total == secret


class TestSelectSatisfyingLeaves:
    """Tests for minimal leaf selection."""

    def setup_method(self):
        self.field = PrimeField(P)

    def test_or_uses_one_leaf(self):
        """Test an OR with both attributes held uses the lower-index leaf."""
        selection = select_satisfying_leaves(parse_policy("a or b"), {"a", "b"}, self.field)
        assert selection.leaf_ids == (0,)

    def test_threshold_choice(self):
        """Test 2 of (a, b, c) with {a, c} picks those two leaves."""
        selection = select_satisfying_leaves(parse_policy("2 of (a, b, c)"), {"a", "c"}, self.field)
        assert selection.leaf_ids == (0, 2)
        assert selection.nodes[0].child_indices == (1, 3)

    def test_not_satisfied(self):
        """Test an unsatisfiable set returns a falsy NotSatisfied value."""
        result = select_satisfying_leaves(parse_policy("a and b"), {"a"}, self.field)
        assert isinstance(result, NotSatisfied)
        assert not result

    def test_excluded_leaves(self):
        """Test excluded leaves are routed around."""
        tree = parse_policy("a or b")
        assert select_satisfying_leaves(tree, {"a", "b"}, self.field, {0}).leaf_ids == (1,)
        assert isinstance(select_satisfying_leaves(tree, {"a"}, self.field, {0}), NotSatisfied)

    def test_prefers_cheaper_subtree(self):
        """Test a single leaf beats a two-leaf subtree."""
        selection = select_satisfying_leaves(parse_policy("(a and b) or c"), {"a", "b", "c"}, self.field)
        assert selection.leaf_ids == (2,)

    def test_minimal_against_brute_force(self):
        """Test selection size equals the brute-force minimum on random trees."""
        rng = random.Random(47)
        for _ in range(40):
            tree = random_tree(rng, rng.randint(1, 6), UNIVERSE)
            for attrs in all_subsets(UNIVERSE):
                attrs = set(attrs)
                selection = select_satisfying_leaves(tree, attrs, self.field)
                minimum = brute_force_minimum(tree, attrs)
                if minimum == 0:
                    assert isinstance(selection, NotSatisfied)
                else:
                    assert selection.size == minimum
                    assert all(tree.leaf_attributes()[i] in attrs for i in selection.leaf_ids)

    def test_monotone(self):
        """Test adding attributes never makes a selection larger."""
        rng = random.Random(53)
        for _ in range(20):
            tree = random_tree(rng, rng.randint(1, 6), UNIVERSE)
            for attrs in all_subsets(UNIVERSE):
                small = select_satisfying_leaves(tree, set(attrs), self.field)
                large = select_satisfying_leaves(tree, set(UNIVERSE), self.field)
                if not isinstance(small, NotSatisfied):
                    assert not isinstance(large, NotSatisfied)
                    assert large.size <= small.size
