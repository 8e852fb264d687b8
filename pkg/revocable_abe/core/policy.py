"""
Access trees of threshold gates: parsing, formatting, secret sharing and
minimal satisfying leaf selection.

Leaves are identified by their position in a preorder walk over leaves only;
that index is the join key between ciphertext components, conversion
requests and selections.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import AbstractSet, Iterator, Optional, Sequence, Union

from .algebra import PrimeField, Scalar, _sample_polynomial, lagrange_at
from .attributes import normalize_attribute
from .errors import InvalidAttribute, NotSatisfied, ParseError, ThresholdError

KEYWORDS = frozenset({"and", "or", "of"})

_TOKEN_RE = re.compile(r"\s*(?:(?P<punct>[(),])|(?P<word>[^\s(),]+))")


@dataclass(frozen=True)
class AccessNode:
    """
    A threshold gate (k of its children) or an attribute leaf.

    Leaves have threshold 1 and no children. Child indices are 1-based in
    the order stored.
    """
    threshold: int
    children: tuple[AccessNode, ...] = ()
    attribute: Optional[str] = None

    def __post_init__(self):
        if self.attribute is not None:
            if self.children or self.threshold != 1:
                raise ThresholdError("a leaf has threshold 1 and no children")
            object.__setattr__(self, "attribute", normalize_attribute(self.attribute))
            return
        if not self.children:
            raise ThresholdError("a gate needs at least one child")
        if not 1 <= self.threshold <= len(self.children):
            raise ThresholdError(
                f"threshold {self.threshold} outside 1..{len(self.children)}"
            )

    @classmethod
    def leaf(cls, attribute: str) -> AccessNode:
        return cls(threshold=1, attribute=attribute)

    @classmethod
    def gate(cls, threshold: int, children: Sequence[AccessNode]) -> AccessNode:
        return cls(threshold=threshold, children=tuple(children))

    @property
    def is_leaf(self) -> bool:
        return self.attribute is not None

    def iter_leaves(self) -> Iterator[AccessNode]:
        if self.is_leaf:
            yield self
            return
        for child in self.children:
            yield from child.iter_leaves()


@dataclass(frozen=True)
class AccessTree:
    """A policy tree; structural equality is dataclass equality."""
    root: AccessNode

    def leaves(self) -> tuple[AccessNode, ...]:
        return tuple(self.root.iter_leaves())

    @property
    def leaf_count(self) -> int:
        return sum(1 for _ in self.root.iter_leaves())

    @property
    def internal_count(self) -> int:
        def count(node: AccessNode) -> int:
            if node.is_leaf:
                return 0
            return 1 + sum(count(c) for c in node.children)
        return count(self.root)

    def leaf_attributes(self) -> tuple[str, ...]:
        """Attribute of each leaf, indexed by leaf id."""
        return tuple(leaf.attribute for leaf in self.root.iter_leaves())

    def attributes(self) -> frozenset[str]:
        return frozenset(self.leaf_attributes())

    def __str__(self) -> str:
        return format_policy(self)


@dataclass(frozen=True)
class LeafShareAssignment:
    """q_y(0) for every leaf, indexed by leaf id."""
    shares: tuple[Scalar, ...]

    def __getitem__(self, leaf_id: int) -> Scalar:
        return self.shares[leaf_id]

    def __len__(self) -> int:
        return len(self.shares)


@dataclass(frozen=True)
class NodeSelection:
    """Children used at one gate on the reconstruction path."""
    path: tuple[int, ...]               # child indices (1-based) from the root
    child_indices: tuple[int, ...]
    coefficients: tuple[Scalar, ...]    # Lagrange at 0 over child_indices


@dataclass(frozen=True)
class SatisfyingSelection:
    """
    A minimal set of leaves that satisfies a tree.

    `leaf_coefficients` maps each chosen leaf id to the product of the
    Lagrange coefficients on its path, so that
    sum(c * q_leaf(0)) over the chosen leaves equals the root secret.
    """
    leaf_ids: tuple[int, ...]
    nodes: tuple[NodeSelection, ...]
    leaf_coefficients: dict[int, Scalar] = field(compare=False)

    @property
    def size(self) -> int:
        return len(self.leaf_ids)

    def __len__(self) -> int:
        return len(self.leaf_ids)


# Parsing

@dataclass(frozen=True)
class _Token:
    kind: str       # "(", ")", ",", "word", "end"
    text: str
    position: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            break
        if match.group("punct"):
            tokens.append(_Token(match.group("punct"), match.group("punct"), match.start("punct")))
        elif match.group("word"):
            tokens.append(_Token("word", match.group("word"), match.start("word")))
        pos = match.end()
    tokens.append(_Token("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over: or := and ("or" and)*; and := term ("and" term)*."""

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.index = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.index]

    def advance(self) -> _Token:
        token = self.tokens[self.index]
        self.index += 1
        return token

    def is_keyword(self, token: _Token, keyword: str) -> bool:
        return token.kind == "word" and token.text.lower() == keyword

    def expect(self, kind: str, what: str) -> _Token:
        if self.current.kind != kind:
            found = self.current.text or "end of input"
            raise ParseError(f"expected {what}, found {found!r}", self.current.position)
        return self.advance()

    def parse(self) -> AccessNode:
        if self.current.kind == "end":
            raise ParseError("empty policy", 0)
        node = self.parse_or()
        if self.current.kind != "end":
            raise ParseError(f"unexpected {self.current.text!r}", self.current.position)
        return node

    def parse_or(self) -> AccessNode:
        children = [self.parse_and()]
        while self.is_keyword(self.current, "or"):
            self.advance()
            children.append(self.parse_and())
        if len(children) == 1:
            return children[0]
        return AccessNode.gate(1, children)

    def parse_and(self) -> AccessNode:
        children = [self.parse_term()]
        while self.is_keyword(self.current, "and"):
            self.advance()
            children.append(self.parse_term())
        if len(children) == 1:
            return children[0]
        return AccessNode.gate(len(children), children)

    def parse_term(self) -> AccessNode:
        token = self.current
        if token.kind == "(":
            self.advance()
            node = self.parse_or()
            self.expect(")", "')'")
            return node
        if token.kind != "word":
            found = token.text or "end of input"
            raise ParseError(f"expected an attribute or '(', found {found!r}", token.position)
        if token.text.isdigit() and self.is_keyword(self.tokens[self.index + 1], "of"):
            return self.parse_threshold()
        if token.text.lower() in KEYWORDS:
            raise ParseError(f"unexpected keyword {token.text!r}", token.position)
        self.advance()
        try:
            return AccessNode.leaf(token.text)
        except InvalidAttribute as exc:
            raise InvalidAttribute(str(exc), token.position) from exc

    def parse_threshold(self) -> AccessNode:
        count_token = self.advance()
        self.advance()  # "of"
        self.expect("(", "'(' after 'of'")
        children = [self.parse_or()]
        while self.current.kind == ",":
            self.advance()
            children.append(self.parse_or())
        self.expect(")", "')' or ','")
        threshold = int(count_token.text)
        if not 1 <= threshold <= len(children):
            raise ThresholdError(
                f"threshold {threshold} outside 1..{len(children)}", count_token.position
            )
        return AccessNode.gate(threshold, children)


def parse_policy(text: str) -> AccessTree:
    """
    Parse policy text such as "colleague or (friend and neighbor)".

    Precedence is "of" > "and" > "or". A chain of the same operator becomes one
    n-ary gate; parenthesized groups stay separate gates.

    Raises:
        ParseError: syntax error, with its character position
        ThresholdError: "k of (...)" with k outside 1..n
        InvalidAttribute: attribute token outside [a-z][a-z0-9_]*
    """
    return AccessTree(_Parser(text).parse())


def format_policy(tree: Union[AccessTree, AccessNode]) -> str:
    """Canonical text for a tree; parse_policy(format_policy(t)) == t."""
    node = tree.root if isinstance(tree, AccessTree) else tree
    return _format_node(node)


def _format_node(node: AccessNode) -> str:
    if node.is_leaf:
        return node.attribute
    n = len(node.children)
    if n >= 2 and node.threshold in (1, n):
        joiner = " or " if node.threshold == 1 else " and "
        return joiner.join(_format_operand(c) for c in node.children)
    inner = ", ".join(_format_node(c) for c in node.children)
    return f"{node.threshold} of ({inner})"


def _format_operand(node: AccessNode) -> str:
    if node.is_leaf:
        return node.attribute
    return f"({_format_node(node)})"


# Sharing

def share_over_tree(
    field_: PrimeField,
    tree: AccessTree,
    secret: Scalar,
    rng: Optional[random.Random] = None,
) -> LeafShareAssignment:
    """
    Top-down sharing of `secret` over the tree.

    Each gate gets a random polynomial of degree k-1 whose constant term is the
    value handed down by its parent; child i receives that polynomial at i.
    """
    out: list[Scalar] = []

    def visit(node: AccessNode, value: Scalar) -> None:
        if node.is_leaf:
            out.append(value)
            return
        poly = _sample_polynomial(field_, node.threshold - 1, rng, value)
        for index, child in enumerate(node.children, start=1):
            visit(child, poly(index))

    visit(tree.root, field_.normalize(secret))
    return LeafShareAssignment(tuple(out))


# Selection

@dataclass(frozen=True)
class _Plan:
    cost: int
    leaf_id: Optional[int] = None
    picks: tuple[tuple[int, _Plan], ...] = ()


def select_satisfying_leaves(
    tree: AccessTree,
    attrs: AbstractSet[str],
    field_: PrimeField,
    excluded_leaves: AbstractSet[int] = frozenset(),
) -> Union[SatisfyingSelection, NotSatisfied]:
    """
    Minimal-leaf selection satisfying the tree.

    Each gate keeps its k cheapest satisfiable children, lower child index
    first on ties.

    Args:
        tree: The access tree
        attrs: Normalized attribute names held by the decryptor
        field_: Field for the Lagrange coefficients
        excluded_leaves: Leaf ids treated as unsatisfied (e.g. revoked)

    Returns:
        SatisfyingSelection, or NotSatisfied if no selection exists
    """
    counter = iter(range(tree.leaf_count))

    def plan(node: AccessNode) -> Optional[_Plan]:
        if node.is_leaf:
            leaf_id = next(counter)
            if node.attribute in attrs and leaf_id not in excluded_leaves:
                return _Plan(cost=1, leaf_id=leaf_id)
            return None
        # every child must be visited so leaf ids stay aligned
        child_plans = [(i, plan(c)) for i, c in enumerate(node.children, start=1)]
        usable = sorted(
            ((i, p) for i, p in child_plans if p is not None),
            key=lambda item: (item[1].cost, item[0]),
        )
        if len(usable) < node.threshold:
            return None
        chosen = tuple(sorted(usable[:node.threshold], key=lambda item: item[0]))
        return _Plan(cost=sum(p.cost for _, p in chosen), picks=chosen)

    root_plan = plan(tree.root)
    if root_plan is None:
        return NotSatisfied()

    nodes: list[NodeSelection] = []
    coefficients: dict[int, Scalar] = {}

    def collect(node_plan: _Plan, path: tuple[int, ...], weight: Scalar) -> None:
        if node_plan.leaf_id is not None:
            coefficients[node_plan.leaf_id] = weight
            return
        indices = tuple(i for i, _ in node_plan.picks)
        lambdas = tuple(lagrange_at(field_, indices, 0))
        nodes.append(NodeSelection(path, indices, lambdas))
        for (index, child_plan), lam in zip(node_plan.picks, lambdas):
            collect(child_plan, path + (index,), (weight * lam) % field_.modulus)

    collect(root_plan, (), 1)
    return SatisfyingSelection(
        leaf_ids=tuple(sorted(coefficients)),
        nodes=tuple(nodes),
        leaf_coefficients=coefficients,
    )


def random_tree(
    rng: random.Random,
    leaves: int,
    attributes: Sequence[str],
    max_fanout: int = 4,
    max_depth: Optional[int] = None,
) -> AccessTree:
    """
    Random policy tree with exactly `leaves` leaves.

    Gates have 2..max_fanout children and a uniform threshold; leaf
    attributes are drawn (with repetition) from `attributes`.
    """
    if leaves < 1:
        raise ValueError("a tree needs at least one leaf")
    if max_fanout < 2:
        raise ValueError("max_fanout must be at least 2")
    if max_depth is not None and leaves > max_fanout ** max_depth:
        raise ValueError(f"{leaves} leaves do not fit fanout {max_fanout}, depth {max_depth}")

    def build(n: int, depth_left: Optional[int]) -> AccessNode:
        if n == 1:
            return AccessNode.leaf(rng.choice(attributes))
        child_cap = n if depth_left is None else max_fanout ** (depth_left - 1)
        min_children = max(2, -(-n // child_cap))
        count = rng.randint(min_children, min(max_fanout, n))
        sizes = [1] * count
        for _ in range(n - count):
            open_slots = [i for i, s in enumerate(sizes) if s < child_cap]
            sizes[rng.choice(open_slots)] += 1
        next_depth = None if depth_left is None else depth_left - 1
        children = [build(size, next_depth) for size in sizes]
        return AccessNode.gate(rng.randint(1, count), children)

    return AccessTree(build(leaves, max_depth))
