"""
Brute-force oracles shared by the test modules.
"""
from itertools import combinations

from revocable_abe.core import AccessNode


def satisfied_by(node: AccessNode, chosen: set, ids) -> bool:
    """Whether the leaves with ids in `chosen` satisfy `node` (ids is a preorder leaf-id iterator)."""
    if node.is_leaf:
        return next(ids) in chosen
    results = [satisfied_by(child, chosen, ids) for child in node.children]
    return sum(results) >= node.threshold


def brute_force_minimum(tree, attrs) -> int:
    """Smallest satisfying leaf subset size using only leaves whose attribute is held, or 0."""
    attributes = tree.leaf_attributes()
    usable = [i for i, a in enumerate(attributes) if a in attrs]
    for size in range(1, len(usable) + 1):
        for combo in combinations(usable, size):
            if satisfied_by(tree.root, set(combo), iter(range(len(attributes)))):
                return size
    return 0


def naive_lagrange(modulus: int, xs, target: int) -> list:
    """Lagrange coefficients at `target` by the textbook double product."""
    result = []
    for i, xi in enumerate(xs):
        num, den = 1, 1
        for j, xj in enumerate(xs):
            if i != j:
                num = num * (target - xj) % modulus
                den = den * (xi - xj) % modulus
        result.append(num * pow(den, -1, modulus) % modulus)
    return result
