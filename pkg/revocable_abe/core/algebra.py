"""
Prime-field arithmetic, polynomial secret sharing and Lagrange interpolation.

Every function takes the field explicitly so the same code runs over the
pairing group order and over small fields used as exhaustive oracles.
"""
from __future__ import annotations

import dataclasses
import functools
import random
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .errors import (
    DegenerateTarget,
    DuplicatePoint,
    InvalidDegree,
    ReconstructionFailure,
)

Scalar = int

_SYSTEM_RNG = random.SystemRandom()


def default_rng() -> random.Random:
    """Return the process-wide CSPRNG used when a caller supplies none."""
    return _SYSTEM_RNG


@functools.lru_cache(maxsize=64)
def _root_of_unity(modulus: int, order: int) -> Optional[int]:
    if order < 1 or order & (order - 1) or (modulus - 1) % order:
        return None
    if order == 1:
        return 1
    for g in range(2, modulus):
        w = pow(g, (modulus - 1) // order, modulus)
        if pow(w, order // 2, modulus) != 1:
            return w
    return None


@dataclass(frozen=True)
class PrimeField:
    """The field Z_p for a prime p."""
    modulus: int

    @property
    def byte_width(self) -> int:
        """Fixed big-endian width of a canonical scalar encoding."""
        return (self.modulus.bit_length() + 7) // 8

    def normalize(self, value: int) -> Scalar:
        return value % self.modulus

    def inv(self, value: int) -> Scalar:
        value %= self.modulus
        if value == 0:
            raise ZeroDivisionError("0 has no inverse in Z_p")
        return pow(value, -1, self.modulus)

    def div(self, num: int, den: int) -> Scalar:
        return (num * self.inv(den)) % self.modulus

    def random_scalar(self, rng: Optional[random.Random] = None, nonzero: bool = True) -> Scalar:
        """Uniform element of Z_p (or Z_p minus zero)."""
        rng = rng or default_rng()
        low = 1 if nonzero else 0
        return rng.randrange(low, self.modulus)

    def root_of_unity(self, order: int) -> Optional[Scalar]:
        """Primitive root of unity of power-of-two `order`, or None when p - 1 has no such factor."""
        return _root_of_unity(self.modulus, order)

    def to_bytes(self, value: int) -> bytes:
        return (value % self.modulus).to_bytes(self.byte_width, "big")

    def from_bytes(self, data: bytes) -> Scalar:
        return int.from_bytes(data, "big")


@dataclass(frozen=True)
class Polynomial:
    """Polynomial a_0 + a_1 x + ... + a_t x^t over a prime field."""
    coefficients: tuple[Scalar, ...]
    field: PrimeField
    _memo: dict[Scalar, Scalar] = dataclasses.field(
        default_factory=dict, init=False, repr=False, compare=False, hash=False
    )

    def __post_init__(self):
        if not self.coefficients:
            raise InvalidDegree("a polynomial needs at least one coefficient")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def constant(self) -> Scalar:
        return self.coefficients[0]

    def __call__(self, x: int) -> Scalar:
        return eval_poly(self, x)

    def memoized(self, x: int) -> Scalar:
        """P(x), remembered for points evaluated again on later rekeys."""
        x %= self.field.modulus
        value = self._memo.get(x)
        if value is None:
            value = self._memo[x] = eval_poly(self, x)
        return value


@dataclass(frozen=True)
class Share:
    """A point <x, P(x)>; x = 0 is reserved for the secret itself."""
    x: Scalar
    y: Scalar

    def __post_init__(self):
        if self.x == 0:
            raise ValueError("share x-coordinate must be nonzero")


def random_polynomial(
    field: PrimeField,
    degree: int,
    rng: Optional[random.Random] = None,
    fixed_constant: Optional[Scalar] = None,
) -> Polynomial:
    """
    Sample a uniformly random polynomial of the given degree.

    Args:
        field: Coefficient field
        degree: Degree t, at least 1
        rng: Randomness source (defaults to the system CSPRNG)
        fixed_constant: Value forced into a_0, if given

    Returns:
        Polynomial with t+1 coefficients
    """
    if degree < 1:
        raise InvalidDegree(f"degree must be >= 1, got {degree}")
    return _sample_polynomial(field, degree, rng, fixed_constant)


def _sample_polynomial(
    field: PrimeField,
    degree: int,
    rng: Optional[random.Random],
    fixed_constant: Optional[Scalar],
) -> Polynomial:
    # Degree 0 is legal inside access trees (OR gates and leaves).
    rng = rng or default_rng()
    constant = (
        field.normalize(fixed_constant)
        if fixed_constant is not None
        else field.random_scalar(rng, nonzero=False)
    )
    rest = [field.random_scalar(rng, nonzero=False) for _ in range(degree)]
    return Polynomial((constant, *rest), field)


def eval_poly(poly: Polynomial, x: int) -> Scalar:
    """Horner evaluation of poly at x in Z_p."""
    p = poly.field.modulus
    acc = 0
    for coeff in reversed(poly.coefficients):
        acc = (acc * x + coeff) % p
    return acc


def batch_inverse(field: PrimeField, values: Sequence[int]) -> list[Scalar]:
    """Inverses of every value with a single field inversion."""
    p = field.modulus
    prefix = []
    acc = 1
    for v in values:
        if v % p == 0:
            raise ZeroDivisionError("0 has no inverse in Z_p")
        prefix.append(acc)
        acc = (acc * v) % p
    inv_acc = pow(acc, -1, p)
    result = [0] * len(values)
    for i in range(len(values) - 1, -1, -1):
        result[i] = (inv_acc * prefix[i]) % p
        inv_acc = (inv_acc * values[i]) % p
    return result


def ntt(field: PrimeField, values: Sequence[int], root: int) -> list[Scalar]:
    """
    Evaluate the polynomial with coefficients `values` at root^0..root^(n-1).

    Args:
        field: The field
        values: n coefficients, n a power of two
        root: Primitive n-th root of unity

    Returns:
        The n evaluations, in order of the root's powers
    """
    p = field.modulus
    n = len(values)
    if n & (n - 1):
        raise ValueError(f"transform length must be a power of two, got {n}")
    a = [v % p for v in values]
    j = 0
    for i in range(1, n):
        bit = n >> 1
        while j & bit:
            j ^= bit
            bit >>= 1
        j |= bit
        if i < j:
            a[i], a[j] = a[j], a[i]
    length = 2
    while length <= n:
        step = pow(root, n // length, p)
        half = length // 2
        for start in range(0, n, length):
            w = 1
            for k in range(start, start + half):
                u, v = a[k], (a[k + half] * w) % p
                a[k] = (u + v) % p
                a[k + half] = (u - v) % p
                w = (w * step) % p
        length <<= 1
    return a


def eval_on_coset(poly: Polynomial, offset: int, root: int, n: int) -> list[Scalar]:
    """
    P(offset * root^i) for i in 0..n-1, with root a primitive n-th root of unity.

    Coefficients above degree n-1 fold onto x^(j mod n), so any degree works.
    """
    p = poly.field.modulus
    folded = [0] * n
    power = 1
    for j, coeff in enumerate(poly.coefficients):
        folded[j % n] = (folded[j % n] + coeff * power) % p
        power = (power * offset) % p
    return ntt(poly.field, folded, root)


def lagrange_at(field: PrimeField, xs: Sequence[int], target: int = 0) -> list[Scalar]:
    """
    Lagrange basis coefficients for interpolating at `target`.

    Args:
        field: The field
        xs: Pairwise distinct nonzero interpolation points
        target: Evaluation point, not among xs

    Returns:
        lambda_i = prod_{j != i} (target - x_j) / (x_i - x_j), one per point
    """
    p = field.modulus
    points = [x % p for x in xs]
    if len(set(points)) != len(points):
        raise DuplicatePoint("interpolation points must be pairwise distinct")
    if 0 in points:
        raise DuplicatePoint("x = 0 is reserved for the secret")
    target %= p
    if target in points:
        raise DegenerateTarget("interpolation target coincides with a point")
    if target == 0:
        return _zero_weights(field, points)

    nums, dens = [], []
    for i, xi in enumerate(points):
        num, den = 1, 1
        for j, xj in enumerate(points):
            if i == j:
                continue
            num = (num * (target - xj)) % p
            den = (den * (xi - xj)) % p
        nums.append(num)
        dens.append(den)
    return [(num * inv) % p for num, inv in zip(nums, batch_inverse(field, dens))]


def _geometric_tail(field: PrimeField, points: Sequence[int]) -> int:
    """Start index of the longest suffix c, cq, cq^2, ... (at least two points), else len(points)."""
    n = len(points)
    if n < 2:
        return n
    p = field.modulus
    q = (points[-1] * pow(points[-2], -1, p)) % p
    start = n - 2
    while start > 0 and (points[start - 1] * q) % p == points[start]:
        start -= 1
    return start


def _zero_weights(field: PrimeField, points: Sequence[int]) -> list[Scalar]:
    # lambda_i = (X / x_i) / W_i with X = prod x_j and W_i = prod_{j != i} (x_j - x_i).
    # On a geometric tail x_k = c q^k of length m, W restricted to the tail is
    # c^(m-1) (-1)^k q^(k(k-1)/2 + k(m-1-k)) F_k F_(m-1-k), F_k = prod_{s=1..k} (q^s - 1).
    p = field.modulus
    n = len(points)
    s = _geometric_tail(field, points)
    head, tail = points[:s], points[s:]
    m = len(tail)

    total = 1
    for x in points:
        total = (total * x) % p

    denominators = []
    for i, xi in enumerate(head):
        w = 1
        for j, xj in enumerate(points):
            if j != i:
                w = (w * (xj - xi)) % p
        denominators.append((w * xi) % p)

    if m:
        c = tail[0]
        q = (tail[1] * pow(c, -1, p)) % p if m > 1 else 1
        falling = [1] * m
        q_power = 1
        for k in range(1, m):
            q_power = (q_power * q) % p
            falling[k] = (falling[k - 1] * (q_power - 1)) % p
        c_part = pow(c, m - 1, p)
        for k, xk in enumerate(tail):
            w = c_part * falling[k] * falling[m - 1 - k] % p
            w = (w * pow(q, k * (k - 1) // 2 + k * (m - 1 - k), p)) % p
            if k % 2:
                w = (-w) % p
            for xh in head:
                w = (w * (xh - xk)) % p
            denominators.append((w * xk) % p)

    return [(total * inv) % p for inv in batch_inverse(field, denominators)]


def extend_at_zero(
    field: PrimeField,
    points: Sequence[int],
    weighted: Sequence[int],
    extra: int,
) -> tuple[Scalar, Scalar]:
    """
    Add one point to an interpolation at 0 whose weights are already known.

    Args:
        field: The field
        points: x_1..x_t
        weighted: lambda'_i y_i, with lambda'_i the weights over x_1..x_t alone
        extra: New point u, nonzero and not among the points

    Returns:
        (lambda_u, sum_i lambda_i y_i) over the point set {x_1..x_t, u}
    """
    p = field.modulus
    u = extra % p
    lambda_u, exponent = 1, 0
    ratios = batch_inverse(field, [(u - x) % p for x in points])
    for x, term, ratio in zip(points, weighted, ratios):
        exponent = (exponent + term * u * ratio) % p
        lambda_u = (lambda_u * x * -ratio) % p
    return lambda_u, exponent


def reconstruct_secret(
    field: PrimeField,
    shares: Sequence[Share],
    threshold: Optional[int] = None,
) -> Scalar:
    """
    Recover P(0) from shares.

    Args:
        field: The field
        shares: Points of P with distinct x
        threshold: Minimum number of shares required (degree + 1), if known

    Returns:
        P(0)
    """
    if not shares:
        raise ReconstructionFailure("no shares supplied")
    if threshold is not None and len(shares) < threshold:
        raise ReconstructionFailure(
            f"need {threshold} shares, got {len(shares)}"
        )
    try:
        lambdas = lagrange_at(field, [s.x for s in shares], 0)
    except DuplicatePoint as exc:
        raise ReconstructionFailure("duplicate share x-coordinates") from exc
    return sum(l * s.y for l, s in zip(lambdas, shares)) % field.modulus


def interpolate_polynomial(field: PrimeField, points: Iterable[tuple[int, int]]) -> Polynomial:
    """Unique polynomial of degree < len(points) through the given points."""
    pts = [(x % field.modulus, y % field.modulus) for x, y in points]
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise DuplicatePoint("interpolation points must be pairwise distinct")
    p = field.modulus
    result = [0] * len(pts)
    for i, (xi, yi) in enumerate(pts):
        # basis = prod_{j != i} (x - x_j), expanded low-order first
        basis = [1]
        den = 1
        for j, xj in enumerate(xs):
            if i == j:
                continue
            shifted = [0] + basis
            for k, c in enumerate(basis):
                shifted[k] = (shifted[k] - xj * c) % p
            basis = shifted
            den = (den * (xi - xj)) % p
        scale = (yi * pow(den, -1, p)) % p
        for k, c in enumerate(basis):
            result[k] = (result[k] + scale * c) % p
    return Polynomial(tuple(result), field)
