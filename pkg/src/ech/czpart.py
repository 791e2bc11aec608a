"""Conley-Zehnder indices and the partition combinatorics of elliptic orbits.

For an elliptic orbit with rotation angle ``theta`` the allowed end
multiplicities of ECH curves are the partitions ``p_theta^+(m)`` (read off the
maximal concave lattice path under ``y = theta x``) and ``p_theta^-(m)``.
Angles are :class:`~ech.numkit.Theta` values, so a rational base plus a side
stands in for an irrational number.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator, NamedTuple

from .numkit import ECHError, NonGenericError, Theta, ceil_mul, floor_mul, parse_rational, parse_theta

__all__ = [
    "EllipsoidGenerator",
    "Partition",
    "WorkhorseResult",
    "cz_elliptic",
    "cz_hyperbolic",
    "ellipsoid_generators",
    "ellipsoid_grading",
    "hyperbolic_partition",
    "load_partition_table",
    "negative_partition",
    "partition_order",
    "partition_subset_floor_check",
    "partitions_of",
    "positive_partition",
    "positive_path",
    "workhorse_check",
]

MAX_ORDER_M = 12


class Partition(tuple):
    """A multiset of positive integers, stored nonincreasing."""

    def __new__(cls, parts: Iterable[int] = ()):
        parts = sorted((int(p) for p in parts), reverse=True)
        if any(p <= 0 for p in parts):
            raise ECHError("partition parts must be positive")
        return super().__new__(cls, parts)

    @property
    def total(self) -> int:
        return sum(self)

    def __repr__(self) -> str:
        return f"Partition({tuple(self)})"

    def __str__(self) -> str:
        return ",".join(map(str, self))

    @classmethod
    def parse(cls, text: str) -> Partition:
        return cls(int(t) for t in text.split(",") if t.strip())


def partitions_of(m: int) -> Iterator[Partition]:
    """All partitions of ``m`` in reverse lexicographic order."""

    def rec(rest: int, cap: int):
        if rest == 0:
            yield ()
            return
        for first in range(min(rest, cap), 0, -1):
            for tail in rec(rest - first, first):
                yield (first,) + tail

    for p in rec(m, m):
        yield Partition(p)


def _require_generic(theta: Theta, m: int) -> None:
    if not theta.is_generic_for(m):
        raise NonGenericError(f"theta={theta} has an integral multiple below {m + 1}; give it a side (+ or -)")


def cz_elliptic(theta: Theta, k: int) -> int:
    """``CZ = 2 floor(k theta) + 1`` for the ``k``-fold iterate."""
    if k < 1:
        raise ECHError("k must be positive")
    value, sign = theta.scaled(k)
    if value.denominator == 1 and sign == 0:
        raise NonGenericError(f"{k}*theta is an exact integer; give theta a side (+ or -)")
    return 2 * floor_mul(theta, k) + 1


def cz_hyperbolic(rotation_number: int) -> int:
    """Hyperbolic orbits: the index is the eigenvector rotation count itself."""
    return int(rotation_number)


# --------------------------------------------------------------------------
# Partitions


def positive_path(theta: Theta, m: int) -> list[tuple[int, int]]:
    """Primitive edge vectors of the maximal concave lattice path under ``y = theta x``."""
    if m < 1:
        raise ECHError("m must be positive")
    _require_generic(theta, m)
    pts = [(x, floor_mul(theta, x) if x else 0) for x in range(m + 1)]
    hull: list[tuple[int, int]] = []
    for p in pts:
        # upper hull, left to right: drop points on or below the new chord
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (p[1] - y0) - (y1 - y0) * (p[0] - x0) >= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    edges = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        dx, dy = x1 - x0, y1 - y0
        g = gcd(dx, dy)
        edges.extend([(dx // g, dy // g)] * g)
    return edges


def positive_partition(theta: Theta, m: int) -> Partition:
    """``p_theta^+(m)``: horizontal displacements of the primitive path segments."""
    return Partition(dx for dx, _ in positive_path(theta, m))


def negative_partition(theta: Theta, m: int) -> Partition:
    """``p_theta^-(m) = p_{-theta}^+(m)``."""
    return positive_partition(theta.reflect(), m)


def hyperbolic_partition(m: int, kind: str = "positive") -> Partition:
    """Both partitions of a positive (``1,...,1``) or negative (``2,...,2[,1]``) hyperbolic orbit."""
    if m < 1:
        raise ECHError("m must be positive")
    if kind == "positive":
        return Partition([1] * m)
    if kind == "negative":
        return Partition([2] * (m // 2) + [1] * (m % 2))
    raise ECHError(f"kind must be 'positive' or 'negative', got {kind!r}")


@functools.lru_cache(maxsize=1)
def load_partition_table() -> tuple:
    """The reference table of ``p_theta^+(m)``, ``2 <= m <= 8``, by interval of ``theta mod 1``.

    Rows are ``(lo, hi, m, Partition)``; the partition holds for all generic
    ``theta`` in ``(lo, hi)``.
    """
    text = resources.files("ech").joinpath("data/positive_partitions.csv").read_text()
    rows = []
    for rec in csv.DictReader(text.splitlines()):
        rows.append(
            (parse_rational(rec["theta_lo"]), parse_rational(rec["theta_hi"]), int(rec["m"]), Partition.parse(rec["parts"]))
        )
    return tuple(rows)


# --------------------------------------------------------------------------
# The lattice inequality behind the writhe bound


class WorkhorseResult(NamedTuple):
    lhs: int
    rhs: int
    holds: bool
    equality: bool


def workhorse_check(theta: Theta, parts: Iterable[int]) -> WorkhorseResult:
    """Compare ``sum_{i,j} max(floor(a_i t) a_j, floor(a_j t) a_i)`` with its bound.

    The bound is ``2 sum_{i<=m} floor(i t) - sum_i floor(a_i t) + m - k``, where
    ``m`` is the total and ``k`` the number of parts; equality should single
    out ``p_theta^+(m)``.
    """
    parts = Partition(parts)
    m, k = parts.total, len(parts)
    if m < 1:
        raise ECHError("empty partition")
    _require_generic(theta, m)
    fl = [floor_mul(theta, a) for a in parts]
    lhs = sum(max(fl[i] * parts[j], fl[j] * parts[i]) for i in range(k) for j in range(k))
    rhs = 2 * sum(floor_mul(theta, i) for i in range(1, m + 1)) - sum(fl) + m - k
    return WorkhorseResult(lhs, rhs, lhs <= rhs, lhs == rhs)


# --------------------------------------------------------------------------
# Partial order from index zero branched covers of a trivial cylinder


def partition_order(theta: Theta, p: Iterable[int], q: Iterable[int]) -> bool:
    """``p >= q``: an index zero branched cover has positive ends ``p``, negative ends ``q``.

    Such a cover splits into connected components; a component with positive
    ends ``A`` and negative ends ``B`` (equal sums) has index
    ``2(g - 1 + sum ceil(a t) - sum floor(b t))``, which vanishes iff ``g = 0``
    and ``sum ceil(a t) - sum floor(b t) = 1``.
    """
    p, q = Partition(p), Partition(q)
    if p.total != q.total:
        raise ECHError("partitions of different totals are incomparable")
    if p.total > MAX_ORDER_M:
        raise ECHError(f"partition_order is limited to m <= {MAX_ORDER_M}")
    _require_generic(theta, p.total)
    ceil_of = {a: ceil_mul(theta, a) for a in set(p)}
    floor_of = {b: floor_mul(theta, b) for b in set(q)}
    return _coverable(tuple(p), tuple(q), ceil_of, floor_of)


def _sub_multisets(parts: tuple) -> Iterator[tuple[tuple, tuple]]:
    # distinct (chosen, rest) splits of a sorted tuple, chosen nonempty
    seen = set()
    n = len(parts)
    for r in range(1, n + 1):
        for idx in combinations(range(n), r):
            chosen = tuple(parts[i] for i in idx)
            if chosen in seen:
                continue
            seen.add(chosen)
            rest = list(parts)
            for v in chosen:
                rest.remove(v)
            yield chosen, tuple(rest)


def _coverable(p: tuple, q: tuple, ceil_of: dict, floor_of: dict) -> bool:
    @functools.lru_cache(maxsize=None)
    def rec(p: tuple, q: tuple) -> bool:
        if not p:
            return not q
        head, tail = p[0], p[1:]
        for extra, p_rest in _sub_multisets(tail) if tail else ():
            if _group_ok((head,) + extra, q, p_rest, rec, ceil_of, floor_of):
                return True
        return _group_ok((head,), q, tail, rec, ceil_of, floor_of)

    return rec(p, q)


def _group_ok(group: tuple, q: tuple, p_rest: tuple, rec, ceil_of: dict, floor_of: dict) -> bool:
    total = sum(group)
    c = sum(ceil_of[a] for a in group)
    for chosen, q_rest in _sub_multisets(q):
        if sum(chosen) == total and c - sum(floor_of[b] for b in chosen) == 1 and rec(p_rest, q_rest):
            return True
    return False


def partition_subset_floor_check(theta: Theta, m: int) -> bool:
    """Subset identities of the extremal partitions.

    Checks ``sum_{i in I} floor(q_i t) = floor(sum_{i in I} q_i t)`` for every
    subset of ``p_theta^+(m) = (q_i)``, and that no nonempty proper sub-multisets
    of ``p^+`` and ``p^-`` have equal sums.
    """
    plus = positive_partition(theta, m)
    minus = negative_partition(theta, m)
    for r in range(len(plus) + 1):
        for idx in combinations(range(len(plus)), r):
            chosen = [plus[i] for i in idx]
            if sum(floor_mul(theta, a) for a in chosen) != (floor_mul(theta, sum(chosen)) if chosen else 0):
                return False

    def proper_sums(parts):
        return {sum(c) for c, rest in _sub_multisets(tuple(parts)) if rest}

    return not (proper_sums(plus) & proper_sums(minus))


# --------------------------------------------------------------------------
# Ellipsoid generators


@dataclass(frozen=True, order=True)
class EllipsoidGenerator:
    """``gamma_1^{m1} gamma_2^{m2}`` on the boundary of ``E(a, b)``."""

    m1: int
    m2: int

    def __post_init__(self):
        if self.m1 < 0 or self.m2 < 0:
            raise ECHError("multiplicities must be nonnegative")

    def action(self, a, b) -> Fraction:
        return parse_rational(a) * self.m1 + parse_rational(b) * self.m2

    @property
    def c_tau(self) -> int:
        return self.m1 + self.m2

    @property
    def q_tau(self) -> int:
        return 2 * self.m1 * self.m2


def ellipsoid_grading(a, b_over_a: Theta | str, m1: int, m2: int) -> int:
    """ECH index of ``gamma_1^{m1} gamma_2^{m2}`` for ``E(a, b)`` with irrational ``b/a``.

    ``2((m1+1)(m2+1) - 1 + sum_{k<=m1} floor(k a/b) + sum_{k<=m2} floor(k b/a))``.
    """
    if isinstance(b_over_a, str):
        b_over_a = parse_theta(b_over_a)
    if parse_rational(a) <= 0:
        raise ECHError("nonpositive axis")
    if m1 < 0 or m2 < 0:
        raise ECHError("multiplicities must be nonnegative")
    _require_generic(b_over_a, m2)
    inv = b_over_a.invert()
    _require_generic(inv, m1)
    s1 = sum(floor_mul(inv, k) for k in range(1, m1 + 1))
    s2 = sum(floor_mul(b_over_a, k) for k in range(1, m2 + 1))
    return 2 * ((m1 + 1) * (m2 + 1) - 1 + s1 + s2)


def ellipsoid_generators(ratio: Theta | str, max_action) -> list[EllipsoidGenerator]:
    """Generators of ``E(1, r)`` with action ``m1 + r m2 <= max_action``, in increasing action.

    Ties in the rational part are broken by the side of ``r``; an exact ``r``
    that produces equal actions raises :class:`NonGenericError`.
    """
    if isinstance(ratio, str):
        ratio = parse_theta(ratio)
    if ratio.base <= 0:
        raise ECHError("nonpositive axis")
    max_action = parse_rational(max_action)
    gens = []
    m2 = 0
    while ratio.base * m2 <= max_action:
        for m1 in range(int(max_action - ratio.base * m2) + 1):
            value, sign = ratio.scaled(m2)
            # the infinitesimal enters with weight m2
            gens.append(((m1 + value, sign * m2), EllipsoidGenerator(m1, m2)))
        m2 += 1
    gens.sort(key=lambda t: t[0])
    keys = [k for k, _ in gens]
    if len(set(keys)) != len(keys):
        raise NonGenericError(f"ratio {ratio} gives generators of equal action")
    return [g for _, g in gens]
