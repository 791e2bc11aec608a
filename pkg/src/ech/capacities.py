"""ECH capacity sequences of toric domains.

Ellipsoids and polydisks have closed forms.  A general convex region is
handled by minimising the dual-norm length of convex lattice polygons with a
prescribed number of enclosed lattice points (see :mod:`ech.polysearch`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt, lcm
from typing import Sequence

from .latgeom import LatticePolygon, RationalPolygon, convex_hull, cross, lattice_count, round_corner
from .numkit import ECHError, WeightSequence, parse_rational
from .polysearch import search_polygons

__all__ = [
    "CapacitySequence",
    "DisjointUnion",
    "Ellipsoid",
    "Polydisk",
    "PointDomain",
    "ToricDomain",
    "ToricRegion",
    "VolumeEstimate",
    "cap_disjoint_union",
    "cap_ellipsoid",
    "cap_polydisk",
    "cap_toric",
    "scale_domain",
    "toric_capacities",
    "volume_estimate",
]


def cap_ellipsoid(a, b, k: int) -> Fraction:
    """``c_k(E(a, b)) = N(a, b)_k``."""
    if k < 0:
        raise ECHError("k must be nonnegative")
    return _weights(parse_rational(a), parse_rational(b))[k]


@functools.lru_cache(maxsize=256)
def _weights(a: Fraction, b: Fraction) -> WeightSequence:
    return WeightSequence(a, b)


def cap_polydisk(a, b, k: int) -> Fraction:
    """``min{a*m + b*n : (m+1)(n+1) >= k+1}``."""
    a, b = parse_rational(a), parse_rational(b)
    if a <= 0 or b <= 0:
        raise ECHError("nonpositive axis")
    if k < 0:
        raise ECHError("k must be nonnegative")
    # for each m the smallest admissible n is ceil((k+1)/(m+1)) - 1
    return min(a * m + b * (-(-(k + 1) // (m + 1)) - 1) for m in range(k + 1))


def _polydisk_prefix(a: Fraction, b: Fraction, count: int) -> list[Fraction]:
    # (m, n) serves every k < (m+1)(n+1); take suffix minima over that product
    best: list = [None] * (count + 1)
    for m in range(count):
        for n in range(count):
            p = min((m + 1) * (n + 1), count)
            v = a * m + b * n
            if best[p] is None or v < best[p]:
                best[p] = v
            if p == count:
                break
    out = [Fraction(0)] * count
    run = None
    for p in range(count, 0, -1):
        if best[p] is not None and (run is None or best[p] < run):
            run = best[p]
        out[p - 1] = run
    return out


# --------------------------------------------------------------------------
# General convex regions


class _DualNormCost:
    """Integer-valued ``D * ||v||*`` for the region translated to its vertex mean."""

    def __init__(self, omega: RationalPolygon):
        centered = omega.centered()
        self.scale = lcm(*(q.denominator for v in centered.vertices for q in v))
        self.vertices = tuple((int(x * self.scale), int(y * self.scale)) for x, y in centered.vertices)
        self.omega = omega

    def __call__(self, x: int, y: int) -> int:
        return max(x * X + y * Y for X, Y in self.vertices)

    def length(self, edges) -> int:
        return sum(self(x, y) for x, y in edges)

    def radius(self, bound: int) -> int:
        """Sup-norm bound on any edge direction of a loop with cost <= bound."""
        w2 = self.omega.min_width_squared()
        b = Fraction(bound, self.scale)
        return isqrt(math.floor(b * b / w2)) + 1


def _gauge_order(points, gauge):
    return sorted(points, key=lambda p: (gauge(p), p))


def _round_down(poly: LatticePolygon, target: int, length) -> LatticePolygon:
    """Greedily round corners until exactly ``target`` lattice points remain."""
    count = lattice_count(poly)
    while count > target:
        options = [round_corner(poly, i) for i in range(poly.n_corners)]
        poly = min(options, key=lambda q: (length(q.edges), q.sort_key()))
        count -= 1
    return poly


def greedy_witness(body_vertices: Sequence, length, count: int) -> LatticePolygon:
    """A feasible polygon with exactly ``count`` lattice points, shaped like ``body``.

    ``body_vertices`` is a convex body around the origin (the Wulff shape of
    the norm); lattice points are taken in order of their gauge for a few
    offsets, hulled, and rounded down.  Only used to seed the search budget.
    """
    body = convex_hull(body_vertices)
    n = len(body)
    halfplanes = []
    for i in range(n):
        a, b = body[i], body[(i + 1) % n]
        nx, ny = b[1] - a[1], a[0] - b[0]
        halfplanes.append((nx, ny, nx * a[0] + ny * a[1]))
    area = abs(sum(cross(body[i], body[(i + 1) % n]) for i in range(n))) / 2
    reach = max(max(abs(x), abs(y)) for x, y in body)
    r = int(math.ceil(float(reach) * math.sqrt((count + 4) / float(area)))) + 3
    box = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]
    best = None
    for ox, oy in ((0, 0), (Fraction(1, 2), 0), (0, Fraction(1, 2)), (Fraction(1, 2), Fraction(1, 2))):

        def gauge(p, ox=ox, oy=oy):
            qx, qy = p[0] - ox, p[1] - oy
            return max(Fraction(nx * qx + ny * qy) / c for nx, ny, c in halfplanes)

        chosen = _gauge_order(box, gauge)[:count]
        poly = _round_down(LatticePolygon.from_points(chosen), count, length)
        key = (length(poly.edges), poly.sort_key())
        if best is None or key < best[0]:
            best = (key, poly)
    return best[1]


@dataclass(frozen=True)
class _ToricResult:
    values: tuple
    witnesses: tuple
    bound: int
    nodes: int


@functools.lru_cache(maxsize=64)
def _toric_search(omega: RationalPolygon, count: int, threads: int, budget) -> _ToricResult:
    cost = _DualNormCost(omega)
    # Wulff shape: the region rotated by -90 degrees
    body = [(y, -x) for x, y in omega.centered().vertices]
    witness = greedy_witness(body, cost.length, count)
    bound = cost.length(witness.edges)
    if budget is not None:
        bound = min(bound, math.floor(budget * cost.scale))
    found = search_polygons(cost, cost.radius(bound), bound, count, threads=threads)
    if any(c not in found.best for c in range(1, count + 1)):
        if budget is None:
            raise AssertionError("search missed a lattice count below its own witness")
        return _toric_search(omega, count, threads, None)
    values = tuple(Fraction(found.best[c], cost.scale) for c in range(1, count + 1))
    witnesses = tuple(LatticePolygon(found.polygons[c][0][1]) for c in range(1, count + 1))
    return _ToricResult(values, witnesses, bound, found.nodes)


def toric_capacities(omega: RationalPolygon, count: int, threads: int = 1, budget_hint=None):
    """``(c_0..c_{count-1}, witnesses)`` for the toric domain over ``omega``.

    ``budget_hint`` is an optional upper bound on ``c_{count-1}``; it only
    narrows the search and never changes the answer.
    """
    if count < 1:
        raise ECHError("count must be at least 1")
    hint = None if budget_hint is None else parse_rational(budget_hint)
    res = _toric_search(omega, count, threads, hint)
    return list(res.values), list(res.witnesses)


def cap_toric(omega: RationalPolygon, k: int, budget_hint=None, threads: int = 1):
    """Minimal dual-norm length over convex lattice polygons with ``k+1`` lattice points.

    Returns ``(value, witness)``.  Regions touching the axes are accepted; the
    formula is known to be right there for axis triangles and rectangles.
    """
    if k < 0:
        raise ECHError("k must be nonnegative")
    values, witnesses = toric_capacities(omega, k + 1, threads=threads, budget_hint=budget_hint)
    return values[k], witnesses[k]


# --------------------------------------------------------------------------
# Domains


class ToricDomain:
    """Base class for the regions ``X_Omega`` considered here."""

    def capacity(self, k: int) -> Fraction:
        return self.capacities(k + 1).values[k]

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        raise NotImplementedError

    def volume(self) -> Fraction:
        raise NotImplementedError

    def scaled(self, r) -> ToricDomain:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Ellipsoid(ToricDomain):
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", parse_rational(self.a))
        object.__setattr__(self, "b", parse_rational(self.b))
        if self.a <= 0 or self.b <= 0:
            raise ECHError("nonpositive axis")

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        return CapacitySequence(self, tuple(_weights(self.a, self.b).prefix(count)))

    def volume(self) -> Fraction:
        return self.a * self.b / 2

    def scaled(self, r) -> Ellipsoid:
        return Ellipsoid(self.a * r, self.b * r)

    def region(self) -> RationalPolygon:
        return RationalPolygon(((0, 0), (self.a, 0), (0, self.b)))

    def to_json(self) -> dict:
        return {"type": "ellipsoid", "a": str(self.a), "b": str(self.b)}

    def __str__(self) -> str:
        return f"E({self.a},{self.b})"


@dataclass(frozen=True)
class Polydisk(ToricDomain):
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", parse_rational(self.a))
        object.__setattr__(self, "b", parse_rational(self.b))
        if self.a <= 0 or self.b <= 0:
            raise ECHError("nonpositive axis")

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        return CapacitySequence(self, tuple(_polydisk_prefix(self.a, self.b, count)))

    def volume(self) -> Fraction:
        return self.a * self.b

    def scaled(self, r) -> Polydisk:
        return Polydisk(self.a * r, self.b * r)

    def region(self) -> RationalPolygon:
        return RationalPolygon(((0, 0), (self.a, 0), (self.a, self.b), (0, self.b)))

    def to_json(self) -> dict:
        return {"type": "polydisk", "a": str(self.a), "b": str(self.b)}

    def __str__(self) -> str:
        return f"P({self.a},{self.b})"


@dataclass(frozen=True)
class ToricRegion(ToricDomain):
    """``X_Omega`` for a convex rational polygon ``Omega`` with positive area."""

    omega: RationalPolygon

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        values, witnesses = toric_capacities(self.omega, count, threads=threads)
        return CapacitySequence(self, tuple(values), tuple(witnesses))

    def volume(self) -> Fraction:
        return self.omega.area()

    def scaled(self, r) -> ToricRegion:
        return ToricRegion(self.omega.scaled(r))

    def to_json(self) -> dict:
        return {"type": "toric", **self.omega.to_json()}

    def __str__(self) -> str:
        return "X(" + ",".join(f"({x},{y})" for x, y in self.omega.vertices) + ")"


@dataclass(frozen=True)
class PointDomain(ToricDomain):
    """The degenerate zero domain: every capacity vanishes."""

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        return CapacitySequence(self, (Fraction(0),) * count)

    def volume(self) -> Fraction:
        return Fraction(0)

    def scaled(self, r) -> PointDomain:
        return self

    def to_json(self) -> dict:
        return {"type": "point"}


@dataclass(frozen=True)
class DisjointUnion(ToricDomain):
    parts: tuple

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ECHError("a disjoint union needs at least one part")

    def capacities(self, count: int, threads: int = 1) -> CapacitySequence:
        seqs = [p.capacities(count, threads=threads) for p in self.parts]
        return CapacitySequence(self, tuple(_max_plus(seqs, count)))

    def volume(self) -> Fraction:
        return sum((p.volume() for p in self.parts), Fraction(0))

    def scaled(self, r) -> DisjointUnion:
        return DisjointUnion(tuple(p.scaled(r) for p in self.parts))

    def to_json(self) -> dict:
        return {"type": "union", "parts": [p.to_json() for p in self.parts]}

    def __str__(self) -> str:
        return " + ".join(str(p) for p in self.parts)


@dataclass(frozen=True)
class CapacitySequence:
    """``c_0, c_1, ...`` of a domain, with optional lattice witnesses."""

    domain: ToricDomain
    values: tuple
    witnesses: tuple = field(default=(), compare=False)

    def __post_init__(self):
        vals = self.values
        if vals and vals[0] != 0:
            raise ECHError("c_0 must vanish")
        if any(vals[i] > vals[i + 1] for i in range(len(vals) - 1)):
            raise ECHError("capacity sequence must be nondecreasing")

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, k: int) -> Fraction:
        return self.values[k]


def _max_plus(seqs: Sequence[CapacitySequence], count: int) -> list[Fraction]:
    acc = list(seqs[0].values[:count])
    for seq in seqs[1:]:
        vals = seq.values
        acc = [max(acc[j] + vals[k - j] for j in range(k + 1)) for k in range(count)]
    return acc


def cap_disjoint_union(parts: Sequence[CapacitySequence], k: int) -> Fraction:
    """``max_{k_1+...+k_n=k} sum_i c_{k_i}`` by dynamic programming over the parts."""
    if not parts:
        raise ECHError("need at least one part")
    short = [i for i, p in enumerate(parts) if len(p) < k + 1]
    if short:
        raise ECHError(f"parts {short} have fewer than {k + 1} cached values; extend them first")
    return _max_plus(parts, k + 1)[k]


@dataclass(frozen=True)
class VolumeEstimate:
    k: int
    capacity: Fraction
    estimate: float
    volume: Fraction


def volume_estimate(domain: ToricDomain, k: int) -> VolumeEstimate:
    """``c_k^2 / (4k)``, which tends to the volume as ``k`` grows."""
    if k < 1:
        raise ECHError("k must be positive")
    c = domain.capacities(k + 1).values[k]
    return VolumeEstimate(k, c, float(c * c / (4 * k)), domain.volume())


def scale_domain(domain: ToricDomain, r) -> ToricDomain:
    """Multiply the symplectic form by ``r > 0``; capacities scale by ``r``."""
    r = parse_rational(r)
    if r <= 0:
        raise ECHError("scale factor must be positive")
    return domain.scaled(r)
