"""Convex lattice polygons up to translation, and the norms used to measure them.

A :class:`LatticePolygon` is stored as its counterclockwise cyclic list of edge
vectors, one per primitive direction, starting from the first direction at
angle ``>= 0``.  That list *is* the translation class, so equality and hashing
come for free.  Points and 2-gons are allowed.
"""

from __future__ import annotations

import decimal
import functools
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd, sqrt
from typing import Iterable, NamedTuple, Sequence

from .numkit import ECHError, format_rational, parse_rational

__all__ = [
    "LatticePolygon",
    "LatticeVector",
    "RationalPolygon",
    "SqrtSum",
    "angle_key",
    "convex_hull",
    "dual_norm",
    "euclidean_length",
    "euclidean_length_exact",
    "cross",
    "lattice_count",
    "lattice_points",
    "omega_length",
    "picks_check",
    "round_corner",
]


class LatticeVector(NamedTuple):
    x: int
    y: int

    @property
    def divisibility(self) -> int:
        return gcd(self.x, self.y)

    @property
    def primitive(self) -> LatticeVector:
        d = gcd(self.x, self.y)
        return LatticeVector(self.x // d, self.y // d)

    def is_primitive(self) -> bool:
        return self.divisibility == 1

    def __neg__(self) -> LatticeVector:
        return LatticeVector(-self.x, -self.y)


def cross(u, v) -> int:
    return u[0] * v[1] - u[1] * v[0]


def angle_key(v) -> tuple:
    """Exact sort key for the angle of ``v`` in ``[0, 2*pi)``."""
    x, y = v
    if y == 0:
        return (0, 0, Fraction(0)) if x > 0 else (1, 0, Fraction(0))
    if y > 0:
        return (0, 1, Fraction(-x, y))
    return (1, 1, Fraction(-x, y))


def angle_cmp(u, v) -> int:
    ku, kv = angle_key(u), angle_key(v)
    return (ku > kv) - (ku < kv)


# --------------------------------------------------------------------------
# Certified sums of square roots


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = c**2 * s`` with ``s`` squarefree; return ``(c, s)``."""
    c, s, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            c *= p
        if n % p == 0:
            n //= p
            s *= p
        p += 1
    return c, s * n


@functools.lru_cache(maxsize=None)
def _sqrt_term(n: int) -> tuple[int, int]:
    return _squarefree_split(n)


@functools.total_ordering
class SqrtSum:
    """An exact value ``sum_i q_i * sqrt(s_i)`` with distinct squarefree ``s_i``.

    Square roots of distinct squarefree integers are linearly independent over
    the rationals, so equality is decided by comparing coefficient maps.
    Order is decided by evaluating the difference at increasing decimal
    precision until its sign is certain.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction] | None = None):
        self.terms = {s: Fraction(q) for s, q in (terms or {}).items() if q}

    @classmethod
    def sqrt(cls, n: int) -> SqrtSum:
        if n < 0:
            raise ECHError("negative radicand")
        if n == 0:
            return cls()
        c, s = _sqrt_term(n)
        return cls({s: Fraction(c)})

    @classmethod
    def rational(cls, q) -> SqrtSum:
        return cls({1: Fraction(q)})

    def __add__(self, other) -> SqrtSum:
        other = _as_sqrtsum(other)
        terms = dict(self.terms)
        for s, q in other.terms.items():
            terms[s] = terms.get(s, Fraction(0)) + q
        return SqrtSum(terms)

    __radd__ = __add__

    def __neg__(self) -> SqrtSum:
        return SqrtSum({s: -q for s, q in self.terms.items()})

    def __sub__(self, other) -> SqrtSum:
        return self + (-_as_sqrtsum(other))

    def __mul__(self, k) -> SqrtSum:
        k = Fraction(k)
        return SqrtSum({s: q * k for s, q in self.terms.items()})

    __rmul__ = __mul__

    def __float__(self) -> float:
        return float(sum(float(q) * sqrt(s) for s, q in self.terms.items()))

    def sign(self) -> int:
        if not self.terms:
            return 0
        prec = 30
        while True:
            with decimal.localcontext() as ctx:
                ctx.prec = prec
                total = decimal.Decimal(0)
                scale = decimal.Decimal(0)
                for s, q in self.terms.items():
                    term = (decimal.Decimal(q.numerator) / q.denominator) * decimal.Decimal(s).sqrt()
                    total += term
                    scale += abs(term)
                slack = (scale + 1) * decimal.Decimal(10) ** (-(prec - 5))
                if total > slack:
                    return 1
                if total < -slack:
                    return -1
            prec *= 2

    def __eq__(self, other) -> bool:
        try:
            other = _as_sqrtsum(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __lt__(self, other) -> bool:
        return (self - _as_sqrtsum(other)).sign() < 0

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        if not self.terms:
            return "SqrtSum(0)"
        parts = []
        for s in sorted(self.terms):
            q = self.terms[s]
            parts.append(str(q) if s == 1 else f"{q}*sqrt({s})")
        return "SqrtSum(" + " + ".join(parts) + ")"

    def to_json(self) -> dict:
        return {str(s): format_rational(q) for s, q in sorted(self.terms.items())}


def _as_sqrtsum(value) -> SqrtSum:
    if isinstance(value, SqrtSum):
        return value
    if isinstance(value, (int, Fraction)):
        return SqrtSum.rational(value)
    raise TypeError(f"cannot compare SqrtSum with {type(value).__name__}")


# --------------------------------------------------------------------------
# Lattice polygons


def _canonical_edges(edges: Iterable[Sequence[int]]) -> tuple[LatticeVector, ...]:
    merged: dict[LatticeVector, int] = {}
    sx = sy = 0
    for x, y in edges:
        if x == 0 and y == 0:
            continue
        sx += x
        sy += y
        v = LatticeVector(x, y)
        prim = v.primitive
        merged[prim] = merged.get(prim, 0) + v.divisibility
    if sx or sy:
        raise ECHError("edge vectors do not sum to zero")
    ordered = sorted(merged, key=angle_key)
    return tuple(LatticeVector(u.x * d, u.y * d) for u in ordered for d in [merged[u]])


class LatticePolygon:
    """A closed convex lattice polygon modulo translation.

    Parameters
    ----------
    edges:
        Edge vectors in any order; parallel edges pointing the same way are
        merged, and the result is sorted counterclockwise by angle.
    """

    __slots__ = ("edges", "_hash")

    def __init__(self, edges: Iterable[Sequence[int]] = ()):
        self.edges = _canonical_edges(edges)
        self._hash = hash(self.edges)

    @classmethod
    def from_points(cls, points: Iterable[Sequence[int]]) -> LatticePolygon:
        """Boundary of the convex hull of a nonempty finite point set."""
        hull = convex_hull(points)
        if not hull:
            raise ECHError("empty point set")
        n = len(hull)
        return cls([(hull[(i + 1) % n][0] - hull[i][0], hull[(i + 1) % n][1] - hull[i][1]) for i in range(n)])

    @classmethod
    def point(cls) -> LatticePolygon:
        return cls(())

    def vertices(self) -> list[tuple[int, int]]:
        """Vertex ``i`` is the start of edge ``i``; vertex 0 sits at the origin."""
        out = [(0, 0)]
        x = y = 0
        for v in self.edges[:-1]:
            x += v.x
            y += v.y
            out.append((x, y))
        return out

    @property
    def n_corners(self) -> int:
        return len(self.edges)

    def is_point(self) -> bool:
        return not self.edges

    def is_degenerate(self) -> bool:
        return len(self.edges) <= 2

    def double_area(self) -> int:
        total = 0
        x = y = 0
        for v in self.edges:
            total += x * v.y - y * v.x
            x += v.x
            y += v.y
        return total

    def boundary_count(self) -> int:
        """``m(polygon)``: total divisibility of the edges."""
        return sum(v.divisibility for v in self.edges)

    def sort_key(self) -> tuple:
        return tuple((v.x, v.y) for v in self.edges)

    def __eq__(self, other) -> bool:
        return isinstance(other, LatticePolygon) and self.edges == other.edges

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"LatticePolygon({[tuple(v) for v in self.edges]})"

    def to_json(self) -> dict:
        return {"edges": [{"x": v.x, "y": v.y} for v in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> LatticePolygon:
        return cls((int(e["x"]), int(e["y"])) for e in data["edges"])


def convex_hull(points: Iterable[Sequence[int]]) -> list[tuple]:
    """Counterclockwise hull vertices (collinear points dropped).

    Collinear input gives its two endpoints and a single point gives itself.
    """
    pts = sorted(set((p[0], p[1]) for p in points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        chain: list = []
        for p in seq:
            while len(chain) >= 2 and cross(
                (chain[-1][0] - chain[-2][0], chain[-1][1] - chain[-2][1]),
                (p[0] - chain[-2][0], p[1] - chain[-2][1]),
            ) <= 0:
                chain.pop()
            chain.append(p)
        return chain

    lower, upper = half(pts), half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    return hull if len(hull) > 1 else hull[:1]


def _column_ranges(vertices: list[tuple]) -> dict[int, tuple[int, int]]:
    """For each integer x met by the polygon, the inclusive integer y-range."""
    n = len(vertices)
    if n == 1:
        x, y = vertices[0]
        return {x: (y, y)}
    lo: dict[int, Fraction] = {}
    hi: dict[int, Fraction] = {}
    for i in range(n):
        (x0, y0), (x1, y1) = vertices[i], vertices[(i + 1) % n]
        if x0 > x1:
            x0, y0, x1, y1 = x1, y1, x0, y0
        for x in range(ceil(x0), floor(x1) + 1):
            y = Fraction(y0) if x1 == x0 else y0 + Fraction(y1 - y0) * (x - x0) / (x1 - x0)
            if x1 == x0:
                ys = (Fraction(min(y0, y1)), Fraction(max(y0, y1)))
            else:
                ys = (y, y)
            lo[x] = min(lo.get(x, ys[0]), ys[0])
            hi[x] = max(hi.get(x, ys[1]), ys[1])
    return {x: (ceil(lo[x]), floor(hi[x])) for x in lo}


def lattice_points(p: LatticePolygon) -> list[tuple[int, int]]:
    """All lattice points enclosed by ``p`` (edges included), placed with vertex 0 at the origin."""
    ranges = _column_ranges(p.vertices())
    return [(x, y) for x in sorted(ranges) for y in range(ranges[x][0], ranges[x][1] + 1)]


def lattice_count(p: LatticePolygon) -> int:
    """Number of enclosed lattice points, counted column by column."""
    return sum(hi - lo + 1 for lo, hi in _column_ranges(p.vertices()).values())


def picks_check(p: LatticePolygon) -> bool:
    """Verify ``2*Area = 2*L - m - 2`` exactly for a nondegenerate polygon."""
    if p.is_degenerate():
        raise ECHError("Pick's formula needs a polygon with nonempty interior")
    return p.double_area() == 2 * lattice_count(p) - p.boundary_count() - 2


def round_corner(p: LatticePolygon, corner: int) -> LatticePolygon:
    """Hull of the enclosed lattice points with one vertex removed."""
    if p.is_point():
        raise ECHError("a point has no corner to round")
    verts = p.vertices()
    if not 0 <= corner < len(verts):
        raise ECHError(f"corner index {corner} out of range")
    removed = verts[corner]
    rest = [q for q in lattice_points(p) if q != removed]
    return LatticePolygon.from_points(rest)


def euclidean_length_exact(path: LatticePolygon) -> SqrtSum:
    total = SqrtSum()
    for v in path.edges:
        total = total + SqrtSum.sqrt(v.x * v.x + v.y * v.y)
    return total


def euclidean_length(path: LatticePolygon) -> float:
    """Euclidean perimeter as a float; use :func:`euclidean_length_exact` to compare."""
    return float(euclidean_length_exact(path))


# --------------------------------------------------------------------------
# Rational polygons and dual norms


@dataclass(frozen=True)
class RationalPolygon:
    """A convex polygon with rational vertices, stored counterclockwise."""

    vertices: tuple

    def __post_init__(self) -> None:
        pts = [(parse_rational(x), parse_rational(y)) for x, y in self.vertices]
        hull = convex_hull(pts)
        object.__setattr__(self, "vertices", tuple(hull))
        if len(hull) < 3:
            raise ECHError("region must have positive area")

    @classmethod
    def from_json(cls, data: dict) -> RationalPolygon:
        return cls(tuple(tuple(v) for v in data["vertices"]))

    def to_json(self) -> dict:
        return {"vertices": [[format_rational(x), format_rational(y)] for x, y in self.vertices]}

    def area(self) -> Fraction:
        vs = self.vertices
        n = len(vs)
        return abs(sum(cross(vs[i], vs[(i + 1) % n]) for i in range(n))) / 2

    def translated(self, dx, dy) -> RationalPolygon:
        dx, dy = Fraction(dx), Fraction(dy)
        return RationalPolygon(tuple((x + dx, y + dy) for x, y in self.vertices))

    def scaled(self, r) -> RationalPolygon:
        r = Fraction(r)
        if r <= 0:
            raise ECHError("scale factor must be positive")
        return RationalPolygon(tuple((x * r, y * r) for x, y in self.vertices))

    def vertex_mean(self) -> tuple[Fraction, Fraction]:
        n = len(self.vertices)
        return (sum(x for x, _ in self.vertices) / n, sum(y for _, y in self.vertices) / n)

    def centered(self) -> RationalPolygon:
        """The translate with its vertex mean (an interior point) at the origin."""
        cx, cy = self.vertex_mean()
        return self.translated(-cx, -cy)

    def contains_origin_strictly(self) -> bool:
        vs = self.vertices
        n = len(vs)
        return all(
            cross((vs[(i + 1) % n][0] - vs[i][0], vs[(i + 1) % n][1] - vs[i][1]), (-vs[i][0], -vs[i][1])) > 0
            for i in range(n)
        )

    def min_width_squared(self) -> Fraction:
        """Square of the minimal width (attained orthogonally to some edge)."""
        vs = self.vertices
        n = len(vs)
        best = None
        for i in range(n):
            a, b = vs[i], vs[(i + 1) % n]
            e = (b[0] - a[0], b[1] - a[1])
            far = max(abs(cross(e, (w[0] - a[0], w[1] - a[1]))) for w in vs)
            w2 = Fraction(far) ** 2 / (e[0] ** 2 + e[1] ** 2)
            best = w2 if best is None else min(best, w2)
        return best


def _support(vertices, v) -> Fraction:
    return max(v[0] * x + v[1] * y for x, y in vertices)


def dual_norm(omega_prime: RationalPolygon, v: Sequence[int]) -> Fraction:
    """``max <v, w>`` over ``w`` in ``omega_prime``, which must contain 0 in its interior."""
    if not omega_prime.contains_origin_strictly():
        raise ECHError("origin must lie in the interior of the translated region")
    return Fraction(_support(omega_prime.vertices, v))


def omega_length(omega: RationalPolygon, path: LatticePolygon, translate=(0, 0)) -> Fraction:
    """Sum of dual norms of the edges of ``path`` measured with ``omega + translate``."""
    shifted = omega.translated(*translate)
    if not shifted.contains_origin_strictly():
        raise ECHError("origin must lie in the interior of the translated region")
    return sum((Fraction(_support(shifted.vertices, v)) for v in path.edges), Fraction(0))

