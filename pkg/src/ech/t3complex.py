"""The combinatorial ECH chain complex of the three-torus.

Generators are convex lattice polygons modulo translation whose edges carry a
label ``e`` or ``h``.  The differential rounds a corner and loses one ``h``;
the U map rounds the corner picked out by a generic direction and keeps the
``h`` count.  Everything is over GF(2).
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .latgeom import (
    LatticePolygon,
    SqrtSum,
    angle_key,
    euclidean_length_exact,
    lattice_count,
    round_corner,
)
from .numkit import ECHError, parse_rational
from .polysearch import search_polygons

__all__ = [
    "ChainVector",
    "T3Direction",
    "T3Generator",
    "delta_squared_check",
    "differential",
    "enumerate_generators",
    "enumerate_polygons",
    "grading",
    "homology_rank",
    "homology_ranks",
    "t3_spectrum",
    "u_theta",
]

LABELS = ("e", "h")
# float slack for candidate collection; final decisions use exact SqrtSum
_SLACK = 1e-9


class T3Generator:
    """A labelled convex lattice polygon.  ``labels[i]`` belongs to ``polygon.edges[i]``."""

    __slots__ = ("polygon", "labels", "_key")

    def __init__(self, polygon: LatticePolygon, labels: Sequence[str] = ()):
        labels = tuple(labels)
        if len(labels) != len(polygon.edges):
            raise ECHError(f"{len(polygon.edges)} edges but {len(labels)} labels")
        if any(lab not in LABELS for lab in labels):
            raise ECHError("labels must be 'e' or 'h'")
        self.polygon = polygon
        self.labels = labels
        self._key = (polygon.sort_key(), labels)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple]) -> T3Generator:
        """Build from ``(x, y, label)`` triples; edges must point in distinct directions."""
        triples = [(int(x), int(y), lab) for x, y, lab in edges]
        poly = LatticePolygon((x, y) for x, y, _ in triples)
        if len(poly.edges) != len(triples):
            raise ECHError("edges must have distinct directions")
        by_vec = {(x, y): lab for x, y, lab in triples}
        return cls(poly, [by_vec[(v.x, v.y)] for v in poly.edges])

    @classmethod
    def point(cls) -> T3Generator:
        return cls(LatticePolygon.point(), ())

    def h_count(self) -> int:
        return self.labels.count("h")

    def sort_key(self) -> tuple:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, T3Generator) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __lt__(self, other: T3Generator) -> bool:
        return self._key < other._key

    def __repr__(self) -> str:
        inner = ", ".join(f"({v.x},{v.y}){lab}" for v, lab in zip(self.polygon.edges, self.labels))
        return f"T3Generator([{inner}])"

    def to_json(self) -> dict:
        return {"edges": [{"x": v.x, "y": v.y, "label": lab} for v, lab in zip(self.polygon.edges, self.labels)]}

    @classmethod
    def from_json(cls, data: dict) -> T3Generator:
        try:
            return cls.from_edges((e["x"], e["y"], e["label"]) for e in data["edges"])
        except KeyError as exc:
            raise ECHError(f"generator edge is missing {exc}") from None


class ChainVector:
    """A finite GF(2) combination of generators; ``+`` is symmetric difference."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[T3Generator] = ()):
        acc: set = set()
        for g in terms:
            acc ^= {g}
        self.terms = frozenset(acc)

    def __add__(self, other: ChainVector) -> ChainVector:
        out = ChainVector()
        out.terms = self.terms ^ other.terms
        return out

    def __iter__(self) -> Iterator[T3Generator]:
        return iter(sorted(self.terms))

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        return isinstance(other, ChainVector) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(self.terms)

    def __repr__(self) -> str:
        return "ChainVector(" + " + ".join(map(repr, self)) + ")" if self.terms else "ChainVector(0)"

    def to_json(self) -> list:
        return [g.to_json() for g in self]


def grading(g: T3Generator) -> int:
    """``2(L - 1) - h``."""
    return 2 * (lattice_count(g.polygon) - 1) - g.h_count()


def _relabel(old: T3Generator, new: LatticePolygon):
    """Labels carried over from ``old`` and the indices of created or shortened edges of ``new``."""
    before = {v.primitive: (v.divisibility, lab) for v, lab in zip(old.polygon.edges, old.labels)}
    base, touched = [], []
    for i, v in enumerate(new.edges):
        prev = before.get(v.primitive)
        if prev is not None and prev[0] == v.divisibility:
            base.append(prev[1])
        else:
            base.append("e")
            touched.append(i)
    return base, touched


def _with_one_h(poly: LatticePolygon, base: list, choices: Sequence[int]) -> Iterator[T3Generator]:
    for i in choices:
        labels = list(base)
        labels[i] = "h"
        yield T3Generator(poly, labels)


def _rounding_terms(g: T3Generator, corner: int) -> Iterator[T3Generator]:
    n = len(g.polygon.edges)
    h_in = g.labels[(corner - 1) % n] == "h"
    h_out = g.labels[corner] == "h"
    if not (h_in or h_out):
        return
    new = round_corner(g.polygon, corner)
    base, touched = _relabel(g, new)
    if h_in and h_out:
        yield from _with_one_h(new, base, touched)
    else:
        yield T3Generator(new, base)


@functools.lru_cache(maxsize=None)
def _differential(g: T3Generator) -> ChainVector:
    terms: list[T3Generator] = []
    for corner in range(len(g.polygon.edges)):
        terms.extend(_rounding_terms(g, corner))
    return ChainVector(terms)


def differential(g: T3Generator) -> ChainVector:
    """Sum over corners of the roundings that lose one ``h`` locally.

    Both adjacent edges labelled ``h``: one created or shortened edge becomes
    ``h``, summed over the choices, so a rounding that creates no edge
    contributes nothing.  A 2-gon has two corners whose roundings agree, so
    their terms cancel in pairs.
    """
    return _differential(g)


def apply(op, v: ChainVector) -> ChainVector:
    out = ChainVector()
    for g in v:
        out = out + op(g)
    return out


# --------------------------------------------------------------------------
# U map


@dataclass(frozen=True)
class T3Direction:
    """A generic direction: the integer vector ``(x, y)`` turned by ``+eps`` or ``-eps``."""

    x: int
    y: int
    side: str = "plus"

    def __post_init__(self):
        if (self.x, self.y) == (0, 0):
            raise ECHError("direction must be nonzero")
        if self.side not in ("plus", "minus"):
            raise ECHError("side must be 'plus' or 'minus'")

    def after(self, v) -> bool:
        """Whether edge direction ``v`` comes after this direction, within half a turn."""
        c = self.x * v[1] - self.y * v[0]
        if c:
            return c > 0
        same = self.x * v[0] + self.y * v[1] > 0
        # v parallel to the base vector: the infinitesimal decides
        return (self.side == "minus") if same else (self.side == "plus")

    def key(self) -> tuple:
        return (angle_key((self.x, self.y)), 0 if self.side == "minus" else 1)

    @classmethod
    def parse(cls, text: str) -> T3Direction:
        text = text.strip()
        side = "plus"
        if text and text[-1] in "+-":
            side = "plus" if text[-1] == "+" else "minus"
            text = text[:-1]
        x, y = (int(t) for t in text.strip("()").split(","))
        return cls(x, y, side)


def distinguished_corner(poly: LatticePolygon, theta: T3Direction) -> int:
    """The vertex where the line with direction ``theta`` supports ``poly`` with ``poly`` on its left."""
    edges = poly.edges
    if not edges:
        raise ECHError("a point has no corner")
    tkey = theta.key()
    # number of edges whose angle is below theta: the corner sits before edge j
    j = sum(1 for v in edges if (angle_key(v), 0.5) < tkey)
    return j % len(edges)


def _u_terms(g: T3Generator, theta: T3Direction) -> Iterator[T3Generator]:
    poly = g.polygon
    n = len(poly.edges)
    corner = distinguished_corner(poly, theta)
    h_in = g.labels[(corner - 1) % n] == "h"
    h_out = g.labels[corner] == "h"
    new = round_corner(poly, corner)
    base, touched = _relabel(g, new)
    preceding = [i for i in touched if not theta.after(new.edges[i])]
    following = [i for i in touched if theta.after(new.edges[i])]
    pre_choices = preceding if h_in else [None]
    fol_choices = following if h_out else [None]
    for a, b in itertools.product(pre_choices, fol_choices):
        labels = list(base)
        for i in (a, b):
            if i is not None:
                labels[i] = "h"
        yield T3Generator(new, labels)


def u_theta(g: T3Generator, theta: T3Direction) -> ChainVector:
    """Round the distinguished corner, conserving ``h`` labels on each side of it."""
    if g.polygon.is_point():
        return ChainVector()
    return ChainVector(_u_terms(g, theta))


# --------------------------------------------------------------------------
# Enumeration and spectrum


def _euclid(x: int, y: int) -> float:
    return math.hypot(x, y)


def _max_points(length: float) -> int:
    # isoperimetric bound on the area plus Pick
    return int(length * length / (4 * math.pi) + length / 2 + 1) + 1


def enumerate_polygons(cutoff, threads: int = 1) -> list[LatticePolygon]:
    """Every convex lattice polygon (degenerate ones included) of Euclidean length ``<= cutoff``."""
    cutoff = parse_rational(cutoff)
    if cutoff < 0:
        raise ECHError("cutoff must be nonnegative")
    c = float(cutoff)
    res = search_polygons(
        _euclid, int(c / 2) + 1, c, _max_points(c), slack=_SLACK, threads=threads, keep_all=True
    )
    exact = SqrtSum.rational(cutoff)
    out = []
    for items in res.polygons.values():
        for _, edges in items:
            poly = LatticePolygon(edges)
            if euclidean_length_exact(poly) <= exact:
                out.append(poly)
    out.sort(key=lambda p: p.sort_key())
    return out


@functools.lru_cache(maxsize=16)
def _generators(cutoff, threads: int) -> tuple:
    gens = []
    for poly in enumerate_polygons(cutoff, threads=threads):
        for labels in itertools.product(LABELS, repeat=len(poly.edges)):
            gens.append(T3Generator(poly, labels))
    return tuple(gens)


def enumerate_generators(cutoff, threads: int = 1) -> list[T3Generator]:
    """All labelled generators whose polygon has Euclidean length ``<= cutoff``."""
    return list(_generators(parse_rational(cutoff), threads))


def _nearest_witness(count: int) -> LatticePolygon:
    # greedy upper bound: the count nearest lattice points to a few centres
    r = int(math.sqrt(count)) + 3
    box = [(x, y) for x in range(-r, r + 1) for y in range(-r, r + 1)]
    best = None
    for ox, oy in ((0, 0), (0.5, 0), (0.5, 0.5)):
        pts = sorted(box, key=lambda p: ((p[0] - ox) ** 2 + (p[1] - oy) ** 2, p))[:count]
        poly = LatticePolygon.from_points(pts)
        while lattice_count(poly) > count:
            poly = min(
                (round_corner(poly, i) for i in range(len(poly.edges))),
                key=lambda q: (euclidean_length_exact(q), q.sort_key()),
            )
        key = (euclidean_length_exact(poly), poly.sort_key())
        if best is None or key < best[0]:
            best = (key, poly)
    return best[1]


@functools.lru_cache(maxsize=64)
def _spectrum(count: int, threads: int) -> tuple:
    bound = float(euclidean_length_exact(_nearest_witness(count))) + _SLACK
    res = search_polygons(_euclid, int(bound / 2) + 1, bound, count, slack=_SLACK, threads=threads)
    out = []
    for c in range(1, count + 1):
        cands = [LatticePolygon(e) for _, e in res.polygons[c]]
        best = min(cands, key=lambda p: (euclidean_length_exact(p), p.sort_key()))
        out.append((euclidean_length_exact(best), best))
    return tuple(out)


def t3_spectrum(k: int, threads: int = 1) -> tuple[SqrtSum, LatticePolygon]:
    """``min{ Euclidean length : L = k + 1 }`` with a minimising witness; the value is exact."""
    if k < 0:
        raise ECHError("k must be nonnegative")
    return _spectrum(k + 1, threads)[k]


# --------------------------------------------------------------------------
# Checks and homology


def delta_squared_check(length_cutoff, threads: int = 1) -> bool:
    """``delta(delta(g)) = 0`` for every generator within the cutoff."""
    return all(not apply(differential, differential(g)) for g in enumerate_generators(length_cutoff, threads))


def _gf2_rank(rows: list[int]) -> int:
    pivots: dict[int, int] = {}
    rank = 0
    for row in rows:
        while row:
            top = row.bit_length() - 1
            if top not in pivots:
                pivots[top] = row
                rank += 1
                break
            row ^= pivots[top]
    return rank


def _boundary_rank(source: list[T3Generator], target_index: dict) -> int:
    rows = []
    for g in source:
        row = 0
        for t in differential(g):
            row ^= 1 << target_index[t]
        rows.append(row)
    return _gf2_rank(rows)


def _rank_at(degree: int, cutoff, threads: int) -> int:
    by_degree: dict[int, list] = {}
    for g in enumerate_generators(cutoff, threads):
        gr = grading(g)
        if degree - 1 <= gr <= degree + 1:
            by_degree.setdefault(gr, []).append(g)
    here = by_degree.get(degree, [])
    below = {g: i for i, g in enumerate(by_degree.get(degree - 1, []))}
    at = {g: i for i, g in enumerate(here)}
    kernel = len(here) - _boundary_rank(here, below)
    image = _boundary_rank(by_degree.get(degree + 1, []), at)
    return kernel - image


def homology_ranks(degree: int, cutoffs: Sequence, threads: int = 1) -> list[tuple]:
    """``(cutoff, rank)`` for each length cutoff, in increasing order."""
    cuts = sorted(parse_rational(c) for c in cutoffs)
    if not cuts:
        raise ECHError("need at least one cutoff")
    if degree < 0:
        return [(c, 0) for c in cuts]
    return [(c, _rank_at(degree, c, threads)) for c in cuts]


def homology_rank(degree: int, cutoffs: Sequence, threads: int = 1) -> tuple[int, bool]:
    """GF(2) homology rank in ``degree`` of the length-filtered subcomplexes.

    Returns the rank at the largest cutoff and whether the last three cutoffs
    (or all of them, if fewer) agree.
    """
    ranks = [r for _, r in homology_ranks(degree, cutoffs, threads)]
    tail = ranks[-3:]
    return ranks[-1], len(set(tail)) == 1
