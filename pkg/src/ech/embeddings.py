"""Capacity obstructions to symplectic embeddings and the ellipsoid-into-ball sampler."""

from __future__ import annotations

import json
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .capacities import DisjointUnion, Ellipsoid, Polydisk, PointDomain, ToricDomain, ToricRegion
from .latgeom import RationalPolygon
from .numkit import ECHError, WeightSequence, parse_rational

__all__ = [
    "ObstructionReport",
    "StaircaseSample",
    "check_embedding",
    "domain_from_json",
    "parse_domain",
    "sharpness",
    "staircase_sample",
    "staircase_scan",
]


@dataclass(frozen=True)
class ObstructionReport:
    """Outcome of comparing ``c_k`` of two domains for ``k <= k_max``."""

    source: ToricDomain
    target: ToricDomain
    k_max: int
    obstructed_at: int | None = None
    c_source: Fraction | None = None
    c_target: Fraction | None = None
    note: str | None = None

    @property
    def obstructed(self) -> bool:
        return self.obstructed_at is not None

    @property
    def verdict(self) -> str:
        if self.obstructed:
            return f"obstructed_at({self.obstructed_at}, {self.c_source}, {self.c_target})"
        return f"no_obstruction_up_to({self.k_max})"


def _is_ball_union(d: ToricDomain) -> bool:
    if isinstance(d, DisjointUnion):
        return all(_is_ball_union(p) for p in d.parts)
    return isinstance(d, Ellipsoid) and d.a == d.b


def sharpness(source: ToricDomain, target: ToricDomain) -> str | None:
    """Cases where passing every capacity test is known to be sufficient."""
    if isinstance(source, Ellipsoid) and isinstance(target, Ellipsoid):
        return "sharp criterion, truncated"
    if _is_ball_union(source) and isinstance(target, Ellipsoid) and target.a == target.b:
        return "sharp criterion, truncated"
    if isinstance(source, Ellipsoid) and isinstance(target, Polydisk):
        return "sharp criterion, truncated"
    return None


def check_embedding(source: ToricDomain, target: ToricDomain, k_max: int, threads: int = 1) -> ObstructionReport:
    """First ``k`` with ``c_k(source) > c_k(target)``, if any up to ``k_max``."""
    if k_max < 0:
        raise ECHError("k_max must be nonnegative")
    cs = source.capacities(k_max + 1, threads=threads).values
    ct = target.capacities(k_max + 1, threads=threads).values
    note = sharpness(source, target)
    for k, (x, y) in enumerate(zip(cs, ct)):
        if x > y:
            return ObstructionReport(source, target, k_max, k, x, y, note)
    return ObstructionReport(source, target, k_max, note=note)


@dataclass(frozen=True)
class StaircaseSample:
    """Lower bound at truncation ``k_max`` for the ellipsoid-into-ball function ``f(a)``."""

    a: Fraction
    k_max: int
    value: Fraction
    argmax_k: int


def staircase_sample(a, k_max: int) -> StaircaseSample:
    """``max_{1<=k<=k_max} N(1,a)_k / N(1,1)_k``, exact."""
    a = parse_rational(a)
    if a < 1:
        raise ECHError("a must be at least 1")
    if k_max < 1:
        raise ECHError("k_max must be positive")
    num = WeightSequence(1, a).prefix(k_max + 1)
    den = WeightSequence(1, 1).prefix(k_max + 1)
    best, arg = None, 0
    for k in range(1, k_max + 1):
        r = num[k] / den[k]
        if best is None or r > best:
            best, arg = r, k
    return StaircaseSample(a, k_max, best, arg)


def staircase_scan(a_grid: Sequence, k_max: int, threads: int = 1) -> list[StaircaseSample]:
    grid = [parse_rational(a) for a in a_grid]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda a: staircase_sample(a, k_max), grid))
    return [staircase_sample(a, k_max) for a in grid]


# --------------------------------------------------------------------------
# Domain specifications

_SPEC = re.compile(r"^\s*([EPB])\(\s*([^,()]+?)\s*(?:,\s*([^,()]+?)\s*)?\)\s*$")


def parse_domain(text: str) -> ToricDomain:
    """``E(a,b)``, ``P(a,b)``, ``B(a)``, ``+``-joined unions of these, or a JSON file path."""
    text = text.strip()
    if "+" in text and not Path(text).exists():
        return DisjointUnion(tuple(parse_domain(t) for t in text.split("+")))
    m = _SPEC.match(text)
    if m:
        kind, x, y = m.groups()
        if kind == "B":
            if y is not None:
                raise ECHError(f"a ball takes one argument: {text!r}")
            return Ellipsoid(parse_rational(x), parse_rational(x))
        if y is None:
            raise ECHError(f"{kind}(a,b) needs two arguments: {text!r}")
        cls = Ellipsoid if kind == "E" else Polydisk
        return cls(parse_rational(x), parse_rational(y))
    path = Path(text)
    if path.is_file():
        return domain_from_json(json.loads(path.read_text()))
    raise ECHError(f"cannot parse domain {text!r}")


def domain_from_json(data: dict) -> ToricDomain:
    kind = data.get("type")
    if kind == "ellipsoid":
        return Ellipsoid(data["a"], data["b"])
    if kind == "polydisk":
        return Polydisk(data["a"], data["b"])
    if kind == "ball":
        return Ellipsoid(data["a"], data["a"])
    if kind == "point":
        return PointDomain()
    if kind == "union":
        return DisjointUnion(tuple(domain_from_json(p) for p in data["parts"]))
    if kind == "toric" or (kind is None and "vertices" in data):
        return ToricRegion(RationalPolygon.from_json(data))
    raise ECHError(f"unknown domain type {kind!r}")
