"""Branch-and-bound enumeration of convex lattice polygons under a norm.

Polygons are grown edge by edge in increasing angle from the lowest vertex,
so each translation class is produced exactly once.  A partial chain is cut
when

* its cost plus the norm of the closing vector exceeds the budget, or
* the remaining directions cannot close it (a sector test once the chain has
  turned past angle pi), or
* the convex hull of the chain already holds more lattice points than allowed.

The last test uses Pick's formula on the chain closed by a straight segment;
that region lies inside every completion.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

from .latgeom import angle_key

__all__ = ["SearchResult", "primitive_directions", "search_polygons"]

Cost = Callable[[int, int], float]


def primitive_directions(radius: int) -> list[tuple[int, int]]:
    out = [
        (x, y)
        for x in range(-radius, radius + 1)
        for y in range(-radius, radius + 1)
        if (x or y) and gcd(x, y) == 1
    ]
    out.sort(key=angle_key)
    return out


@dataclass
class SearchResult:
    """Per lattice count, the cheapest cost found and the polygons within slack of it.

    With ``keep_all`` every polygon offered is retained.
    """

    best: dict[int, float] = field(default_factory=dict)
    polygons: dict[int, list[tuple]] = field(default_factory=dict)
    nodes: int = 0
    keep_all: bool = False

    def offer(self, count: int, cost: float, edges: tuple, slack: float) -> None:
        cur = self.best.get(count)
        if self.keep_all:
            if cur is None or cost < cur:
                self.best[count] = cost
            self.polygons.setdefault(count, []).append((cost, edges))
            return
        if not slack:
            # exact costs: keep one witness, ties broken by canonical edge order
            if cur is None or cost < cur or (cost == cur and edges < self.polygons[count][0][1]):
                self.best[count] = cost
                self.polygons[count] = [(cost, edges)]
            return
        if cur is None or cost < cur - slack:
            self.best[count] = cost
            self.polygons[count] = [(cost, edges)]
        elif cost <= cur + slack:
            if cost < cur:
                self.best[count] = cost
            self.polygons[count].append((cost, edges))

    def merge(self, other: SearchResult, slack: float) -> None:
        self.nodes += other.nodes
        for count in sorted(other.polygons):
            for cost, edges in other.polygons[count]:
                self.offer(count, cost, edges, slack)

    def prune(self, slack: float) -> None:
        if self.keep_all:
            return
        for count in self.polygons:
            cur = self.best[count]
            self.polygons[count] = [(c, e) for c, e in self.polygons[count] if c <= cur + slack]


def _search_from(first: int, dirs, costs, cost: Cost, bound, max_points: int, slack, keep_all) -> SearchResult:
    result = SearchResult(keep_all=keep_all)
    ndirs = len(dirs)
    ux_max, uy_max = dirs[-1]
    limit = bound + slack
    lower_half = [angle_key(u)[0] == 1 for u in dirs]
    edges: list = []

    def dfs(i: int, x: int, y: int, c, a2: int, bd: int) -> None:
        result.nodes += 1
        for j in range(i, ndirs):
            ux, uy = dirs[j]
            cu = costs[j]
            if c + cu > limit:
                continue
            d = 0
            nx, ny, nc, na2, nbd = x, y, c, a2, bd
            while True:
                d += 1
                na2 += nx * uy - ny * ux
                nx += ux
                ny += uy
                nc += cu
                nbd += 1
                if nc > limit:
                    break
                if nx == 0 and ny == 0:
                    # closed: the chain is a full polygon
                    count = (na2 + nbd) // 2 + 1
                    if count <= max_points:
                        edges.append((ux * d, uy * d))
                        result.offer(count, nc, tuple(edges), slack)
                        edges.pop()
                    break
                if nc + cost(-nx, -ny) > limit:
                    # the lower bound c + |closing| never decreases as d grows
                    break
                k = j + 1
                if k >= ndirs:
                    continue
                if lower_half[k]:
                    # sector test: -s must lie between the next direction and the last one
                    X, Y = -nx, -ny
                    if not (Y < 0 or (Y == 0 and X < 0)):
                        continue
                    vx, vy = dirs[k]
                    if vx * Y - vy * X < 0 or X * uy_max - Y * ux_max < 0:
                        continue
                count = (na2 + nbd + gcd(nx, ny)) // 2 + 1
                if count > max_points:
                    break
                edges.append((ux * d, uy * d))
                dfs(j + 1, nx, ny, nc, na2, nbd)
                edges.pop()

    # the chain must start with direction `first`
    ux, uy = dirs[first]
    cu = costs[first]
    x = y = a2 = bd = 0
    c = 0
    d = 0
    while True:
        d += 1
        x += ux
        y += uy
        c += cu
        bd += 1
        if c + cost(-x, -y) > limit:
            break
        count = (bd + gcd(x, y)) // 2 + 1
        if count > max_points:
            break
        edges.append((ux * d, uy * d))
        dfs(first + 1, x, y, c, a2, bd)
        edges.pop()
    return result


def search_polygons(
    cost: Cost,
    radius: int,
    bound,
    max_points: int,
    slack=0,
    threads: int = 1,
    keep_all: bool = False,
) -> SearchResult:
    """Enumerate every convex lattice polygon with cost <= bound and at most ``max_points`` points.

    ``cost(x, y)`` must be a positive norm-like function (triangle inequality,
    positive on nonzero vectors); ``radius`` must bound the sup-norm of any edge
    direction that can appear.  The point polygon is always included.  By
    default only the cheapest polygons per lattice count are kept (within
    ``slack``); ``keep_all`` retains every polygon found.
    """
    dirs = primitive_directions(radius)
    costs = [cost(x, y) for x, y in dirs]
    keep = [i for i, (x, y) in enumerate(dirs) if costs[i] + cost(-x, -y) <= bound + slack]
    dirs = [dirs[i] for i in keep]
    costs = [costs[i] for i in keep]
    result = SearchResult(keep_all=keep_all)
    result.offer(1, 0 * bound, (), slack)
    # the first edge of a canonical chain points into the upper half-plane
    starts = [i for i, u in enumerate(dirs) if angle_key(u)[0] == 0]

    def run(i: int) -> SearchResult:
        return _search_from(i, dirs, costs, cost, bound, max_points, slack, keep_all)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(i) for i in starts]
    for part in parts:
        result.merge(part, slack)
    result.prune(slack)
    return result
