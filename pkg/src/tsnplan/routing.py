"""Candidate route computation: short, diverse routes per stream.

The first candidate is the minimum-hop route. Further candidates come from
re-running Dijkstra in a weighted view where links already used by selected
routes cost 10 instead of 1, which steers later candidates away from earlier
ones without forbidding overlap outright.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .model import Link, Network

PENALTY_WEIGHT = 10


class Unreachable(Exception):
    pass


@dataclass(frozen=True)
class Route:
    links: tuple[Link, ...]

    @property
    def nodes(self) -> tuple[str, ...]:
        return (self.links[0].src,) + tuple(l.dst for l in self.links)

    @property
    def hop_count(self) -> int:
        return len(self.links)

    @property
    def link_keys(self) -> tuple[tuple[str, str], ...]:
        return tuple(l.key for l in self.links)

    def check(self, net: Network) -> None:
        if not self.links:
            raise ValueError("empty route")
        nodes = self.nodes
        if len(set(nodes)) != len(nodes):
            raise ValueError("route repeats a node")
        for a, b in zip(self.links, self.links[1:]):
            if a.dst != b.src:
                raise ValueError("route links are not contiguous")
        for interior in nodes[1:-1]:
            if not net.is_bridge(interior):
                raise ValueError(f"interior node {interior!r} is not a bridge")


def _dijkstra(net: Network, src: str, dst: str, weights: dict | None) -> Route:
    """Min-cost path, ties broken by lexicographically smallest node sequence.

    Interior nodes are restricted to bridges; end devices other than dst are
    never entered.
    """

    def w(link: Link) -> int:
        if weights is None:
            return 1
        return weights.get(link.key, 1)

    # heap entries carry the node-id path so equal-cost pops come out in
    # lexicographic order
    heap: list[tuple[int, tuple[str, ...]]] = [(0, (src,))]
    done: set[str] = set()
    while heap:
        cost, path = heapq.heappop(heap)
        node = path[-1]
        if node == dst:
            links = tuple(net.link(a, b) for a, b in zip(path, path[1:]))
            return Route(links)
        if node in done:
            continue
        done.add(node)
        for link in net.out_links(node):
            nxt = link.dst
            if nxt in done or nxt in path:
                continue
            if nxt != dst and not net.is_bridge(nxt):
                continue
            heapq.heappush(heap, (cost + w(link), path + (nxt,)))
    raise Unreachable(f"no route from {src!r} to {dst!r}")


def shortest_path(net: Network, src: str, dst: str) -> Route:
    """Minimum-hop route between two end devices."""
    return _dijkstra(net, src, dst, None)


def candidate_routes(net: Network, src: str, dst: str, k: int = 2) -> list[Route]:
    """Up to k distinct routes, later ones penalized away from earlier ones."""
    if k < 1:
        raise ValueError("k must be >= 1")
    routes = [shortest_path(net, src, dst)]
    used: set[tuple[str, str]] = set(routes[0].link_keys)
    while len(routes) < k:
        weights = {key: PENALTY_WEIGHT for key in used}
        nxt = _dijkstra(net, src, dst, weights)
        if any(nxt.links == r.links for r in routes):
            break  # penalty view is now stable, no further distinct route
        routes.append(nxt)
        used.update(nxt.link_keys)
    return routes
