"""Vertex-colored conflict graph over (stream, route, phase) configurations.

Vertices are configurations, colors are streams, and an edge joins two
differently-colored configurations whose frames overlap on a shared directed
link somewhere in their pairwise hypercycle. Same-color conflicts are never
materialized: the colorful-set rule already forbids picking two vertices of
one color.

Insertion checks the new configuration against every existing one. To keep
that affordable at graph sizes in the tens of thousands, occupancy intervals
are indexed per directed link in flat numpy arrays and the periodic-overlap
test runs vectorized over each link's interval list.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .model import Network, Stream
from .routing import Route
from .timing import OccupancySchedule, link_occupancy, max_phase

PAGERANK_DAMPING = 0.85
PAGERANK_ITERATIONS = 4


class DuplicateConfiguration(Exception):
    pass


class NoVertices(Exception):
    pass


@dataclass(frozen=True)
class Configuration:
    stream: Stream
    route_index: int
    route: Route
    phase: int
    schedule: OccupancySchedule

    @classmethod
    def build(
        cls, net: Network, stream: Stream, route_index: int, route: Route, phase: int
    ) -> "Configuration":
        mp = max_phase(net, stream, route)
        if phase < 0 or phase > mp:
            raise ValueError(f"phase {phase} outside [0, {mp}]")
        return cls(stream, route_index, route, phase, link_occupancy(net, stream, route, phase))

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.stream.id, self.route_index, self.phase)


class _Bucket:
    """Growable interval store for one directed link."""

    __slots__ = ("n", "vid", "start", "length", "period", "color")

    def __init__(self):
        self.n = 0
        cap = 16
        self.vid = np.empty(cap, dtype=np.int64)
        self.start = np.empty(cap, dtype=np.int64)
        self.length = np.empty(cap, dtype=np.int64)
        self.period = np.empty(cap, dtype=np.int64)
        self.color = np.empty(cap, dtype=np.int64)

    def append(self, vid: int, start: int, length: int, period: int, color: int):
        if self.n == len(self.vid):
            for name in self.__slots__[1:]:
                arr = getattr(self, name)
                grown = np.empty(2 * len(arr), dtype=np.int64)
                grown[: self.n] = arr[: self.n]
                setattr(self, name, grown)
        i = self.n
        self.vid[i] = vid
        self.start[i] = start
        self.length[i] = length
        self.period[i] = period
        self.color[i] = color
        self.n += 1

    def query(self, start: int, end: int, period: int, color: int) -> np.ndarray:
        """Vids of stored intervals of other colors whose periodic repetitions
        overlap [start, end) repeated with `period` (hypercycle-bounded)."""
        n = self.n
        if n == 0:
            return np.empty(0, dtype=np.int64)
        sb = self.start[:n]
        lb = self.length[:n]
        pb = self.period[:n]
        g = np.gcd(pb, period)
        h = (pb // g) * period
        d = sb - start
        la = end - start
        lo = np.maximum(-lb - d + 1, -(h - period))
        hi = np.minimum(la - d - 1, h - pb)
        hit = (lo <= hi) & (lo <= (hi // g) * g) & (self.color[:n] != color)
        return self.vid[:n][hit]

    def filter(self, keep_mask: np.ndarray):
        n = self.n
        idx = np.flatnonzero(keep_mask)
        for name in self.__slots__[1:]:
            arr = getattr(self, name)
            arr[: len(idx)] = arr[:n][idx]
        self.n = len(idx)


class ConflictGraph:
    def __init__(self):
        self._configs: list[Configuration | None] = []
        self._alive: list[bool] = []
        self._n_alive = 0
        self._color_vids: dict[str, list[int]] = {}
        self._key2vid: dict[tuple[str, int, int], int] = {}
        self._color_code: dict[str, int] = {}
        self._buckets: dict[tuple[str, str], _Bucket] = {}
        self._back: list[np.ndarray] = []  # conflicts to earlier vids
        self._deg = np.zeros(16, dtype=np.int64)  # capacity-doubled, len(_configs) used
        self._edges = 0
        self._pending_removal = False
        self._csr: sp.csr_matrix | None = None

    # -- basic accessors ---------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return self._n_alive

    @property
    def slot_count(self) -> int:
        """Number of vertex id slots ever allocated, including removed ones."""
        return len(self._configs)

    @property
    def edge_count(self) -> int:
        self._flush_removals()
        return self._edges

    def colors(self) -> set[str]:
        return set(self._color_vids)

    def vids_of(self, stream_id: str) -> list[int]:
        return list(self._color_vids.get(stream_id, ()))

    def config(self, vid: int) -> Configuration:
        cfg = self._configs[vid]
        if cfg is None:
            raise KeyError(f"vertex {vid} was removed")
        return cfg

    def vids(self) -> list[int]:
        return [v for v in range(len(self._configs)) if self._alive[v]]

    def find_vid(self, stream_id: str, route_index: int, phase: int) -> int | None:
        return self._key2vid.get((stream_id, route_index, phase))

    def degree(self, vid: int) -> int:
        self._flush_removals()
        return int(self._deg[vid])

    def neighbors(self, vid: int) -> np.ndarray:
        m = self.csr()
        return m.indices[m.indptr[vid] : m.indptr[vid + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.neighbors(u)

    def edges(self) -> list[tuple[int, int]]:
        self._flush_removals()
        out = []
        for v in range(len(self._configs)):
            if self._alive[v]:
                out.extend((int(u), v) for u in self._back[v])
        return out

    # -- mutation ----------------------------------------------------------

    def add_configuration(self, cfg: Configuration) -> int:
        self._flush_removals()
        if cfg.key in self._key2vid:
            raise DuplicateConfiguration(f"{cfg.key} already present")
        sid = cfg.stream.id
        code = self._color_code.setdefault(sid, len(self._color_code))
        period = cfg.stream.period

        hits = []
        for link_key, start, end in cfg.schedule.entries:
            bucket = self._buckets.get(link_key)
            if bucket is not None:
                hits.append(bucket.query(start, end, period, code))
        if hits:
            nbrs = np.unique(np.concatenate(hits))
        else:
            nbrs = np.empty(0, dtype=np.int64)

        vid = len(self._configs)
        self._configs.append(cfg)
        self._alive.append(True)
        self._n_alive += 1
        self._back.append(nbrs)
        if vid == len(self._deg):
            grown = np.zeros(2 * len(self._deg), dtype=np.int64)
            grown[:vid] = self._deg
            self._deg = grown
        self._deg[vid] = len(nbrs)
        self._deg[nbrs] += 1  # nbrs is unique, fancy add is safe
        self._edges += len(nbrs)
        self._color_vids.setdefault(sid, []).append(vid)
        self._key2vid[cfg.key] = vid
        for link_key, start, end in cfg.schedule.entries:
            bucket = self._buckets.setdefault(link_key, _Bucket())
            bucket.append(vid, start, end - start, period, code)
        self._csr = None
        return vid

    def remove_stream(self, stream_id: str) -> int:
        vids = self._color_vids.pop(stream_id, None)
        if not vids:
            return 0
        for v in vids:
            self._key2vid.pop(self._configs[v].key)
            self._configs[v] = None
            self._alive[v] = False
        self._n_alive -= len(vids)
        self._pending_removal = True
        self._csr = None
        return len(vids)

    def _flush_removals(self) -> None:
        """Purge dead vertices from the link index and adjacency; done once
        per removal batch, on the next query or insertion."""
        if not self._pending_removal:
            return
        alive = np.array(self._alive, dtype=bool)
        for bucket in self._buckets.values():
            n = bucket.n
            if n:
                bucket.filter(alive[bucket.vid[:n]])
        deg = np.zeros(len(self._configs), dtype=np.int64)
        edges = 0
        for v in range(len(self._configs)):
            if not alive[v]:
                self._back[v] = np.empty(0, dtype=np.int64)
                continue
            nb = self._back[v]
            if len(nb):
                nb = nb[alive[nb]]
                self._back[v] = nb
            deg[v] += len(nb)
            deg[nb] += 1
            edges += len(nb)
        self._deg = deg
        self._edges = edges
        self._pending_removal = False

    # -- derived structure and metrics -------------------------------------

    def csr(self) -> sp.csr_matrix:
        self._flush_removals()
        if self._csr is None:
            n = len(self._configs)
            rows = [np.empty(0, dtype=np.int64)]
            cols = [np.empty(0, dtype=np.int64)]
            for v in range(n):
                nb = self._back[v]
                if self._alive[v] and len(nb):
                    rows.append(np.full(len(nb), v, dtype=np.int64))
                    cols.append(nb)
            r = np.concatenate(rows)
            c = np.concatenate(cols)
            data = np.ones(2 * len(r), dtype=np.int8)
            self._csr = sp.csr_matrix(
                (data, (np.concatenate([r, c]), np.concatenate([c, r]))),
                shape=(n, n),
            )
        return self._csr

    def avg_degree(self, stream_id: str) -> Fraction:
        vids = self._color_vids.get(stream_id)
        if not vids:
            raise NoVertices(f"stream {stream_id!r} has no vertices")
        self._flush_removals()
        return Fraction(int(sum(self._deg[v] for v in vids)), len(vids))

    def page_rank(
        self,
        iterations: int = PAGERANK_ITERATIONS,
        damping: float = PAGERANK_DAMPING,
    ) -> dict[int, float]:
        """Power iteration treating each edge as two directed arcs; degree-0
        vertices spread their mass uniformly. Scores are renormalized every
        iteration and sum to 1."""
        n = self._n_alive
        if n == 0:
            return {}
        m = self.csr()
        slots = len(self._configs)
        alive = np.array(self._alive, dtype=bool)
        deg = np.asarray(m.sum(axis=1)).ravel().astype(np.float64)
        dangling = alive & (deg == 0)
        safe = np.where(deg > 0, deg, 1.0)
        p = np.where(alive, 1.0 / n, 0.0)
        for _ in range(iterations):
            spread = m @ (p / safe)
            mass = p[dangling].sum()
            p_new = (1.0 - damping) / n + damping * (spread + mass / n)
            p_new = np.where(alive, p_new, 0.0)
            p = p_new / p_new.sum()
        return {v: float(p[v]) for v in range(slots) if alive[v]}

    def stream_rank(self, pr: dict[int, float], stream_id: str) -> float:
        vids = self._color_vids.get(stream_id)
        if not vids:
            raise NoVertices(f"stream {stream_id!r} has no vertices")
        return sum(pr[v] for v in vids)

    # -- debugging ---------------------------------------------------------

    def to_json(self) -> str:
        verts = [
            {
                "vid": v,
                "stream": self._configs[v].stream.id,
                "route_index": self._configs[v].route_index,
                "phase": self._configs[v].phase,
            }
            for v in self.vids()
        ]
        return json.dumps({"vertices": verts, "edges": self.edges()}, indent=1)
