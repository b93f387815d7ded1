"""Dragonfly and Slim Fly switch graphs with classified links and failures.

Switches and endpoints are indexed densely per kind; endpoint k attaches to
switch k // p. Links are bidirectional records; one record per pair, both
directions share the `up` flag (failures take out the full duplex link).
"""

from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from random import Random

from .errors import DisconnectedAfterFailure, InvalidParameter, Unreachable
from .gf import GF

LOCAL = "local"
GLOBAL = "global"
ENDPOINT = "endpoint"

DEFAULT_LOCAL_NS = 25.0
DEFAULT_GLOBAL_NS = 500.0

FAIL_RETRY_BUDGET = 200


@dataclass(frozen=True)
class NodeId:
    kind: str  # "switch" | "endpoint"
    index: int


@dataclass
class Link:
    a: NodeId
    b: NodeId
    cls: str  # local | global | endpoint
    propagation_ns: float
    up: bool = True


@dataclass
class DragonflyParams:
    p: int  # endpoints per switch
    a: int  # switches per group
    h: int  # global links per switch

    @property
    def groups(self) -> int:
        return self.a * self.h + 1


@dataclass
class SlimFlyParams:
    q: int
    p: int
    delta: int = 0  # derived from q at build time when 0 and q % 4 != 0


class Topology:
    """Immutable after construction; safe to share read-only."""

    def __init__(self, kind, params, num_switches, endpoints_per_switch,
                 group_of, links, local_ns=DEFAULT_LOCAL_NS, global_ns=DEFAULT_GLOBAL_NS):
        self.kind = kind
        self.params = params
        self.num_switches = num_switches
        self.endpoints_per_switch = endpoints_per_switch
        self.num_endpoints = num_switches * endpoints_per_switch
        self.group_of = group_of  # group (DF) / row (SF) per switch
        self.num_groups = max(group_of) + 1 if group_of else 0
        self.links = links  # switch-to-switch links only; endpoint links implicit
        self.local_ns = local_ns
        self.global_ns = global_ns
        # adjacency: neighbor id -> link index, neighbors sorted ascending
        adj: list[dict[int, int]] = [dict() for _ in range(num_switches)]
        for li, lk in enumerate(links):
            u, v = lk.a.index, lk.b.index
            adj[u][v] = li
            adj[v][u] = li
        self.neighbor_ids = [sorted(d.keys()) for d in adj]
        self._link_of = adj
        self.global_neighbors = [set() for _ in range(num_switches)]
        for lk in links:
            if lk.cls == GLOBAL:
                self.global_neighbors[lk.a.index].add(lk.b.index)
                self.global_neighbors[lk.b.index].add(lk.a.index)
        self._dist_cache: dict[int, list[int]] = {}
        self._dist_cache_up: dict[int, list[int]] = {}
        self._spath_cache: dict[tuple[int, int, bool], tuple[int, ...]] = {}

    # -- basic queries ---------------------------------------------------------

    def switch_of_endpoint(self, e: int) -> int:
        return e // self.endpoints_per_switch

    def endpoints_of_switch(self, s: int) -> range:
        p = self.endpoints_per_switch
        return range(s * p, (s + 1) * p)

    def neighbors(self, s: int, up_only: bool = False) -> list[int]:
        if not up_only:
            return self.neighbor_ids[s]
        return [n for n in self.neighbor_ids[s] if self.links[self._link_of[s][n]].up]

    def link_between(self, u: int, v: int) -> Link:
        return self.links[self._link_of[u][v]]

    def link_class(self, u: int, v: int) -> str:
        return GLOBAL if v in self.global_neighbors[u] else LOCAL

    def degree(self, s: int) -> int:
        return len(self.neighbor_ids[s])

    # -- shortest paths --------------------------------------------------------

    def dist_from(self, dst: int, up_only: bool = True) -> list[int]:
        """BFS hop distances from every switch to dst (cached per dst)."""
        cache = self._dist_cache_up if up_only else self._dist_cache
        got = cache.get(dst)
        if got is not None:
            return got
        dist = [-1] * self.num_switches
        dist[dst] = 0
        dq = deque([dst])
        while dq:
            u = dq.popleft()
            du = dist[u]
            for v in self.neighbors(u, up_only=up_only):
                if dist[v] < 0:
                    dist[v] = du + 1
                    dq.append(v)
        cache[dst] = dist
        return dist

    def shortest_path(self, src: int, dst: int, up_only: bool = True) -> tuple[int, ...]:
        """Hops after src on the canonical minimal path (lowest-id tie-break).

        Returns () when src == dst. Raises Unreachable when no up path exists.
        """
        if src == dst:
            return ()
        key = (src, dst, up_only)
        got = self._spath_cache.get(key)
        if got is not None:
            return got
        dist = self.dist_from(dst, up_only=up_only)
        if dist[src] < 0:
            raise Unreachable(f"no path {src} -> {dst}")
        hops = []
        cur = src
        while cur != dst:
            d = dist[cur]
            for n in self.neighbors(cur, up_only=up_only):
                if dist[n] == d - 1:
                    cur = n
                    break
            hops.append(cur)
        out = tuple(hops)
        self._spath_cache[key] = out
        return out

    def diameter(self, up_only: bool = True) -> int:
        best = 0
        for s in range(self.num_switches):
            dist = self.dist_from(s, up_only=up_only)
            m = max(dist)
            if min(dist) < 0:
                raise Unreachable("graph is disconnected")
            best = max(best, m)
        return best

    def is_connected(self, up_only: bool = True) -> bool:
        dist = self.dist_from(0, up_only=up_only)
        return all(d >= 0 for d in dist)

    # -- export ----------------------------------------------------------------

    def to_json(self) -> dict:
        params = dict(self.params.__dict__)
        doc = {
            "kind": self.kind,
            "parameters": params,
            "nodes": {"switches": self.num_switches, "endpoints": self.num_endpoints,
                      "groups": self.num_groups},
            "group_of": list(self.group_of),
            "links": [
                {"a": {"kind": lk.a.kind, "index": lk.a.index},
                 "b": {"kind": lk.b.kind, "index": lk.b.index},
                 "class": lk.cls, "propagation_ns": lk.propagation_ns, "up": lk.up}
                for lk in self.links
            ],
            "endpoint_links": {
                "per_switch": self.endpoints_per_switch,
                "class": ENDPOINT,
                "propagation_ns": self.local_ns,
            },
        }
        return doc

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


# -- Dragonfly ------------------------------------------------------------------


def build_dragonfly(params: DragonflyParams,
                    local_ns: float = DEFAULT_LOCAL_NS,
                    global_ns: float = DEFAULT_GLOBAL_NS) -> Topology:
    """Canonical Dragonfly: all-to-all groups, one global link per group pair.

    Switch i of group g owns the global links with group offsets
    i*h+1 .. (i+1)*h (mod group count), so every pair of groups is joined by
    exactly one global link when groups = a*h + 1.
    """
    p, a, h = params.p, params.a, params.h
    if p < 1 or a < 1 or h < 1:
        raise InvalidParameter("dragonfly requires p, a, h >= 1")
    groups = params.groups
    num_switches = a * groups
    group_of = [s // a for s in range(num_switches)]
    links: list[Link] = []

    def sw(g, i):
        return NodeId("switch", g * a + i)

    for g in range(groups):
        for i in range(a):
            for j in range(i + 1, a):
                links.append(Link(sw(g, i), sw(g, j), LOCAL, local_ns))
    owner = lambda d: (d - 1) // h  # switch position owning group-offset d
    for g in range(groups):
        for d in range(1, a * h + 1):
            g2 = (g + d) % groups
            if g < g2:
                d2 = groups - d
                links.append(Link(sw(g, owner(d)), sw(g2, owner(d2)), GLOBAL, global_ns))
    topo = Topology("dragonfly", params, num_switches, p, group_of, links,
                    local_ns, global_ns)
    for s in range(num_switches):
        locals_ = sum(1 for n in topo.neighbor_ids[s] if topo.link_class(s, n) == LOCAL)
        globals_ = topo.degree(s) - locals_
        assert locals_ == a - 1 and globals_ == h, "dragonfly wiring invariant broken"
    return topo


def intra_group_neighbors(topo: Topology, s: int) -> list[int]:
    """Local (same-group) neighbor table, sorted by id — the DF intra ECMP table."""
    g = topo.group_of[s]
    return [n for n in topo.neighbor_ids[s] if topo.group_of[n] == g]


# -- Slim Fly (MMS construction) --------------------------------------------------


def _generator_sets(f: GF, delta: int) -> tuple[set[int], set[int]]:
    """Generator sets X (subgraph 0) and X' (subgraph 1) of the MMS graph.

    q = 4w + delta. Both sets are closed under negation and have
    (q - delta) / 2 elements, giving network degree (3q - delta) / 2.
    """
    q = f.q
    pw = f.powers_of_primitive()  # xi^0 .. xi^(q-2)
    w = (q - delta) // 4
    if delta == 1:
        x1 = {pw[e] for e in range(0, q - 2, 2)}
        x2 = {pw[e] for e in range(1, q - 1, 2)}
    else:
        # delta in {-1, 0}: even exponents 0..2w-2 plus odd 2w-1..4w-3, and xi * that
        x1 = {pw[e] for e in range(0, 2 * w - 1, 2)}
        x1 |= {pw[e % (q - 1)] for e in range(2 * w - 1, 4 * w - 2, 2)}
        x2 = {pw[(e + 1) % (q - 1)] for e in range(0, 2 * w - 1, 2)}
        x2 |= {pw[(e + 1) % (q - 1)] for e in range(2 * w - 1, 4 * w - 2, 2)}
    for xs in (x1, x2):
        assert len(xs) == (q - delta) // 2, "generator set has wrong size"
        assert all(f.neg(x) in xs for x in xs), "generator set not symmetric"
    return x1, x2


def build_slimfly(params: SlimFlyParams,
                  local_ns: float = DEFAULT_LOCAL_NS,
                  global_ns: float = DEFAULT_GLOBAL_NS,
                  validate: bool = True) -> Topology:
    """MMS graph on 2*q^2 switches, diameter 2, degree (3q - delta)/2.

    Switches are (subgraph, row, col): subgraph 0 holds (x, y) with links
    y - y' in X inside a row; subgraph 1 holds (m, c) with links c - c' in X';
    cross links satisfy y = m*x + c. Rows (fixed x or m) are the 2q Slim Fly
    groups: intra-row generator links are `local`, cross links `global`.
    """
    q, p = params.q, params.p
    if p < 1:
        raise InvalidParameter("slimfly requires p >= 1")
    rem = q % 4
    delta = {0: 0, 1: 1, 3: -1}.get(rem)
    if delta is None:
        raise InvalidParameter(f"q={q}: no delta in {{-1,0,1}} with q = 4w + delta")
    if params.delta and params.delta != delta:
        raise InvalidParameter(f"q={q} requires delta={delta}, got {params.delta}")
    params.delta = delta
    f = GF(q)
    x1, x2 = _generator_sets(f, delta)

    def sid(sub, row, col):
        return sub * q * q + row * q + col

    num_switches = 2 * q * q
    group_of = [0] * num_switches
    for sub in (0, 1):
        for row in range(q):
            for col in range(q):
                group_of[sid(sub, row, col)] = sub * q + row
    links: list[Link] = []
    for sub, gen in ((0, x1), (1, x2)):
        for row in range(q):
            for c1 in range(q):
                for c2 in range(c1 + 1, q):
                    if f.sub(c1, c2) in gen:
                        links.append(Link(NodeId("switch", sid(sub, row, c1)),
                                          NodeId("switch", sid(sub, row, c2)),
                                          LOCAL, local_ns))
    for x in range(q):
        for y in range(q):
            for m in range(q):
                c = f.sub(y, f.mul[m][x])  # y = m*x + c
                links.append(Link(NodeId("switch", sid(0, x, y)),
                                  NodeId("switch", sid(1, m, c)),
                                  GLOBAL, global_ns))
    topo = Topology("slimfly", params, num_switches, p, group_of, links,
                    local_ns, global_ns)
    kprime = (3 * q - delta) // 2
    for s in range(num_switches):
        if topo.degree(s) != kprime:
            raise InvalidParameter(
                f"MMS construction failed: switch {s} has degree {topo.degree(s)} != {kprime}")
    if validate and topo.diameter() != 2:
        raise InvalidParameter("MMS construction failed: diameter != 2")
    return topo


# -- failures ---------------------------------------------------------------------


def fail_links(topo: Topology, fraction: float, seed: int) -> Topology:
    """Copy of the topology with floor(fraction * L) switch links marked down.

    The sample is drawn uniformly by a seeded RNG and resampled (bounded
    retries) until the up-graph stays connected. Endpoint links never fail.
    """
    if not 0 <= fraction < 1:
        raise InvalidParameter("failure fraction must be in [0, 1)")
    count = int(fraction * len(topo.links))
    rng = Random(f"fail:{seed}")
    for _ in range(FAIL_RETRY_BUDGET):
        down = set(rng.sample(range(len(topo.links)), count)) if count else set()
        links = [Link(lk.a, lk.b, lk.cls, lk.propagation_ns, up=(li not in down))
                 for li, lk in enumerate(topo.links)]
        out = Topology(topo.kind, topo.params, topo.num_switches,
                       topo.endpoints_per_switch, topo.group_of, links,
                       topo.local_ns, topo.global_ns)
        if out.is_connected(up_only=True):
            return out
    raise DisconnectedAfterFailure(
        f"no connected sample with {count} failed links in {FAIL_RETRY_BUDGET} tries")
