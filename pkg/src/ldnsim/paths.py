"""Bounded simple path enumeration and source-side endpoint tables.

A path between switches is controlled by its first two hops: the source
switch resolves the high EV byte against its canonical neighbor table, the
second switch resolves the low byte, and the remainder follows the canonical
minimal route. Enumeration therefore walks (first hop, second hop) pairs and
keeps every simple path whose (local, global) hop pattern is admissible for
the topology: the nine Dragonfly patterns up to 3 local + 2 global hops, or
any Slim Fly pattern of at most 4 hops total.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameter, Unreachable
from .topology import GLOBAL, LOCAL, Topology, intra_group_neighbors

# flag bits of the EV entry metadata byte
META_TEMP_UNAVAILABLE = 0x01
META_PERM_UNAVAILABLE = 0x02

MIN_WITHIN = "minimal_within_group"
MIN_ACROSS = "minimal_across_groups"
NON_MINIMAL = "non_minimal"

# admissible (local, global) hop patterns for dragonfly paths
DF_PATTERNS = frozenset({(1, 0), (2, 0), (0, 1), (1, 1), (2, 1),
                         (0, 2), (1, 2), (2, 2), (3, 2)})
SF_MAX_HOPS = 4

DEFAULT_PACKET_BYTES = 64 + 4096
DEFAULT_LINK_RATE_BPS = 400_000_000_000


@dataclass(frozen=True)
class EVEntry:
    ev1: int  # index into the first switch's ECMP table (8 bits)
    ev2: int  # index into the second switch's ECMP table (8 bits)
    meta: int = 0

    @property
    def ev16(self) -> int:
        return (self.ev1 << 8) | self.ev2


@dataclass(frozen=True)
class PathType:
    local_hops: int
    global_hops: int
    category: str

    @property
    def pattern(self) -> tuple[int, int]:
        return (self.local_hops, self.global_hops)


def admissible_pattern(kind: str, local: int, global_: int) -> bool:
    if kind == "dragonfly":
        return (local, global_) in DF_PATTERNS
    return 1 <= local + global_ <= SF_MAX_HOPS


def serialization_ns(packet_bytes: int, link_rate_bps: float) -> float:
    return packet_bytes * 8 / link_rate_bps * 1e9


def path_latency(topo: Topology, src_switch: int, hops: tuple[int, ...],
                 packet_bytes: int = DEFAULT_PACKET_BYTES,
                 link_rate_bps: float = DEFAULT_LINK_RATE_BPS) -> float:
    """Propagation + serialization over the switch hops, in ns.

    Matches the per-path-type accounting: switch traversal latency and
    queueing are excluded, as are the endpoint legs.
    """
    if packet_bytes <= 0:
        raise InvalidParameter("packet_bytes must be positive")
    ser = serialization_ns(packet_bytes, link_rate_bps)
    total = 0.0
    prev = src_switch
    for hop in hops:
        total += topo.link_between(prev, hop).propagation_ns + ser
        prev = hop
    return total


def pattern_latency(topo: Topology, local: int, global_: int,
                    packet_bytes: int = DEFAULT_PACKET_BYTES,
                    link_rate_bps: float = DEFAULT_LINK_RATE_BPS) -> float:
    ser = serialization_ns(packet_bytes, link_rate_bps)
    return local * (topo.local_ns + ser) + global_ * (topo.global_ns + ser)


def classify(topo: Topology, src_switch: int, hops: tuple[int, ...]) -> PathType:
    local = global_ = 0
    prev = src_switch
    for hop in hops:
        if topo.link_class(prev, hop) == LOCAL:
            local += 1
        else:
            global_ += 1
        prev = hop
    dst = hops[-1]
    if len(hops) == len(topo.shortest_path(src_switch, dst, up_only=False)):
        same = topo.group_of[src_switch] == topo.group_of[dst]
        cat = MIN_WITHIN if same else MIN_ACROSS
    else:
        cat = NON_MINIMAL
    return PathType(local, global_, cat)


def enumerate_bounded_paths(topo: Topology, src_switch: int, dst_switch: int
                            ) -> list[tuple[tuple[int, ...], PathType]]:
    """All admissible simple paths of the form hop1 + hop2 + minimal remainder.

    Paths are hop tuples (switches after the source). Duplicate realized hop
    sequences are collapsed keeping the first (lexicographically smallest EV)
    occurrence. Dragonfly same-group pairs keep the first hop inside the group
    and skip the second controlled hop.
    """
    if src_switch == dst_switch:
        return []
    minimal = lambda a: topo.shortest_path(a, dst_switch, up_only=False)
    out: list[tuple[tuple[int, ...], PathType]] = []
    seen: set[tuple[int, ...]] = set()
    kind = topo.kind
    min_len = len(minimal(src_switch))
    same = topo.group_of[src_switch] == topo.group_of[dst_switch]
    min_cat = MIN_WITHIN if same else MIN_ACROSS
    gn = topo.global_neighbors

    def consider(hops: tuple[int, ...]) -> None:
        if hops in seen:
            return
        nodes = (src_switch,) + hops
        if len(set(nodes)) != len(nodes):
            return
        local = global_ = 0
        prev = src_switch
        for hop in hops:
            if hop in gn[prev]:
                global_ += 1
            else:
                local += 1
            prev = hop
        if not admissible_pattern(kind, local, global_):
            return
        seen.add(hops)
        cat = min_cat if len(hops) == min_len else NON_MINIMAL
        out.append((hops, PathType(local, global_, cat)))

    same_group = (kind == "dragonfly"
                  and topo.group_of[src_switch] == topo.group_of[dst_switch])
    if same_group:
        for n1 in intra_group_neighbors(topo, src_switch):
            consider((n1,) if n1 == dst_switch else (n1,) + minimal(n1))
        return out
    for n1 in topo.neighbor_ids[src_switch]:
        if n1 == dst_switch:
            consider((n1,))
            continue
        for n2 in topo.neighbor_ids[n1]:
            if n2 == src_switch:
                continue
            consider((n1, n2) if n2 == dst_switch else (n1, n2) + minimal(n2))
    if not out:
        raise Unreachable(f"no admissible path {src_switch} -> {dst_switch}")
    return out


def ev_assignment(topo: Topology, src_switch: int, hops: tuple[int, ...]
                  ) -> tuple[int, int]:
    """(ev1, ev2) indices that reproduce the path's first two hops.

    ev1 indexes the source switch's canonical neighbor table (the intra-group
    table for Dragonfly same-group traffic); ev2 indexes the second switch's
    full table. Paths shorter than two controlled hops use ev2 = 0.
    """
    dst = hops[-1]
    same_group = (topo.kind == "dragonfly"
                  and topo.group_of[src_switch] == topo.group_of[dst])
    table1 = (intra_group_neighbors(topo, src_switch) if same_group
              else topo.neighbor_ids[src_switch])
    ev1 = table1.index(hops[0])
    if ev1 > 255:
        raise InvalidParameter("first-hop table exceeds 8-bit EV range")
    if same_group or len(hops) < 2 or hops[0] == dst:
        return ev1, 0
    ev2 = topo.neighbor_ids[hops[0]].index(hops[1])
    if ev2 > 255:
        raise InvalidParameter("second-hop table exceeds 8-bit EV range")
    return ev1, ev2


def init_weights(latencies: list[float], w_scale: float = 1.0) -> list[float]:
    """Latency-proportional weights: w_i = lat_longest / lat_i, with every
    strictly-shorter path further boosted by w_scale; longest paths keep 1.0."""
    if not latencies:
        raise InvalidParameter("latencies must be non-empty")
    if any(l <= 0 for l in latencies):
        raise InvalidParameter("latencies must be positive")
    longest = max(latencies)
    return [(longest / l) * (w_scale if l < longest else 1.0) for l in latencies]


@dataclass
class PathInfo:
    entry: EVEntry
    hops: tuple[int, ...]
    ptype: PathType
    latency_ns: float


class EndpointTable:
    """Per-source lookup: destination switch -> latency-sorted EV entry list.

    All endpoints behind one switch share the table (static compression), so
    it is keyed and built per source switch.
    """

    def __init__(self, topo: Topology, src_switch: int, lazy: bool = True):
        self.topo = topo
        self.src_switch = src_switch
        self._lists: dict[int, list[PathInfo]] = {}
        if not lazy:
            for dst in range(topo.num_switches):
                self.entries(dst)

    def entries(self, dst_switch: int) -> list[PathInfo]:
        got = self._lists.get(dst_switch)
        if got is None:
            got = self._build(dst_switch)
            self._lists[dst_switch] = got
        return got

    def _build(self, dst_switch: int) -> list[PathInfo]:
        if dst_switch == self.src_switch:
            return []  # endpoint-local delivery, no network path
        infos = []
        for hops, ptype in enumerate_bounded_paths(self.topo, self.src_switch, dst_switch):
            ev1, ev2 = ev_assignment(self.topo, self.src_switch, hops)
            lat = pattern_latency(self.topo, ptype.local_hops, ptype.global_hops)
            infos.append(PathInfo(EVEntry(ev1, ev2), hops, ptype, lat))
        infos.sort(key=lambda pi: (pi.latency_ns, pi.entry.ev1, pi.entry.ev2))
        return infos

    def latencies(self, dst_switch: int) -> list[float]:
        return [pi.latency_ns for pi in self.entries(dst_switch)]

    def destinations(self) -> list[int]:
        return sorted(self._lists.keys())


def build_endpoint_table(topo: Topology, src_endpoint: int, lazy: bool = True
                         ) -> EndpointTable:
    return EndpointTable(topo, topo.switch_of_endpoint(src_endpoint), lazy=lazy)


# -- memory model --------------------------------------------------------------

ENTRY_BYTES = 3  # 16-bit EV + 8-bit metadata


def _dragonfly_scaled(endpoints: int) -> tuple[int, int]:
    """Balanced dragonfly (h = p, a = 2p) nearest to an endpoint budget.

    Returns (switches, endpoints) for the p minimizing |endpoints - target|.
    """
    best = None
    for p in range(1, 64):
        sw = 2 * p * (2 * p * p + 1)
        ep = p * sw
        gap = abs(ep - endpoints)
        if best is None or gap < best[0]:
            best = (gap, sw, ep)
    return best[1], best[2]


def _slimfly_scaled(endpoints: int) -> tuple[int, int]:
    """Slim Fly with p = ceil(k'/2) nearest to an endpoint budget."""
    best = None
    for q in range(3, 128):
        try:
            from .gf import factor_prime_power
            factor_prime_power(q)
        except InvalidParameter:
            continue
        if q % 4 == 2:
            continue
        delta = {0: 0, 1: 1, 3: -1}[q % 4]
        kprime = (3 * q - delta) // 2
        sw = 2 * q * q
        ep = sw * ((kprime + 1) // 2)
        gap = abs(ep - endpoints)
        if best is None or gap < best[0]:
            best = (gap, sw, ep)
    return best[1], best[2]


def max_paths_per_destination(topo: Topology,
                              sources: "list[int] | None" = None) -> int:
    """Maximum EV entry list length over (source, destination) switch pairs.

    Scans every source by default: the graphs are vertex-transitive but the
    lowest-id minimal-route tie-break is not, so per-source counts differ and
    sampling would under-report. Pass `sources` to restrict the scan.
    """
    scan = range(topo.num_switches) if sources is None else sources
    best = 0
    for s in scan:
        tbl = EndpointTable(topo, s)
        for dst in range(topo.num_switches):
            if dst != s:
                best = max(best, len(tbl.entries(dst)))
    return best


def memory_footprint(topology_family: str, endpoints: int,
                     paths_per_dest: int | None = None,
                     topo: Topology | None = None) -> int:
    """Upper-bound endpoint table size in bytes: 3 B per entry, one entry list
    per destination switch.

    With `topo` given, switch count and (when paths_per_dest is None) the
    enumerated per-destination maximum come from that topology; otherwise the
    scaled construction closest to `endpoints` supplies the switch count and
    paths_per_dest is required.
    """
    if topo is not None:
        switches = topo.num_switches
        if paths_per_dest is None:
            paths_per_dest = max_paths_per_destination(topo)
    else:
        if topology_family == "dragonfly":
            switches, _ = _dragonfly_scaled(endpoints)
        elif topology_family == "slimfly":
            switches, _ = _slimfly_scaled(endpoints)
        else:
            raise InvalidParameter(f"unknown family {topology_family!r}")
        if paths_per_dest is None:
            raise InvalidParameter("paths_per_dest required for analytic scaling")
    return ENTRY_BYTES * paths_per_dest * (switches - 1)
