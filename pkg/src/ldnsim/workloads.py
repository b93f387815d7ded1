"""Traffic generators for every evaluation scenario.

All generators are pure functions of (topology, parameters, seed) and return
FlowSpec lists; schedules with dependencies (collectives) reference earlier
flows by index and start only once those complete.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from random import Random

from .errors import InfeasibleMatching, InvalidParameter, InvalidParticipants
from .topology import Topology

MIB = 1 << 20
DEFAULT_FLOW_BYTES = 4 * MIB


@dataclass
class FlowSpec:
    src: int
    dst: int
    size: int
    start_ns: float = 0.0
    scheme: str | None = None  # overrides the run scheme (background jobs)
    tag: str = "foreground"
    deps: tuple[int, ...] = ()

    def __post_init__(self):
        if self.src == self.dst:
            raise InvalidParameter("flow src == dst")
        if self.size <= 0:
            raise InvalidParameter("flow size must be positive")


@dataclass
class CollectiveSpec:
    algorithm: str  # allreduce_ring | allreduce_butterfly | alltoall
    participants: list[int]
    message_bytes: int = DEFAULT_FLOW_BYTES
    parallel_connections: int = 8  # alltoall in-flight destination cap

    def __post_init__(self):
        if len(set(self.participants)) != len(self.participants):
            raise InvalidParticipants("participants must be distinct")


def _group_of_endpoint(topo: Topology, e: int) -> int:
    return topo.group_of[topo.switch_of_endpoint(e)]


def gen_permutation(topo: Topology, cross_group: bool = True,
                    flow_bytes: int = DEFAULT_FLOW_BYTES, seed: int = 1,
                    endpoints: list[int] | None = None, tag: str = "foreground",
                    scheme: str | None = None, start_ns: float = 0.0) -> list[FlowSpec]:
    """Random perfect matching: every endpoint sends to and receives from one."""
    eps = list(endpoints) if endpoints is not None else list(range(topo.num_endpoints))
    if len(eps) < 2:
        raise InvalidParameter("permutation needs at least 2 endpoints")
    rng = Random(f"perm:{seed}")

    def ok(s, d):
        if s == d:
            return False
        return not cross_group or _group_of_endpoint(topo, s) != _group_of_endpoint(topo, d)

    for _ in range(200):
        dsts = eps[:]
        rng.shuffle(dsts)
        # repair pass: swap out violating positions
        for i in range(len(eps)):
            if ok(eps[i], dsts[i]):
                continue
            fixed = False
            for j in range(len(eps)):
                if i == j:
                    continue
                if ok(eps[i], dsts[j]) and ok(eps[j], dsts[i]):
                    dsts[i], dsts[j] = dsts[j], dsts[i]
                    fixed = True
                    break
            if not fixed:
                break
        else:
            if all(ok(s, d) for s, d in zip(eps, dsts)):
                return [FlowSpec(s, d, flow_bytes, start_ns, scheme, tag)
                        for s, d in zip(eps, dsts)]
    raise InfeasibleMatching("could not build a valid permutation")


def gen_adversarial(topo: Topology, flow_bytes: int = DEFAULT_FLOW_BYTES,
                    seed: int = 1) -> list[FlowSpec]:
    """Pattern that concentrates minimal routes onto few links.

    Dragonfly: group g targets group g+1, saturating the single inter-group
    global link under minimal routing. Slim Fly: each switch targets the
    distance-2 switch sharing the fewest common neighbors.
    """
    rng = Random(f"adv:{seed}")
    flows = []
    p = topo.endpoints_per_switch
    if topo.kind == "dragonfly":
        groups: list[list[int]] = [[] for _ in range(topo.num_groups)]
        for e in range(topo.num_endpoints):
            groups[_group_of_endpoint(topo, e)].append(e)
        for g, members in enumerate(groups):
            targets = groups[(g + 1) % topo.num_groups]
            for e in members:
                flows.append(FlowSpec(e, rng.choice(targets), flow_bytes, 0.0,
                                      None, "foreground"))
        return flows
    nbr_sets = [set(topo.neighbor_ids[s]) for s in range(topo.num_switches)]
    for s in range(topo.num_switches):
        dist = topo.dist_from(s, up_only=False)
        best = None
        for d in range(topo.num_switches):
            if dist[d] != 2:
                continue
            common = len(nbr_sets[s] & nbr_sets[d])
            if best is None or (common, d) < best:
                best = (common, d)
        d = best[1]
        for i in range(p):
            flows.append(FlowSpec(s * p + i, d * p + i, flow_bytes, 0.0,
                                  None, "foreground"))
    return flows


def gen_motivational(topo: Topology, monitored_bytes: int = DEFAULT_FLOW_BYTES,
                     background_bytes: int = DEFAULT_FLOW_BYTES,
                     background: bool = True, free_groups: int = 2,
                     monitored_start_ns: float = 10_000.0) -> list[FlowSpec]:
    """Hotspot scenario: one monitored flow while most groups are congested.

    Every congested group floods the switch owning its global link toward the
    destination group, so any route through those groups queues behind the
    hotspot; the destination group plus `free_groups` others stay idle. The
    monitored source group is congested too.
    """
    if topo.kind != "dragonfly":
        raise InvalidParameter("motivational scenario is defined on dragonfly")
    a = topo.params.a
    p = topo.endpoints_per_switch
    groups = topo.num_groups
    if groups < free_groups + 3:
        raise InvalidParameter("not enough groups for the motivational layout")
    src_group, dst_group = 0, groups // 2
    free = {dst_group}
    g = dst_group
    while len(free) < free_groups + 1:
        g = (g + 1) % groups
        if g != src_group:
            free.add(g)
    # monitored pair: non-gateway switch in the source group -> destination group
    gateway = {}
    for g in range(groups):
        if g == dst_group:
            continue
        path_owner = None
        for s in range(g * a, (g + 1) * a):
            for n in topo.neighbor_ids[s]:
                if topo.group_of[n] == dst_group:
                    path_owner = s
                    break
            if path_owner is not None:
                break
        gateway[g] = path_owner
    mon_src_sw = next(s for s in range(src_group * a, (src_group + 1) * a)
                      if s != gateway[src_group])
    mon_src = mon_src_sw * p
    mon_dst = (dst_group * a) * p
    flows = [FlowSpec(mon_src, mon_dst, monitored_bytes,
                      monitored_start_ns if background else 0.0,
                      None, "monitored")]
    if not background:
        return flows
    for g in range(groups):
        if g in free or g == dst_group:
            continue
        tgt_sw = gateway[g]
        tgt_eps = list(topo.endpoints_of_switch(tgt_sw))
        i = 0
        for s in range(g * a, (g + 1) * a):
            if s == tgt_sw:
                continue
            for e in topo.endpoints_of_switch(s):
                if e == mon_src or e == mon_dst:
                    continue
                flows.append(FlowSpec(e, tgt_eps[i % len(tgt_eps)], background_bytes,
                                      0.0, None, "background"))
                i += 1
    return flows


def gen_incast_bystanders(topo: Topology, senders: int = 32, receiver: int = 160,
                          flow_bytes: int = DEFAULT_FLOW_BYTES,
                          seed: int = 1) -> list[FlowSpec]:
    """Synchronized incast hotspot plus a disjoint bystander permutation."""
    n = topo.num_endpoints
    if receiver < senders:
        raise InvalidParameter("receiver endpoint must lie outside the sender range")
    if n <= senders + 1:
        raise InvalidParameter("topology too small for incast + bystanders")
    flows = [FlowSpec(s, receiver, flow_bytes, 0.0, None, "incast")
             for s in range(senders)]
    rest = [e for e in range(n) if e >= senders and e != receiver]
    flows.extend(gen_permutation(topo, cross_group=False, flow_bytes=flow_bytes,
                                 seed=seed, endpoints=rest, tag="bystander"))
    return flows


def gen_collective(spec: CollectiveSpec, start_ns: float = 0.0) -> list[FlowSpec]:
    """Dependency-ordered flow schedule for one collective."""
    parts = spec.participants
    n = len(parts)
    size = spec.message_bytes
    flows: list[FlowSpec] = []
    index: dict[tuple[int, int], int] = {}  # (rank, step) -> flow index

    def add(rank, step, dst_rank, nbytes, deps):
        index[(rank, step)] = len(flows)
        flows.append(FlowSpec(parts[rank], parts[dst_rank], max(1, nbytes),
                              start_ns, None, "foreground", tuple(deps)))

    if spec.algorithm == "allreduce_ring":
        chunk = size // n
        steps = 2 * (n - 1)
        for step in range(steps):
            for r in range(n):
                deps = []
                if step > 0:
                    deps = [index[(r, step - 1)], index[((r - 1) % n, step - 1)]]
                add(r, step, (r + 1) % n, chunk, deps)
    elif spec.algorithm == "allreduce_butterfly":
        if n < 2 or n & (n - 1):
            raise InvalidParticipants("butterfly requires a power-of-two participant count")
        rounds = n.bit_length() - 1
        for step in range(rounds):
            for r in range(n):
                partner = r ^ (1 << step)
                deps = []
                if step > 0:
                    deps = [index[(r, step - 1)], index[(r ^ (1 << (step - 1)), step - 1)]]
                add(r, step, partner, size, deps)
    elif spec.algorithm == "alltoall":
        chunk = size // n
        window = max(1, spec.parallel_connections)
        for r in range(n):
            for k in range(n - 1):
                deps = [index[(r, k - window)]] if k >= window else []
                add(r, k, (r + 1 + k) % n, chunk, deps)
    else:
        raise InvalidParameter(f"unknown collective {spec.algorithm!r}")
    return flows


def gen_collective_with_background(topo: Topology, algorithm: str,
                                   participants: int = 128,
                                   message_bytes: int = DEFAULT_FLOW_BYTES,
                                   parallel_connections: int = 8,
                                   background: bool = True,
                                   background_bytes: int = DEFAULT_FLOW_BYTES,
                                   seed: int = 1) -> list[FlowSpec]:
    """Collective on a random endpoint subset; the rest run an ECMP permutation."""
    rng = Random(f"coll:{seed}")
    eps = list(range(topo.num_endpoints))
    if participants > len(eps):
        raise InvalidParameter("participants exceed endpoint count")
    chosen = sorted(rng.sample(eps, participants))
    flows = gen_collective(CollectiveSpec(algorithm, chosen, message_bytes,
                                          parallel_connections))
    if background:
        others = [e for e in eps if e not in set(chosen)]
        if len(others) >= 2:
            flows.extend(gen_permutation(topo, cross_group=False,
                                         flow_bytes=background_bytes, seed=seed,
                                         endpoints=others, tag="background",
                                         scheme="ecmp"))
    return flows


# -- trace-driven load -------------------------------------------------------------


class FlowSizeCDF:
    """Piecewise-linear CDF over flow sizes loaded from a two-column table."""

    def __init__(self, points: list[tuple[float, float]]):
        if not points or points[-1][1] < 1.0:
            raise InvalidParameter("CDF must end at cumulative probability 1.0")
        last_p = -1.0
        for _, pr in points:
            if pr < last_p:
                raise InvalidParameter("CDF must be monotone")
            last_p = pr
        self.points = points

    @classmethod
    def load(cls, path: str | None = None) -> "FlowSizeCDF":
        if path is None:
            text = resources.files("ldnsim.data").joinpath("websearch_cdf.txt").read_text()
        else:
            with open(path) as f:
                text = f.read()
        pts = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            size, prob = line.split()
            pts.append((float(size), float(prob)))
        return cls(pts)

    def sample(self, u: float) -> int:
        pts = self.points
        prev_s, prev_p = pts[0]
        if u <= prev_p:
            return max(1, int(prev_s))
        for s, pr in pts[1:]:
            if u <= pr:
                frac = (u - prev_p) / (pr - prev_p) if pr > prev_p else 1.0
                return max(1, int(prev_s + frac * (s - prev_s)))
            prev_s, prev_p = s, pr
        return max(1, int(pts[-1][0]))

    def mean(self) -> float:
        total = 0.0
        prev_s, prev_p = self.points[0]
        total += prev_s * prev_p
        for s, pr in self.points[1:]:
            total += (pr - prev_p) * (prev_s + s) / 2.0
            prev_s, prev_p = s, pr
        return total


def gen_trace(topo: Topology, load: float, duration_ns: float,
              max_senders_per_receiver: int = 4, seed: int = 1,
              cdf: FlowSizeCDF | None = None,
              link_rate_bps: float = 400e9) -> list[FlowSpec]:
    """Poisson arrivals at an offered load fraction of aggregate edge bandwidth.

    Receivers are drawn uniformly subject to a cap on concurrent senders per
    receiver, estimated with line-rate flow durations.
    """
    if not 0 < load <= 1:
        raise InvalidParameter("load must be in (0, 1]")
    cdf = cdf or FlowSizeCDF.load()
    rng = Random(f"trace:{seed}")
    n = topo.num_endpoints
    mean_size = cdf.mean()
    rate_bytes = link_rate_bps / 8.0
    lam = load * n * rate_bytes / mean_size  # flows per second
    gap_ns = 1e9 / lam
    flows = []
    busy_until: dict[int, list[float]] = {}
    t = 0.0
    while True:
        t += rng.expovariate(1.0) * gap_ns
        if t >= duration_ns:
            break
        size = cdf.sample(rng.random())
        src = rng.randrange(n)
        est_end = t + size * 8 / link_rate_bps * 1e9
        dst = None
        for _ in range(200):
            cand = rng.randrange(n)
            if cand == src:
                continue
            active = [e for e in busy_until.get(cand, ()) if e > t]
            if len(active) < max_senders_per_receiver:
                busy_until[cand] = active + [est_end]
                dst = cand
                break
        if dst is None:
            continue  # receiver cap saturated everywhere sampled; skip arrival
        flows.append(FlowSpec(src, dst, size, t, None, "foreground"))
    return flows


# -- JSON round trip ---------------------------------------------------------------


def flows_to_json(flows: list[FlowSpec]) -> list[dict]:
    return [{"src": f.src, "dst": f.dst, "size": f.size, "start_ns": f.start_ns,
             "scheme": f.scheme, "tag": f.tag, "deps": list(f.deps)} for f in flows]


def flows_from_json(doc: list[dict]) -> list[FlowSpec]:
    return [FlowSpec(d["src"], d["dst"], d["size"], d.get("start_ns", 0.0),
                     d.get("scheme"), d.get("tag", "foreground"),
                     tuple(d.get("deps", ()))) for d in doc]
