"""Deterministic discrete-event core: links, output-queued switches, roles.

Time is integer picoseconds. Every event is (time, sequence, code, args); the
sequence number breaks ties, so a given (config, seed) replays to the exact
same trace. Switches are output-queued with a per-port data FIFO plus a
strict-priority queue of the same capacity for trimmed and control packets.
A fixed traversal latency is charged once per switch between arrival and
enqueue; ECN marking uses the instantaneous data-queue occupancy at enqueue.

Default forwarding tables are static minimal routes computed on the pristine
graph: packets steered onto a failed link are dropped at the switch (the
black hole that sender timeouts catch); switches never reroute.
"""

from __future__ import annotations

import heapq
from collections import deque
from fractions import Fraction
from random import Random

from . import loadbalancers as lb
from . import transport
from .loadbalancers import PathSet, make_load_balancer
from .paths import EndpointTable, admissible_pattern
from .topology import LOCAL, Topology, intra_group_neighbors
from .transport import HEADER_BYTES, Receiver, Sender

PS_PER_NS = 1000

# packet kinds
DATA, TRIMMED, ACK, NACK = 0, 1, 2, 3
# routing modes
MODE_EV, MODE_MINIMAL, MODE_VALIANT, MODE_UGAL = 0, 1, 2, 3
# event codes
E_ARR_SW, E_ENQ, E_TXEND, E_ARR_EP, E_FLOW_START, E_TIMEOUT = range(6)

MODE_OF_SCHEME = {"minimal": MODE_MINIMAL, "valiant": MODE_VALIANT, "ugal_l": MODE_UGAL}

DROP_QUEUE = "queue_drop"
DROP_TRIM = "trim"
DROP_LINK = "failed_link"


def ecn_mark_probability(occupancy: float, capacity: float,
                         kmin: float, kmax: float) -> float:
    """0 below kmin*capacity, 1 above kmax*capacity, linear ramp between.

    Evaluated in decimal-exact rationals so threshold and midpoint values come
    out exact (e.g. 0.5 at the midpoint of the 0.2/0.8 ramp).
    """
    occ = Fraction(str(occupancy))
    cap = Fraction(str(capacity))
    lo = Fraction(str(kmin)) * cap
    hi = Fraction(str(kmax)) * cap
    if occ <= lo:
        return 0.0
    if occ >= hi:
        return 1.0
    return float((occ - lo) / (hi - lo))


class Packet:
    __slots__ = ("kind", "src", "dst", "flow_id", "psn", "gen", "ev1", "ev2",
                 "stage", "ecn", "payload", "birth", "path", "rroute", "ridx",
                 "mode", "lcnt", "gcnt", "visited", "marked_echo")

    def __init__(self, kind, src, dst, flow_id, psn, gen, ev1, ev2, mode, birth):
        self.kind = kind
        self.src = src
        self.dst = dst
        self.flow_id = flow_id
        self.psn = psn
        self.gen = gen
        self.ev1 = ev1
        self.ev2 = ev2
        self.stage = 0
        self.ecn = False
        self.payload = 0
        self.birth = birth
        self.path = []
        self.rroute = None
        self.ridx = 0
        self.mode = mode
        self.lcnt = 0
        self.gcnt = 0
        self.visited = None
        self.marked_echo = False

    @property
    def size(self) -> int:
        return HEADER_BYTES + self.payload


class Port:
    """Output port: data FIFO + strict-priority control queue."""

    __slots__ = ("peer_is_switch", "peer", "link", "prop_ps", "cap", "data",
                 "ctrl", "free_at", "wake", "mark_rng", "node_switch")

    def __init__(self, peer_is_switch, peer, link, prop_ps, cap, mark_rng, node_switch):
        self.peer_is_switch = peer_is_switch
        self.peer = peer
        self.link = link  # None for endpoint links (never fail)
        self.prop_ps = prop_ps
        self.cap = cap  # None: unbounded (endpoint NIC)
        self.data = deque()
        self.ctrl = deque()
        self.free_at = 0  # line busy until this time
        self.wake = False  # dequeue event pending
        self.mark_rng = mark_rng  # None: no ECN marking (NICs)
        self.node_switch = node_switch  # owning switch id, -1 for NICs


class Flow:
    """Runtime state of one FlowSpec inside the simulator."""

    __slots__ = ("id", "spec", "scheme", "mode", "src_sw", "dst_sw", "same_group",
                 "sender", "receiver", "lb", "pathset", "pending_deps", "dependents",
                 "started", "start_actual", "drops", "arrivals_full", "arrivals_trimmed")

    def __init__(self, fid, spec):
        self.id = fid
        self.spec = spec
        self.pending_deps = 0
        self.dependents = []
        self.started = False
        self.start_actual = None
        self.drops = {DROP_QUEUE: 0, DROP_TRIM: 0, DROP_LINK: 0}
        self.arrivals_full = 0
        self.arrivals_trimmed = 0


class Fabric:
    """Static routing state shared by every flow of one simulation."""

    def __init__(self, topo: Topology, w_scale: float):
        self.topo = topo
        self.w_scale = w_scale
        self.full_tbl = topo.neighbor_ids
        if topo.kind == "dragonfly":
            self.intra_tbl = [intra_group_neighbors(topo, s)
                              for s in range(topo.num_switches)]
        else:
            self.intra_tbl = self.full_tbl
        self.is_global = [set(n for n in topo.neighbor_ids[s]
                              if topo.link_class(s, n) != LOCAL)
                          for s in range(topo.num_switches)]
        self._next_tbl: dict[int, list[int]] = {}
        self._pattern_tbl: dict[int, list[tuple[int, int]]] = {}
        self._tables: dict[int, EndpointTable] = {}
        self._pathsets: dict[tuple[int, int], PathSet] = {}

    def next_hop_tbl(self, dst: int) -> list[int]:
        """Static minimal next hops toward dst, pristine graph, lowest-id tie-break."""
        got = self._next_tbl.get(dst)
        if got is not None:
            return got
        topo = self.topo
        dist = topo.dist_from(dst, up_only=False)
        nxt = [-1] * topo.num_switches
        for s in range(topo.num_switches):
            if s == dst:
                continue
            d = dist[s]
            for n in topo.neighbor_ids[s]:
                if dist[n] == d - 1:
                    nxt[s] = n
                    break
        self._next_tbl[dst] = nxt
        return nxt

    def pattern_tbl(self, dst: int) -> list[tuple[int, int]]:
        """(local, global) hop counts of the canonical minimal route to dst."""
        got = self._pattern_tbl.get(dst)
        if got is not None:
            return got
        topo = self.topo
        dist = topo.dist_from(dst, up_only=False)
        nxt = self.next_hop_tbl(dst)
        pat: list[tuple[int, int] | None] = [None] * topo.num_switches
        pat[dst] = (0, 0)
        order = sorted(range(topo.num_switches), key=lambda s: dist[s])
        for s in order:
            if s == dst:
                continue
            n = nxt[s]
            pl, pg = pat[n]
            if n in self.is_global[s]:
                pat[s] = (pl, pg + 1)
            else:
                pat[s] = (pl + 1, pg)
        self._pattern_tbl[dst] = pat
        return pat

    def endpoint_table(self, src_sw: int) -> EndpointTable:
        got = self._tables.get(src_sw)
        if got is None:
            got = EndpointTable(self.topo, src_sw)
            self._tables[src_sw] = got
        return got

    def pathset(self, src_sw: int, dst_sw: int) -> PathSet:
        key = (src_sw, dst_sw)
        got = self._pathsets.get(key)
        if got is None:
            got = PathSet(self.endpoint_table(src_sw).entries(dst_sw), self.w_scale)
            self._pathsets[key] = got
        return got

    def ev_next(self, sw: int, dst_sw: int, stage: int, ev1: int, ev2: int,
                same_group: bool) -> tuple[int, int]:
        """(next switch, new stage) for EV-guided forwarding (roles of Fig.-2 kind)."""
        if stage == 0:
            tbl = self.intra_tbl[sw] if same_group else self.full_tbl[sw]
            return tbl[ev1 % len(tbl)], 1
        if stage == 1 and not same_group:
            tbl = self.full_tbl[sw]
            return tbl[ev2 % len(tbl)], 2
        return self.next_hop_tbl(dst_sw)[sw], 2

    def role_of(self, sw: int, stage: int, same_group: bool) -> str:
        if stage == 0:
            return "ecmp1"
        if stage == 1 and not same_group:
            return "ecmp2"
        return "default"

    def trace_ev_path(self, src_sw: int, dst_sw: int, ev1: int, ev2: int,
                      same_group: bool | None = None) -> list[int]:
        """Switch sequence EV-guided forwarding realizes, queues aside."""
        if same_group is None:
            same_group = (self.topo.kind == "dragonfly"
                          and self.topo.group_of[src_sw] == self.topo.group_of[dst_sw])
        sw, stage = src_sw, 0
        seq = [sw]
        while sw != dst_sw:
            sw, stage = self.ev_next(sw, dst_sw, stage, ev1, ev2, same_group)
            seq.append(sw)
            if len(seq) > 16:
                raise RuntimeError("EV forwarding did not converge")
        return seq


class Simulator:
    def __init__(self, topo: Topology, cfg, flow_specs, fabric: Fabric | None = None):
        self.topo = topo
        self.cfg = cfg
        self.fabric = fabric or Fabric(topo, cfg.spritz.w_scale)
        self.now = 0
        self._heap: list = []
        self._seq = 0
        self.ps_per_byte = 8_000_000_000_000 // cfg.link_rate_bps
        self.switch_latency_ps = int(cfg.switch_latency_ns * PS_PER_NS)
        self.kmin = cfg.ecn_kmin
        self.kmax = cfg.ecn_kmax
        self.trimming = cfg.trimming
        self.queue_cap = cfg.queue_packets
        self._mark_prob = [ecn_mark_probability(occ, self.queue_cap, self.kmin, self.kmax)
                           for occ in range(self.queue_cap + 1)]
        seed = cfg.seed
        topo_ = topo
        p = topo_.endpoints_per_switch
        self._p = p
        # ports
        self._sw_ecn_rng = [Random(f"{seed}:ecn:{s}") for s in range(topo_.num_switches)]
        self.sw_port: list[dict[int, Port]] = []
        for s in range(topo_.num_switches):
            d = {}
            for n in topo_.neighbor_ids[s]:
                link = topo_.link_between(s, n)
                d[n] = Port(True, n, link, int(link.propagation_ns * PS_PER_NS),
                            self.queue_cap, self._sw_ecn_rng[s], s)
            self.sw_port.append(d)
        ep_prop = int(topo_.local_ns * PS_PER_NS)
        self.ep_out = [Port(False, e, None, ep_prop, self.queue_cap,
                            self._sw_ecn_rng[e // p], e // p)
                       for e in range(topo_.num_endpoints)]
        self.nic = [Port(True, e // p, None, ep_prop, None, None, -1)
                    for e in range(topo_.num_endpoints)]
        self.route_rng = [Random(f"{seed}:route:{s}") for s in range(topo_.num_switches)]
        # global counters
        self.drops = {DROP_QUEUE: 0, DROP_TRIM: 0, DROP_LINK: 0}
        self.control_drops = 0
        self.data_bytes_sent = 0
        self.control_bytes_sent = 0
        self.events_processed = 0
        self.stopped_at_limit = False
        # flows
        self.flows: list[Flow] = []
        self._build_flows(flow_specs)

    # -- setup -----------------------------------------------------------------

    def _base_latency_ps(self) -> tuple[int, int]:
        """(one-way worst latency, base rtt) from the longest admissible pattern."""
        topo = self.topo
        ser = transport.PACKET_BYTES * self.ps_per_byte
        if topo.kind == "dragonfly":
            patterns = [(3, 2)]
        else:
            patterns = [(0, 4)]
        l, g = patterns[0]
        hops = l + g
        path = (l * (int(topo.local_ns * PS_PER_NS) + ser)
                + g * (int(topo.global_ns * PS_PER_NS) + ser))
        ep_leg = int(topo.local_ns * PS_PER_NS) + ser
        one_way = path + 2 * ep_leg + (hops + 1) * self.switch_latency_ps
        return one_way, 2 * one_way

    def _build_flows(self, flow_specs) -> None:
        cfg = self.cfg
        topo = self.topo
        one_way, base_rtt = self._base_latency_ps()
        rto_base = int(cfg.transport.rto_multiplier * base_rtt)
        rto_cap = int(cfg.transport.rto_cap_ms * 1e9)
        bdp = self.queue_cap * transport.PACKET_BYTES
        cwnd = int(cfg.transport.cwnd_cap_bdp * bdp)
        self.rto_base_default = rto_base
        self.rto_cap = rto_cap
        if cfg.spritz.flicr_gap_ps is None:
            cfg.spritz.flicr_gap_ps = base_rtt
        p = topo.endpoints_per_switch
        for fid, spec in enumerate(flow_specs):
            fl = Flow(fid, spec)
            fl.scheme = spec.scheme or cfg.scheme
            fl.mode = MODE_OF_SCHEME.get(fl.scheme, MODE_EV)
            fl.src_sw = spec.src // p
            fl.dst_sw = spec.dst // p
            fl.same_group = (topo.kind == "dragonfly"
                             and topo.group_of[fl.src_sw] == topo.group_of[fl.dst_sw])
            fl.sender = Sender(fid, spec.size, cwnd, cwnd, rto_base, rto_cap,
                               base_rtt, cfg.transport)
            fl.receiver = Receiver(fid, spec.size)
            if fl.mode == MODE_EV and fl.src_sw != fl.dst_sw:
                ps = self.fabric.pathset(fl.src_sw, fl.dst_sw)
                five = (spec.src, spec.dst, 1024 + (fid * 7919) % 50000, 4791, 17)
                fl.lb = make_load_balancer(fl.scheme, ps, Random(f"{cfg.seed}:lb:{fid}"),
                                           cfg.spritz, five)
                fl.pathset = ps
            else:
                fl.lb = make_load_balancer("minimal", None, None, cfg.spritz)
                fl.pathset = None
            fl.sender.send_cb = self._make_send_cb(fl)
            self.flows.append(fl)
        for fl in self.flows:
            for dep_idx in fl.spec.deps:
                dep = self.flows[dep_idx]
                dep.dependents.append(fl)
                fl.pending_deps += 1
        for fl in self.flows:
            if fl.pending_deps == 0:
                self._push(int(fl.spec.start_ns * PS_PER_NS), E_FLOW_START, fl.id, 0)

    def _make_send_cb(self, fl: Flow):
        def send(psn, payload, gen, rto_mult, is_retx):
            now = self.now
            if fl.pathset is not None and len(fl.pathset):
                idx = fl.lb.choose(now)
                ev1 = fl.pathset.ev1[idx]
                ev2 = fl.pathset.ev2[idx]
            else:
                idx, ev1, ev2 = -1, 0, 0
            pkt = Packet(DATA, fl.spec.src, fl.spec.dst, fl.id, psn, gen,
                         ev1, ev2, fl.mode, now)
            pkt.payload = payload
            if fl.mode in (MODE_VALIANT, MODE_UGAL):
                pkt.visited = set()
            self.data_bytes_sent += pkt.size
            self._enqueue(self.nic[fl.spec.src], pkt, ctrl=False)
            rto = min(self.rto_base_default * rto_mult, self.rto_cap)
            self._push(now + rto, E_TIMEOUT, fl.id, (psn, gen))
            return idx
        return send

    # -- event machinery ---------------------------------------------------------

    def _push(self, t: int, code: int, a, b) -> None:
        self._seq += 1
        heapq.heappush(self._heap, (t, self._seq, code, a, b))

    def run(self, time_limit_ps: int) -> None:
        heap = self._heap
        while heap:
            t, _, code, a, b = heapq.heappop(heap)
            if t > time_limit_ps:
                self.stopped_at_limit = True
                break
            self.now = t
            self.events_processed += 1
            if code == E_ARR_SW:
                self._arrive_switch(a, b)
            elif code == E_TXEND:
                self._tx_end(a)
            elif code == E_ARR_EP:
                self._arrive_endpoint(a, b)
            elif code == E_FLOW_START:
                fl = self.flows[a]
                fl.started = True
                fl.start_actual = t
                fl.sender.pump(t)
            elif code == E_TIMEOUT:
                self._handle_timeout(a, b)

    # -- queues and transmission ---------------------------------------------------

    def _enqueue(self, port: Port, pkt: Packet, ctrl: bool) -> None:
        if port.cap is None:  # endpoint NIC: paced by cwnd, never drops
            ctrl_queue = ctrl
        elif not ctrl:
            occ = len(port.data)
            if occ < port.cap:
                prob = self._mark_prob[occ]
                if prob > 0.0 and port.mark_rng.random() < prob:
                    pkt.ecn = True
                ctrl_queue = False
            elif self.trimming:
                pkt.kind = TRIMMED
                pkt.payload = 0
                self._count_drop(pkt, DROP_TRIM)
                if len(port.ctrl) < port.cap:
                    ctrl_queue = True
                else:
                    self._count_drop(pkt, DROP_QUEUE)
                    return
            else:
                self._count_drop(pkt, DROP_QUEUE)
                return
        else:
            if len(port.ctrl) < port.cap:
                ctrl_queue = True
            elif pkt.kind == TRIMMED:
                self._count_drop(pkt, DROP_QUEUE)
                return
            else:
                self.control_drops += 1
                return
        if self.now >= port.free_at and not port.ctrl and not port.data:
            self._transmit(port, pkt)
        else:
            (port.ctrl if ctrl_queue else port.data).append(pkt)
            if not port.wake:
                port.wake = True
                self._push(max(port.free_at, self.now), E_TXEND, port, 0)

    def _transmit(self, port: Port, pkt: Packet) -> None:
        port.free_at = self.now + (HEADER_BYTES + pkt.payload) * self.ps_per_byte
        if port.peer_is_switch:
            # the per-switch traversal latency is charged on the inbound leg
            self._push(port.free_at + port.prop_ps + self.switch_latency_ps,
                       E_ARR_SW, pkt, port.peer)
        else:
            self._push(port.free_at + port.prop_ps, E_ARR_EP, pkt, port.peer)

    def _tx_end(self, port: Port) -> None:
        port.wake = False
        pkt = port.ctrl.popleft() if port.ctrl else port.data.popleft()
        self._transmit(port, pkt)
        if port.ctrl or port.data:
            port.wake = True
            self._push(port.free_at, E_TXEND, port, 0)

    def _count_drop(self, pkt: Packet, cause: str) -> None:
        # DROP_TRIM marks the payload loss; queue/link drops are terminal
        self.drops[cause] += 1
        self.flows[pkt.flow_id].drops[cause] += 1

    # -- forwarding -------------------------------------------------------------

    def _arrive_switch(self, pkt: Packet, sw: int) -> None:
        pkt.path.append(sw)
        if pkt.kind >= ACK:
            rroute = pkt.rroute
            if pkt.ridx < len(rroute):
                nxt = rroute[pkt.ridx]
                pkt.ridx += 1
                port = self.sw_port[sw][nxt]
                if port.link is not None and not port.link.up:
                    self.control_drops += 1
                    return
            else:
                port = self.ep_out[pkt.dst]
        else:
            dst_sw = pkt.dst // self._p
            if sw == dst_sw:
                port = self.ep_out[pkt.dst]
            else:
                if pkt.mode in (MODE_VALIANT, MODE_UGAL):
                    pkt.visited.add(sw)
                nxt = self._route(pkt, sw, dst_sw)
                if nxt is None:
                    return  # dropped (failed link)
                port = self.sw_port[sw][nxt]
        self._enqueue(port, pkt, ctrl=pkt.kind != DATA)

    def _route(self, pkt: Packet, sw: int, dst_sw: int) -> int | None:
        fab = self.fabric
        mode = pkt.mode
        if mode == MODE_EV:
            same = self.flows[pkt.flow_id].same_group
            nxt, pkt.stage = fab.ev_next(sw, dst_sw, pkt.stage, pkt.ev1, pkt.ev2, same)
        elif mode == MODE_MINIMAL:
            nxt = fab.next_hop_tbl(dst_sw)[sw]
        elif mode == MODE_VALIANT:
            nxt = self._valiant_step(pkt, sw, dst_sw)
        else:  # MODE_UGAL, first switch; afterwards pkt.mode mutates
            nxt = self._ugal_decide(pkt, sw, dst_sw)
        link = self.topo.link_between(sw, nxt)
        if not link.up:
            self._count_drop(pkt, DROP_LINK)
            return None
        if pkt.mode in (MODE_VALIANT, MODE_UGAL):
            if nxt in fab.is_global[sw]:
                pkt.gcnt += 1
            else:
                pkt.lcnt += 1
        return nxt

    def _valiant_candidates(self, pkt: Packet, sw: int, dst_sw: int) -> list[int]:
        """Up neighbors from which the canonical minimal remainder still fits
        the bounded-path pattern set."""
        fab = self.fabric
        topo = self.topo
        pat = fab.pattern_tbl(dst_sw)
        same = self.flows[pkt.flow_id].same_group
        kind = topo.kind
        out = []
        for n in topo.neighbor_ids[sw]:
            if n in pkt.visited:
                continue
            if not topo.link_between(sw, n).up:
                continue
            g = 1 if n in fab.is_global[sw] else 0
            rl, rg = pat[n]
            tl = pkt.lcnt + (1 - g) + rl
            tg = pkt.gcnt + g + rg
            if kind == "dragonfly" and same:
                if (tl, tg) not in ((1, 0), (2, 0)):
                    continue
            elif not admissible_pattern(kind, tl, tg):
                continue
            out.append(n)
        return out

    def _valiant_step(self, pkt: Packet, sw: int, dst_sw: int) -> int:
        cands = self._valiant_candidates(pkt, sw, dst_sw)
        if not cands:
            return self.fabric.next_hop_tbl(dst_sw)[sw]
        if len(cands) == 1:
            return cands[0]
        return cands[self.route_rng[sw].randrange(len(cands))]

    def _ugal_decide(self, pkt: Packet, sw: int, dst_sw: int) -> int:
        """Source-switch choice: minimal iff q_min*h_min <= q_val*h_val."""
        fab = self.fabric
        min_nbr = fab.next_hop_tbl(dst_sw)[sw]
        dist = self.topo.dist_from(dst_sw, up_only=False)
        h_min = dist[sw]
        q_min = len(self.sw_port[sw][min_nbr].data)
        cands = self._valiant_candidates(pkt, sw, dst_sw)
        if not cands:
            pkt.mode = MODE_MINIMAL
            return min_nbr
        val_nbr = cands[self.route_rng[sw].randrange(len(cands))]
        h_val = 1 + dist[val_nbr]
        q_val = len(self.sw_port[sw][val_nbr].data)
        if q_min * h_min <= q_val * h_val:
            pkt.mode = MODE_MINIMAL
            return min_nbr
        pkt.mode = MODE_VALIANT
        return val_nbr

    # -- endpoints ----------------------------------------------------------------

    def _arrive_endpoint(self, pkt: Packet, ep: int) -> None:
        fl = self.flows[pkt.flow_id]
        now = self.now
        if pkt.kind == DATA:
            fl.arrivals_full += 1
            was_complete = fl.receiver.complete_time is not None
            fl.receiver.on_data(pkt.psn, pkt.payload, now)
            if not was_complete and fl.receiver.complete_time is not None:
                self._flow_completed(fl)
            self._send_control(ACK, pkt, ep, marked=pkt.ecn)
        elif pkt.kind == TRIMMED:
            fl.arrivals_trimmed += 1
            self._send_control(NACK, pkt, ep, marked=False)
        elif pkt.kind == ACK:
            idx = fl.sender.on_ack(pkt.psn, pkt.marked_echo, now)
            if idx is not None and idx >= 0:
                fl.lb.feedback(lb.ACK_ECN if pkt.marked_echo else lb.ACK_CLEAN, idx, now)
            fl.sender.pump(now)
        else:  # NACK: block-free fast retransmit
            ent = fl.sender.in_flight.get(pkt.psn)
            if ent is not None and ent[2] == pkt.gen:
                if ent[1] >= 0:
                    fl.lb.feedback(lb.NACK, ent[1], now)
                fl.sender.on_nack(pkt.psn, pkt.gen, now)
            fl.sender.pump(now)

    def _send_control(self, kind: int, data_pkt: Packet, ep: int, marked: bool) -> None:
        fl = self.flows[data_pkt.flow_id]
        pkt = Packet(kind, ep, data_pkt.src, data_pkt.flow_id, data_pkt.psn,
                     data_pkt.gen, data_pkt.ev1, data_pkt.ev2, MODE_EV, self.now)
        pkt.marked_echo = marked
        pkt.rroute = list(reversed(data_pkt.path))
        pkt.ridx = 1
        self.control_bytes_sent += pkt.size
        self._enqueue(self.nic[ep], pkt, ctrl=True)

    def _handle_timeout(self, flow_id: int, psn_gen: tuple[int, int]) -> None:
        fl = self.flows[flow_id]
        psn, gen = psn_gen
        idx = fl.sender.on_timeout(psn, gen, self.now)
        if idx is None:
            return
        if idx >= 0:
            fl.lb.feedback(lb.TIMEOUT, idx, self.now)
        fl.sender.retransmit_after_timeout(psn, self.now)

    def _flow_completed(self, fl: Flow) -> None:
        for dep in fl.dependents:
            dep.pending_deps -= 1
            if dep.pending_deps == 0 and not dep.started:
                self._push(self.now, E_FLOW_START, dep.id, 0)

    # -- inspection helpers ----------------------------------------------------------

    def trace_ev_path(self, src_sw: int, dst_sw: int, ev1: int, ev2: int,
                      same_group: bool | None = None) -> list[int]:
        return self.fabric.trace_ev_path(src_sw, dst_sw, ev1, ev2, same_group)
