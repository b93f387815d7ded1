"""Sender-side EV selection policies behind one interface.

Every policy sees the same latency-sorted EV entry list for its destination
switch and receives per-packet feedback (clean ACK, ECN-marked ACK, NACK,
timeout) tagged with the path index the packet used. Spritz-Scout caches good
paths sorted by latency and reuses the front until negative feedback evicts
it; Spritz-Spray consumes one cached entry per send. OPS and ECMP ignore
feedback entirely; Flicr repaths at flowlet granularity.
"""

from __future__ import annotations

import struct
import zlib
from bisect import bisect_right
from collections import deque
from random import Random

from .errors import NoViablePath
from .paths import EVEntry, MIN_ACROSS, MIN_WITHIN, PathInfo, init_weights

ACK_CLEAN = 0
ACK_ECN = 1
NACK = 2
TIMEOUT = 3

SCHEMES = ("minimal", "valiant", "ugal_l", "ecmp", "flicr",
           "ops_u", "ops_w", "scout", "spray_u", "spray_w")
SWITCH_SCHEMES = ("minimal", "valiant", "ugal_l")


class PathSet:
    """Immutable per-(source switch, destination switch) path view."""

    def __init__(self, infos: list[PathInfo], w_scale: float):
        self.infos = infos
        self.ev1 = [pi.entry.ev1 for pi in infos]
        self.ev2 = [pi.entry.ev2 for pi in infos]
        self.latencies = [pi.latency_ns for pi in infos]
        self.minimal = [pi.ptype.category in (MIN_WITHIN, MIN_ACROSS) for pi in infos]
        self.weighted = init_weights(self.latencies, w_scale) if infos else []

    def __len__(self) -> int:
        return len(self.infos)

    def entry(self, i: int) -> EVEntry:
        return self.infos[i].entry


class LoadBalancer:
    """Base: weighted sampling with temporary blocks and minimal-path bias."""

    reacts_to_feedback = True

    def __init__(self, paths: PathSet, base_w: list[float], rng: Random, params):
        self.paths = paths
        self.base_w = base_w
        self.w = list(base_w)
        self.rng = rng
        self.params = params
        self.blocked: dict[int, int] = {}  # index -> restore time (ps)
        self.bias_active = False
        self._cum: list[float] | None = None
        self._ecn_window: deque[int] = deque(maxlen=params.ecn_rate_window)

    # -- weighted sampling -----------------------------------------------------

    def _target_w(self, i: int) -> float:
        if not self.bias_active:
            return self.base_w[i]
        if self.params.min_bias_literal_index0:
            return self.params.min_bias_factor if i == 0 else self.base_w[i]
        if self.paths.minimal[i]:
            return self.base_w[i] * self.params.min_bias_factor
        return self.base_w[i]

    def _rebuild_weights(self) -> None:
        self.w = [0.0 if i in self.blocked else self._target_w(i)
                  for i in range(len(self.base_w))]
        self._cum = None

    def _tick(self, now: int) -> None:
        if not self.blocked:
            return
        due = [i for i, t in self.blocked.items() if t <= now]
        for i in due:
            del self.blocked[i]
            self.w[i] = self._target_w(i)
        if due:
            self._cum = None

    def sample(self, now: int) -> int:
        """gen(w): weighted draw; uniform over everything when all blocked."""
        self._tick(now)
        if not self.w:
            raise NoViablePath("empty path list")
        if self._cum is None:
            cum = []
            tot = 0.0
            for x in self.w:
                tot += x
                cum.append(tot)
            if tot <= 0.0:  # every path blocked: ignore blocks rather than wedge
                cum = list(range(1, len(self.w) + 1))
            self._cum = cum
        cum = self._cum
        return min(bisect_right(cum, self.rng.random() * cum[-1]), len(cum) - 1)

    def block(self, i: int, now: int) -> None:
        self.blocked[i] = now + self.params.block_restore_ps
        self.w[i] = 0.0
        self._cum = None

    def _note_ack(self, marked: bool) -> None:
        win = self._ecn_window
        win.append(1 if marked else 0)
        full = len(win) == self.params.ecn_rate_window
        high = full and sum(win) / len(win) > self.params.ecn_rate_trigger
        if high != self.bias_active:
            self.bias_active = high
            self._rebuild_weights()

    # -- interface ---------------------------------------------------------------

    def choose(self, now: int) -> int:
        raise NotImplementedError

    def feedback(self, kind: int, i: int, now: int) -> None:
        raise NotImplementedError


class SpritzBase(LoadBalancer):
    """Shared send logic: explore cadence, buffer reuse, weighted fallback."""

    consume_front = False  # Spray pops, Scout peeks

    def __init__(self, paths, base_w, rng, params):
        super().__init__(paths, base_w, rng, params)
        self.buffer: deque[int] = deque()
        self.packet_count = 0

    def choose(self, now: int) -> int:
        if self.packet_count >= self.params.explore_threshold:
            self.packet_count = 0
            return self.sample(now)
        self.packet_count += 1
        if not self.buffer:
            return self.sample(now)
        i = self.buffer[0]
        if self.consume_front:
            self.buffer.popleft()
        return i


class SpritzScout(SpritzBase):
    """Caches good paths sorted by latency and reuses the best until evicted."""

    consume_front = False

    def __init__(self, paths, base_w, rng, params):
        super().__init__(paths, base_w, rng, params)
        self.ecn_counts = [0] * len(paths)

    def _remove(self, i: int) -> None:
        try:
            self.buffer.remove(i)
        except ValueError:
            pass

    def feedback(self, kind: int, i: int, now: int) -> None:
        self._tick(now)
        if kind == ACK_CLEAN:
            if len(self.buffer) < self.params.buffer_size and i not in self.buffer:
                # entry lists are latency-sorted, so index order is latency order
                pos = bisect_right(list(self.buffer), i)
                self.buffer.insert(pos, i)
            self._note_ack(False)
        elif kind == ACK_ECN:
            self.ecn_counts[i] += 1
            if self.ecn_counts[i] > self.params.ecn_threshold:
                self.ecn_counts[i] = 0
                self._remove(i)
            self._note_ack(True)
        elif kind == NACK:
            self.ecn_counts[i] = 0
            self._remove(i)
        elif kind == TIMEOUT:
            self.ecn_counts[i] = 0
            self._remove(i)
            self.block(i, now)


class SpritzSpray(SpritzBase):
    """FIFO buffer consumed per send; ECN marks and NACKs are ignored."""

    consume_front = True

    def feedback(self, kind: int, i: int, now: int) -> None:
        self._tick(now)
        if kind == ACK_CLEAN:
            if len(self.buffer) < self.params.buffer_size:
                self.buffer.append(i)  # duplicates allowed
            self._note_ack(False)
        elif kind == ACK_ECN:
            self._note_ack(True)
        elif kind == TIMEOUT:
            self.block(i, now)


class OPS(LoadBalancer):
    """Oblivious per-packet spraying; feedback is a no-op."""

    reacts_to_feedback = False

    def choose(self, now: int) -> int:
        return self.sample(now)

    def feedback(self, kind: int, i: int, now: int) -> None:
        pass


class ECMP(LoadBalancer):
    """Static five-tuple hash: one fixed path for the flow's lifetime."""

    reacts_to_feedback = False

    def __init__(self, paths, base_w, rng, params, five_tuple):
        super().__init__(paths, base_w, rng, params)
        self.index = five_tuple_hash(five_tuple) % len(paths)

    def choose(self, now: int) -> int:
        return self.index

    def feedback(self, kind: int, i: int, now: int) -> None:
        pass


class Flicr(LoadBalancer):
    """Flowlet-level repathing on idle gaps or recent congestion feedback."""

    def __init__(self, paths, base_w, rng, params):
        super().__init__(paths, base_w, rng, params)
        self.index: int | None = None
        self.last_send = -(1 << 62)
        self.congested = False
        self._acks: deque[int] = deque(maxlen=params.flicr_ecn_window)

    def choose(self, now: int) -> int:
        gap = now - self.last_send > self.params.flicr_gap_ps
        if self.index is None or gap or self.congested:
            self.index = self.sample(now)
            self.congested = False
        self.last_send = now
        return self.index

    def feedback(self, kind: int, i: int, now: int) -> None:
        if kind in (ACK_CLEAN, ACK_ECN):
            self._acks.append(1 if kind == ACK_ECN else 0)
            if (len(self._acks) == self._acks.maxlen
                    and sum(self._acks) / len(self._acks) > self.params.flicr_ecn_frac):
                self.congested = True
        else:  # NACK or timeout: repath at the next send
            self.congested = True


class SwitchRouted(LoadBalancer):
    """Stub for switch-level schemes (minimal / valiant / ugal_l)."""

    reacts_to_feedback = False

    def __init__(self):
        pass

    def choose(self, now: int) -> int:
        return -1

    def feedback(self, kind: int, i: int, now: int) -> None:
        pass


def five_tuple_hash(five_tuple: tuple[int, int, int, int, int]) -> int:
    return zlib.crc32(struct.pack("<5I", *five_tuple))


def make_load_balancer(scheme: str, paths: PathSet | None, rng: Random,
                       params, five_tuple=None) -> LoadBalancer:
    if scheme in SWITCH_SCHEMES:
        return SwitchRouted()
    uniform = [1.0] * len(paths)
    weighted = paths.weighted
    if scheme == "scout":
        return SpritzScout(paths, weighted, rng, params)
    if scheme == "spray_u":
        return SpritzSpray(paths, uniform, rng, params)
    if scheme == "spray_w":
        return SpritzSpray(paths, weighted, rng, params)
    if scheme == "ops_u":
        return OPS(paths, uniform, rng, params)
    if scheme == "ops_w":
        return OPS(paths, weighted, rng, params)
    if scheme == "ecmp":
        return ECMP(paths, weighted, rng, params, five_tuple)
    if scheme == "flicr":
        return Flicr(paths, weighted, rng, params)
    raise ValueError(f"unknown scheme {scheme!r}")
