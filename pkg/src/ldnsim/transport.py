"""Per-flow reliable transport with per-packet ACKs.

The congestion controller is DCTCP-style: a per-ACK EWMA of the ECN-mark
indicator drives a once-per-window multiplicative decrease, with additive
increase on clean windows. Two extensions give fast reactions: FastIncrease
(after a run of clean ACKs the window jumps toward its cap) and QuickAdapt
(when most of a window comes back trimmed, the window collapses to the bytes
actually delivered over the last RTT). NACKs trigger immediate retransmission
through the load balancer; timeouts retransmit with exponential backoff and
tell the load balancer to block the path.
"""

from __future__ import annotations

from collections import deque

HEADER_BYTES = 64
PAYLOAD_BYTES = 4096
PACKET_BYTES = HEADER_BYTES + PAYLOAD_BYTES


class Sender:
    """Congestion-window bookkeeping for one flow; the simulator transmits."""

    def __init__(self, flow_id: int, size_bytes: int, cwnd_init: int, cwnd_max: int,
                 rto_base_ps: int, rto_cap_ps: int, base_rtt_ps: int, params):
        self.flow_id = flow_id
        self.size = size_bytes
        self.remaining = size_bytes
        self.cwnd = cwnd_init
        self.cwnd_max = cwnd_max
        self.rto_base = rto_base_ps
        self.rto_cap = rto_cap_ps
        self.base_rtt = base_rtt_ps
        self.g = params.dctcp_gain
        self.fi_acks = params.fast_increase_acks
        self.qa_frac = params.quickadapt_frac
        self.alpha = 0.0
        self.next_psn = 0
        # psn -> [send_time, path_index, gen, payload_bytes, rto_mult]
        self.in_flight: dict[int, list] = {}
        self.inflight_bytes = 0
        self.win_bytes = 0
        self.win_marks = 0
        self.win_nacks = 0
        self.win_acked_pkts = 0
        self.consec_clean = 0
        self.qa_cooldown_until = 0
        self._delivered: deque[tuple[int, int]] = deque()
        # stats
        self.packets_sent = 0
        self.retransmissions = 0
        self.acks = 0
        self.ecn_acks = 0
        self.nacks = 0
        self.timeouts = 0
        self.stale_acks = 0

    # send_cb(psn, payload, gen, rto_mult, is_retx) -> path index; wired by the sim
    send_cb = None

    @property
    def done(self) -> bool:
        return self.remaining == 0 and not self.in_flight

    def pump(self, now: int) -> None:
        """Transmit new packets while the window has room."""
        while self.remaining > 0:
            payload = min(PAYLOAD_BYTES, self.remaining)
            if self.inflight_bytes + payload + HEADER_BYTES > self.cwnd:
                break
            psn = self.next_psn
            self.next_psn += 1
            self.remaining -= payload
            self.inflight_bytes += payload + HEADER_BYTES
            idx = self.send_cb(psn, payload, 0, 1, False)
            self.in_flight[psn] = [now, idx, 0, payload, 1]
            self.packets_sent += 1

    def _resend(self, psn: int, now: int, rto_mult: int) -> None:
        ent = self.in_flight[psn]
        gen = ent[2] + 1
        idx = self.send_cb(psn, ent[3], gen, rto_mult, True)
        self.in_flight[psn] = [now, idx, gen, ent[3], rto_mult]
        self.packets_sent += 1
        self.retransmissions += 1

    # -- feedback ----------------------------------------------------------------

    def on_ack(self, psn: int, marked: bool, now: int) -> int | None:
        """Returns the acked transmission's path index, or None for stale ACKs."""
        ent = self.in_flight.pop(psn, None)
        if ent is None:
            self.stale_acks += 1
            return None
        self.acks += 1
        if marked:
            self.ecn_acks += 1
        size = ent[3] + HEADER_BYTES
        self.inflight_bytes -= size
        self._delivered.append((now, size))
        while self._delivered and self._delivered[0][0] < now - self.base_rtt:
            self._delivered.popleft()
        self.alpha += self.g * ((1.0 if marked else 0.0) - self.alpha)
        if marked:
            self.consec_clean = 0
        else:
            self.consec_clean += 1
            if self.consec_clean >= self.fi_acks:
                self.consec_clean = 0
                self.cwnd = min(self.cwnd_max, self.cwnd + (self.cwnd_max - self.cwnd) // 2
                                + PACKET_BYTES)
        self.win_bytes += size
        self.win_acked_pkts += 1
        if marked:
            self.win_marks += 1
        if self.win_bytes >= self.cwnd:
            if self.win_marks:
                self.cwnd = max(PACKET_BYTES, int(self.cwnd * (1.0 - self.alpha / 2.0)))
            else:
                self.cwnd = min(self.cwnd_max, self.cwnd + PACKET_BYTES)
            self._reset_window()
        return ent[1]

    def _reset_window(self) -> None:
        self.win_bytes = 0
        self.win_marks = 0
        self.win_nacks = 0
        self.win_acked_pkts = 0

    def on_nack(self, psn: int, gen: int, now: int) -> int | None:
        """Retransmits immediately; returns the NACKed path index, or None if stale."""
        ent = self.in_flight.get(psn)
        if ent is None or ent[2] != gen:
            return None
        self.nacks += 1
        self.win_nacks += 1
        if now >= self.qa_cooldown_until and self.win_nacks >= 4:
            frac = self.win_nacks / (self.win_nacks + self.win_acked_pkts)
            if frac >= self.qa_frac:
                while self._delivered and self._delivered[0][0] < now - self.base_rtt:
                    self._delivered.popleft()
                delivered = sum(b for _, b in self._delivered)
                self.cwnd = max(PACKET_BYTES, min(self.cwnd_max, delivered))
                self.qa_cooldown_until = now + self.base_rtt
                self._reset_window()
        idx = ent[1]
        self._resend(psn, now, ent[4])
        return idx

    def on_timeout(self, psn: int, gen: int, now: int) -> int | None:
        """Fires only if the transmission is still outstanding; returns its path."""
        ent = self.in_flight.get(psn)
        if ent is None or ent[2] != gen:
            return None
        self.timeouts += 1
        return ent[1]

    def retransmit_after_timeout(self, psn: int, now: int) -> None:
        ent = self.in_flight[psn]
        self._resend(psn, now, ent[4] * 2)  # exponential backoff, capped by the sim


class Receiver:
    """Deduplicating receiver with the sequence-mismatch OOO counter."""

    def __init__(self, flow_id: int, size_bytes: int):
        self.flow_id = flow_id
        self.size = size_bytes
        self.psn_expected = 0
        self.ooo = 0
        self.received = 0
        self.delivered_bytes = 0
        self.delivered_psns: set[int] = set()
        self.complete_time: int | None = None

    def on_data(self, psn: int, payload: int, now: int) -> bool:
        """Returns True for duplicates (re-ACK without re-counting bytes)."""
        self.received += 1
        if psn != self.psn_expected:
            self.ooo += 1
        self.psn_expected = psn + 1
        if psn in self.delivered_psns:
            return True
        self.delivered_psns.add(psn)
        self.delivered_bytes += payload
        if self.delivered_bytes >= self.size and self.complete_time is None:
            self.complete_time = now
        return False
