import pytest

from ldnsim import config as config_mod
from ldnsim.engine import Simulator
from ldnsim.transport import (HEADER_BYTES, PACKET_BYTES, PAYLOAD_BYTES,
                              Receiver, Sender)
from ldnsim.workloads import FlowSpec

BDP = 88 * PACKET_BYTES
CWND_MAX = int(1.5 * BDP)
RTT = 9_000_000  # 9 us in ps


def make_sender(size=40 * PACKET_BYTES, cwnd=CWND_MAX):
    cfg = config_mod.ExperimentConfig()
    s = Sender(0, size, cwnd, CWND_MAX, rto_base_ps=90_000_000,
               rto_cap_ps=10**11, base_rtt_ps=RTT, params=cfg.transport)
    sent = []
    s.send_cb = lambda psn, payload, gen, mult, retx: sent.append(psn) or 0
    s.sent_log = sent
    return s


class TestWindow:
    def test_initial_burst_fills_window(self):
        s = make_sender(size=300 * PAYLOAD_BYTES)
        s.pump(0)
        assert s.inflight_bytes <= s.cwnd
        assert len(s.in_flight) == CWND_MAX // PACKET_BYTES

    def test_cwnd_never_exceeds_cap(self):
        s = make_sender()
        s.pump(0)
        for psn in list(s.in_flight):
            s.on_ack(psn, marked=False, now=RTT)
            s.pump(RTT)
            assert s.cwnd <= CWND_MAX
        assert s.cwnd == CWND_MAX  # clean ACKs keep the window at its cap

    def test_cwnd_floor_one_packet(self):
        s = make_sender()
        s.alpha = 1.0
        s.pump(0)
        t = 0
        for round_ in range(40):
            t += RTT
            for psn in list(s.in_flight):
                s.on_ack(psn, marked=True, now=t)
            s.pump(t)
        assert s.cwnd >= PACKET_BYTES

    def test_marked_window_multiplicative_decrease(self):
        s = make_sender(size=300 * PAYLOAD_BYTES)
        s.pump(0)
        before = s.cwnd
        for psn in list(s.in_flight):
            s.on_ack(psn, marked=True, now=RTT)
        assert s.cwnd < before

    def test_alpha_tracks_marks(self):
        s = make_sender()
        s.pump(0)
        for psn in list(s.in_flight):
            s.on_ack(psn, marked=True, now=RTT)
        high = s.alpha
        assert high > 0.5
        s2 = make_sender()
        s2.pump(0)
        for psn in list(s2.in_flight):
            s2.on_ack(psn, marked=False, now=RTT)
        assert s2.alpha == 0.0

    def test_fast_increase_jumps_toward_cap(self):
        s = make_sender(size=4000 * PAYLOAD_BYTES)
        s.cwnd = 4 * PACKET_BYTES
        s.pump(0)
        for i in range(8):  # ack-clocked: each clean ACK admits a refill
            psn = min(s.in_flight)
            s.on_ack(psn, marked=False, now=1000 * (i + 1))
            s.pump(1000 * (i + 1))
        # >= fast_increase_acks clean ACKs: window must have grown well past
        # plain additive increase
        assert s.cwnd > 4 * PACKET_BYTES + 2 * PACKET_BYTES

    def test_stale_ack_counted(self):
        s = make_sender()
        s.pump(0)
        assert s.on_ack(9999, marked=False, now=1) is None
        assert s.stale_acks == 1


class TestNackAndTimeout:
    def test_single_nack_single_retransmission(self):
        s = make_sender()
        s.pump(0)
        n0 = s.packets_sent
        assert s.on_nack(0, gen=0, now=1000) == 0
        assert s.retransmissions == 1
        assert s.packets_sent == n0 + 1
        assert s.in_flight[0][2] == 1  # generation bumped

    def test_stale_nack_ignored(self):
        s = make_sender()
        s.pump(0)
        s.on_nack(0, gen=0, now=1000)
        assert s.on_nack(0, gen=0, now=2000) is None  # old generation
        assert s.retransmissions == 1

    def test_quickadapt_collapses_to_delivered(self):
        s = make_sender()
        s.pump(0)
        # every packet of the window trimmed, nothing delivered in the last RTT
        for psn in sorted(s.in_flight):
            s.on_nack(psn, gen=0, now=2000)
        assert s.cwnd == PACKET_BYTES  # floor: one packet

    def test_quickadapt_uses_recent_goodput(self):
        s = make_sender(size=1000 * PAYLOAD_BYTES)
        s.pump(0)
        psns = sorted(s.in_flight)
        kept = psns[: len(psns) // 2]
        for psn in kept:
            s.on_ack(psn, marked=False, now=1000)
        for psn in psns[len(psns) // 2:]:
            s.on_nack(psn, gen=0, now=2000)
        delivered = len(kept) * PACKET_BYTES
        assert s.cwnd >= min(CWND_MAX, delivered) * 0.5  # collapsed near goodput

    def test_timeout_fires_only_for_live_generation(self):
        s = make_sender()
        s.pump(0)
        assert s.on_timeout(0, gen=1, now=10**9) is None  # wrong generation
        assert s.on_timeout(0, gen=0, now=10**9) == 0
        s.retransmit_after_timeout(0, 10**9)
        assert s.in_flight[0][4] == 2  # rto multiplier doubled
        assert s.timeouts == 1

    def test_rto_backoff_doubles(self):
        s = make_sender()
        s.pump(0)
        for k in range(4):
            gen = s.in_flight[0][2]
            assert s.on_timeout(0, gen=gen, now=10**9 * (k + 1)) is not None
            s.retransmit_after_timeout(0, 10**9 * (k + 1))
        assert s.in_flight[0][4] == 16

    def test_retransmissions_equal_nacks_plus_timeouts(self):
        s = make_sender()
        s.pump(0)
        s.on_nack(0, gen=0, now=1000)
        s.on_nack(1, gen=0, now=1100)
        gen = s.in_flight[2][2]
        s.on_timeout(2, gen, now=10**9)
        s.retransmit_after_timeout(2, 10**9)
        assert s.retransmissions == s.nacks + s.timeouts == 3


class TestReceiver:
    def test_in_order_no_ooo(self):
        r = Receiver(0, 3 * PAYLOAD_BYTES)
        for psn in (0, 1, 2):
            r.on_data(psn, PAYLOAD_BYTES, now=psn)
        assert r.ooo == 0
        assert r.complete_time == 2

    def test_ooo_rule_counts_both_sides(self):
        # arrivals 0,2,1: packet 2 mismatches (expected 1) and then packet 1
        # mismatches (expected 3)
        r = Receiver(0, 3 * PAYLOAD_BYTES)
        r.on_data(0, PAYLOAD_BYTES, 0)
        r.on_data(2, PAYLOAD_BYTES, 1)
        r.on_data(1, PAYLOAD_BYTES, 2)
        assert r.ooo == 2

    def test_duplicate_not_double_counted(self):
        r = Receiver(0, 2 * PAYLOAD_BYTES)
        assert r.on_data(0, PAYLOAD_BYTES, 0) is False
        assert r.on_data(0, PAYLOAD_BYTES, 1) is True
        assert r.delivered_bytes == PAYLOAD_BYTES
        assert r.received == 2

    def test_completion_exactly_once(self):
        r = Receiver(0, 2 * PAYLOAD_BYTES)
        r.on_data(0, PAYLOAD_BYTES, 5)
        r.on_data(1, PAYLOAD_BYTES, 9)
        r.on_data(1, PAYLOAD_BYTES, 50)
        assert r.complete_time == 9


class TestEndToEnd:
    def test_no_failures_no_timeouts(self, df_small):
        cfg = config_mod.from_dict({"scheme": "spray_w"})
        cfg.queue_packets = cfg.resolved_queue_packets()
        flows = [FlowSpec(e, (e + 17) % 72, 262144) for e in range(0, 72, 2)]
        sim = Simulator(df_small, cfg, flows)
        sim.run(10**12)
        assert all(f.receiver.complete_time is not None for f in sim.flows)
        assert sum(f.sender.timeouts for f in sim.flows) == 0

    def test_ack_overhead_under_two_percent(self, df_small):
        cfg = config_mod.from_dict({"scheme": "ops_u"})
        cfg.queue_packets = cfg.resolved_queue_packets()
        flows = [FlowSpec(0, 40, 1 << 20)]
        sim = Simulator(df_small, cfg, flows)
        sim.run(10**12)
        ratio = sim.control_bytes_sent / sim.data_bytes_sent
        assert HEADER_BYTES / PACKET_BYTES == pytest.approx(0.0154, abs=0.001)
        assert ratio < 0.02

    def test_reliability_under_failures(self, df_small):
        from ldnsim.topology import fail_links
        topo = fail_links(df_small, 0.02, seed=7)
        cfg = config_mod.from_dict({"scheme": "spray_w"})
        cfg.queue_packets = cfg.resolved_queue_packets()
        flows = [FlowSpec(e, (e + 17) % 72, 131072) for e in range(0, 72, 2)]
        sim = Simulator(topo, cfg, flows)
        sim.run(10**12)
        for f in sim.flows:
            assert f.receiver.delivered_bytes == f.spec.size
            assert f.receiver.complete_time is not None
