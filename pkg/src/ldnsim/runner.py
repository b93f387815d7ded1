"""Experiment orchestration: build topology, generate traffic, simulate, export."""

from __future__ import annotations

import copy
import json
import os

from . import metrics, workloads
from .config import ExperimentConfig
from .engine import PS_PER_NS, Simulator
from .errors import ConfigError
from .metrics import FlowRecord
from .topology import (DragonflyParams, SlimFlyParams, Topology, build_dragonfly,
                       build_slimfly, fail_links)


def build_topology(cfg: ExperimentConfig) -> Topology:
    t = cfg.topology
    if t.kind == "dragonfly":
        topo = build_dragonfly(DragonflyParams(t.p, t.a, t.h), cfg.local_ns, cfg.global_ns)
    else:
        topo = build_slimfly(SlimFlyParams(t.q, t.p, t.delta), cfg.local_ns, cfg.global_ns)
    if cfg.failure.fraction > 0:
        topo = fail_links(topo, cfg.failure.fraction, cfg.failure.seed)
    return topo


def build_workload(cfg: ExperimentConfig, topo: Topology) -> list[workloads.FlowSpec]:
    w = cfg.workload
    if w.kind == "permutation":
        return workloads.gen_permutation(topo, w.cross_group, w.flow_bytes, cfg.seed)
    if w.kind == "adversarial":
        return workloads.gen_adversarial(topo, w.flow_bytes, cfg.seed)
    if w.kind == "motivational":
        return workloads.gen_motivational(topo, w.flow_bytes, w.flow_bytes,
                                          w.background, w.free_groups,
                                          w.monitored_start_ns)
    if w.kind == "incast_bystanders":
        return workloads.gen_incast_bystanders(topo, w.senders, w.receiver,
                                               w.flow_bytes, cfg.seed)
    if w.kind == "collective":
        return workloads.gen_collective_with_background(
            topo, w.algorithm, w.participants, w.message_bytes,
            w.parallel_connections, w.background, w.flow_bytes, cfg.seed)
    if w.kind == "trace":
        cdf = workloads.FlowSizeCDF.load(w.cdf_file)
        return workloads.gen_trace(topo, w.load, w.duration_ms * 1e6,
                                   w.max_senders_per_receiver, cfg.seed, cdf,
                                   cfg.link_rate_bps)
    if w.kind == "replay":
        with open(w.file) as f:
            return workloads.flows_from_json(json.load(f))
    raise ConfigError(f"unknown workload kind {w.kind!r}")


class RunResult:
    def __init__(self, summary, records, sim, topo, out_dir):
        self.summary = summary
        self.records = records
        self.sim = sim
        self.topo = topo
        self.out_dir = out_dir


def run(cfg: ExperimentConfig, out_dir: str | None = None,
        export_files: bool = True, topo: Topology | None = None,
        flows: list[workloads.FlowSpec] | None = None) -> RunResult:
    cfg = copy.deepcopy(cfg)
    cfg.queue_packets = cfg.resolved_queue_packets()
    if topo is None:
        topo = build_topology(cfg)
    if flows is None:
        flows = build_workload(cfg, topo)
    sim = Simulator(topo, cfg, flows)
    sim.run(int(cfg.time_limit_s * 1e12))
    records = collect_records(sim)
    counters = {
        "queue_drop": sim.drops["queue_drop"],
        "trim": sim.drops["trim"],
        "failed_link": sim.drops["failed_link"],
        "control_drops": sim.control_drops,
        "control_bytes": sim.control_bytes_sent,
        "data_bytes": sim.data_bytes_sent,
        "events": sim.events_processed,
    }
    summary = metrics.build_summary(records, cfg.to_dict(), cfg.seed, topo.digest(),
                                    sim.now / PS_PER_NS, cfg.scheme, counters)
    out = out_dir or cfg.output
    if export_files:
        metrics.export(out, records, summary)
    return RunResult(summary, records, sim, topo, out)


def collect_records(sim: Simulator) -> list[FlowRecord]:
    out = []
    for fl in sim.flows:
        rx = fl.receiver
        tx = fl.sender
        start = (fl.start_actual if fl.start_actual is not None
                 else int(fl.spec.start_ns * PS_PER_NS)) / PS_PER_NS
        end = rx.complete_time / PS_PER_NS if rx.complete_time is not None else None
        out.append(FlowRecord(
            flow_id=fl.id, tag=fl.spec.tag, scheme=fl.scheme,
            src=fl.spec.src, dst=fl.spec.dst, bytes=fl.spec.size,
            start_ns=start, end_ns=end,
            fct_ns=(end - start) if end is not None else None,
            completed=rx.complete_time is not None,
            packets_sent=tx.packets_sent, retransmissions=tx.retransmissions,
            ooo_packets=rx.ooo, received_packets=rx.received,
            acks=tx.acks, ecn_acks=tx.ecn_acks, nacks=tx.nacks,
            timeouts=tx.timeouts,
            drops_queue=fl.drops["queue_drop"], drops_trim=fl.drops["trim"],
            drops_failed_link=fl.drops["failed_link"],
        ))
    return out


def sweep(cfg: ExperimentConfig, schemes: list[str], seeds: list[int],
          out_root: str) -> list[tuple[str, int, str, str | None]]:
    """Run the scheme x seed cross product; one output directory per cell.

    Returns (scheme, seed, out_dir, error) tuples; per-cell failures are
    reported and the sweep continues.
    """
    if not schemes:
        raise ConfigError("sweep needs at least one scheme")
    if not seeds:
        raise ConfigError("sweep needs at least one seed")
    results = []
    for scheme in schemes:
        for seed in seeds:
            cell = copy.deepcopy(cfg)
            cell.scheme = scheme
            cell.seed = seed
            cell_dir = os.path.join(out_root, f"{scheme}-s{seed}")
            try:
                run(cell, out_dir=cell_dir)
                results.append((scheme, seed, cell_dir, None))
            except Exception as e:  # noqa: BLE001 - cell isolation is the contract
                results.append((scheme, seed, cell_dir, str(e)))
    return results
