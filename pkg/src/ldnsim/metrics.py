"""Per-flow records, run summaries, and deterministic file export.

flows.csv column order is fixed (see FLOW_CSV_COLUMNS); summary.json carries
a schema_version, the resolved config, the seed and a topology digest, so a
run is fully identified by its outputs. Repeated runs with the same seed
produce byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import asdict, dataclass

from .errors import EmptySamples

SCHEMA_VERSION = 1

FLOW_CSV_COLUMNS = [
    "flow_id", "tag", "scheme", "src", "dst", "bytes", "start_ns", "end_ns",
    "fct_ns", "completed", "packets_sent", "retransmissions", "ooo_packets",
    "received_packets", "acks", "ecn_acks", "nacks", "timeouts",
    "drops_queue", "drops_trim", "drops_failed_link",
]


@dataclass
class FlowRecord:
    flow_id: int
    tag: str
    scheme: str
    src: int
    dst: int
    bytes: int
    start_ns: float
    end_ns: float | None
    fct_ns: float | None
    completed: bool
    packets_sent: int
    retransmissions: int
    ooo_packets: int
    received_packets: int
    acks: int
    ecn_acks: int
    nacks: int
    timeouts: int
    drops_queue: int
    drops_trim: int
    drops_failed_link: int


def percentile(samples: list[float], p: float) -> float:
    """Nearest-rank percentile (not interpolated), p in [0, 100]."""
    if not samples:
        raise EmptySamples("percentile of empty sample set")
    if not 0 <= p <= 100:
        raise ValueError("p must be in [0, 100]")
    ordered = sorted(samples)
    if p == 0:
        return ordered[0]
    rank = math.ceil(p / 100.0 * len(ordered))
    return ordered[rank - 1]


def _fct_stats(fcts: list[float]) -> dict:
    if not fcts:
        return {"count": 0, "mean_ns": None, "p50_ns": None, "p99_ns": None, "max_ns": None}
    return {
        "count": len(fcts),
        "mean_ns": sum(fcts) / len(fcts),
        "p50_ns": percentile(fcts, 50),
        "p99_ns": percentile(fcts, 99),
        "max_ns": max(fcts),
    }


def build_summary(records: list[FlowRecord], config: dict, seed: int,
                  topology_digest: str, sim_time_ns: float, scheme: str,
                  extra_counters: dict) -> dict:
    completed = [r for r in records if r.completed]
    fcts = [r.fct_ns for r in completed]
    by_tag = {}
    for tag in sorted({r.tag for r in records}):
        sub = [r for r in records if r.tag == tag]
        done = [r.fct_ns for r in sub if r.completed]
        by_tag[tag] = {
            "flows": len(sub),
            "completed": sum(1 for r in sub if r.completed),
            "fct": _fct_stats(done),
            "retransmissions": sum(r.retransmissions for r in sub),
            "ooo_packets": sum(r.ooo_packets for r in sub),
        }
    received = sum(r.received_packets for r in records)
    ooo = sum(r.ooo_packets for r in records)
    return {
        "schema_version": SCHEMA_VERSION,
        "scheme": scheme,
        "seed": seed,
        "topology_digest": topology_digest,
        "config": config,
        "completed": bool(records) and all(r.completed for r in records),
        "sim_time_ns": sim_time_ns,
        "flows": len(records),
        "flows_completed": len(completed),
        "fct": _fct_stats(fcts),
        "by_tag": by_tag,
        "drops": {
            "queue_drop": extra_counters.get("queue_drop", 0),
            "trim": extra_counters.get("trim", 0),
            "failed_link": extra_counters.get("failed_link", 0),
        },
        "control_drops": extra_counters.get("control_drops", 0),
        "packets": {
            "injected": sum(r.packets_sent for r in records),
            "delivered": sum(r.received_packets for r in records),
            "retransmissions": sum(r.retransmissions for r in records),
        },
        "ooo_packets": ooo,
        "ooo_percent": (100.0 * ooo / received) if received else 0.0,
        "control_bytes": extra_counters.get("control_bytes", 0),
        "data_bytes": extra_counters.get("data_bytes", 0),
        "events": extra_counters.get("events", 0),
    }


def export(out_dir: str, records: list[FlowRecord], summary: dict) -> tuple[str, str]:
    """Write flows.csv and summary.json; returns their paths."""
    os.makedirs(out_dir, exist_ok=True)
    flows_path = os.path.join(out_dir, "flows.csv")
    summary_path = os.path.join(out_dir, "summary.json")
    with open(flows_path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(FLOW_CSV_COLUMNS)
        for r in records:
            row = asdict(r)
            w.writerow([_csv_cell(row[c]) for c in FLOW_CSV_COLUMNS])
    with open(summary_path, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return flows_path, summary_path


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, float):
        return repr(v)
    return v
