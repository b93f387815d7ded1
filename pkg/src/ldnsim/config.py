"""Experiment configuration: defaults, JSON loading, strict validation.

Every default matches the evaluation setup (link and switch latencies, queue
depths, ECN thresholds, packet sizes, the sender-side tuning constants); each
field can be overridden individually. Unknown keys are rejected with
field-level messages.
"""

from __future__ import annotations

import copy
import json
from dataclasses import asdict, dataclass, field

from .errors import ConfigError
from .loadbalancers import SCHEMES

PS_PER_MS = 1_000_000_000


@dataclass
class TopologyConfig:
    kind: str = "dragonfly"
    p: int = 4
    a: int = 8
    h: int = 4
    q: int = 9
    delta: int = 0


@dataclass
class TransportConfig:
    rto_multiplier: float = 10.0      # x worst-case base RTT
    rto_cap_ms: float = 100.0
    dctcp_gain: float = 1.0 / 16.0
    fast_increase_acks: int = 5       # consecutive clean ACKs before the jump
    quickadapt_frac: float = 0.5      # window fraction trimmed to trigger collapse
    cwnd_cap_bdp: float = 1.5


@dataclass
class SpritzConfig:
    explore_threshold: int = 44
    ecn_threshold: int = 8
    buffer_size: int = 8
    w_scale: float = 3.0
    min_bias_factor: float = 8.0
    min_bias_literal_index0: bool = False
    ecn_rate_window: int = 64
    ecn_rate_trigger: float = 0.9
    block_restore_ms: float = 1.0
    flicr_gap_ps: int | None = None   # defaults to the base RTT at runtime
    flicr_ecn_window: int = 32
    flicr_ecn_frac: float = 0.5

    @property
    def block_restore_ps(self) -> int:
        return int(self.block_restore_ms * PS_PER_MS)


@dataclass
class FailureConfig:
    fraction: float = 0.0
    seed: int = 1


@dataclass
class WorkloadConfig:
    kind: str = "permutation"
    flow_bytes: int = 4 << 20
    cross_group: bool = True
    # motivational
    background: bool = True
    free_groups: int = 2
    monitored_start_ns: float = 10_000.0
    # incast
    senders: int = 32
    receiver: int = 160
    # collectives
    algorithm: str = "allreduce_ring"
    participants: int = 128
    message_bytes: int = 4 << 20
    parallel_connections: int = 8
    # traces
    load: float = 1.0
    duration_ms: float = 1.0
    max_senders_per_receiver: int = 4
    cdf_file: str | None = None
    # replay
    file: str | None = None


WORKLOAD_KINDS = ("permutation", "adversarial", "motivational",
                  "incast_bystanders", "collective", "trace", "replay")


@dataclass
class ExperimentConfig:
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    scheme: str = "spray_w"
    workload: WorkloadConfig = field(default_factory=WorkloadConfig)
    transport: TransportConfig = field(default_factory=TransportConfig)
    spritz: SpritzConfig = field(default_factory=SpritzConfig)
    failure: FailureConfig = field(default_factory=FailureConfig)
    seed: int = 1
    time_limit_s: float = 1.0
    output: str = "runs/out"
    # network constants
    link_rate_bps: int = 400_000_000_000
    local_ns: float = 25.0
    global_ns: float = 500.0
    switch_latency_ns: float = 500.0
    ecn_kmin: float = 0.2
    ecn_kmax: float = 0.8
    trimming: bool = True
    queue_packets: int = 0  # 0: default by topology kind (DF 88, SF 92)

    def resolved_queue_packets(self) -> int:
        if self.queue_packets:
            return self.queue_packets
        return 88 if self.topology.kind == "dragonfly" else 92

    def to_dict(self) -> dict:
        return asdict(self)


_SECTIONS = {
    "topology": TopologyConfig,
    "workload": WorkloadConfig,
    "transport": TransportConfig,
    "spritz": SpritzConfig,
    "failure": FailureConfig,
}


def _apply(obj, data: dict, path: str) -> None:
    valid = {f for f in obj.__dataclass_fields__}
    for key, val in data.items():
        if key not in valid:
            raise ConfigError(f"unknown config key {path}{key!r}")
        cur = getattr(obj, key)
        if isinstance(cur, bool) and not isinstance(val, bool):
            raise ConfigError(f"{path}{key}: expected boolean, got {val!r}")
        if isinstance(cur, (int, float)) and not isinstance(val, bool) \
                and not isinstance(val, (int, float)):
            raise ConfigError(f"{path}{key}: expected number, got {val!r}")
        setattr(obj, key, val)


def from_dict(data: dict) -> ExperimentConfig:
    if not isinstance(data, dict):
        raise ConfigError("config root must be an object")
    cfg = ExperimentConfig()
    top = {f for f in cfg.__dataclass_fields__}
    for key, val in data.items():
        if key not in top:
            raise ConfigError(f"unknown config key {key!r}")
        if key in _SECTIONS:
            if not isinstance(val, dict):
                raise ConfigError(f"{key}: expected an object")
            _apply(getattr(cfg, key), val, f"{key}.")
        else:
            _apply_scalar(cfg, key, val)
    validate(cfg)
    return cfg


def _apply_scalar(cfg, key, val):
    _apply(cfg, {key: val}, "")


def load_file(path: str) -> ExperimentConfig:
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return from_dict(data)


def validate(cfg: ExperimentConfig) -> None:
    t = cfg.topology
    if t.kind not in ("dragonfly", "slimfly"):
        raise ConfigError(f"topology.kind: unknown kind {t.kind!r}")
    if cfg.scheme not in SCHEMES:
        raise ConfigError(f"scheme: {cfg.scheme!r} not one of {', '.join(SCHEMES)}")
    if cfg.workload.kind not in WORKLOAD_KINDS:
        raise ConfigError(f"workload.kind: unknown kind {cfg.workload.kind!r}")
    if not 0 <= cfg.failure.fraction < 1:
        raise ConfigError("failure.fraction: must be in [0, 1)")
    if cfg.time_limit_s <= 0:
        raise ConfigError("time_limit_s: must be positive")
    if not 0 <= cfg.ecn_kmin < cfg.ecn_kmax <= 1:
        raise ConfigError("ecn thresholds: need 0 <= kmin < kmax <= 1")
    if cfg.workload.kind == "replay" and not cfg.workload.file:
        raise ConfigError("workload.file: required for replay workloads")


def apply_overrides(cfg: ExperimentConfig, pairs: list[str]) -> ExperimentConfig:
    """Apply `section.key=value` strings (CLI flags) over a config."""
    cfg = copy.deepcopy(cfg)
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r}: expected key=value")
        key, _, raw = pair.partition("=")
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        parts = key.split(".")
        if len(parts) == 1:
            _apply_scalar(cfg, parts[0], val)
        elif len(parts) == 2 and parts[0] in _SECTIONS:
            _apply(getattr(cfg, parts[0]), {parts[1]: val}, f"{parts[0]}.")
        else:
            raise ConfigError(f"override {key!r}: unknown key")
    validate(cfg)
    return cfg
