"""Packet-level simulator for low-diameter networks with sender-based
adaptive load balancing over ECMP entropy steering."""

__version__ = "0.1.0"

from .topology import (DragonflyParams, SlimFlyParams, Topology,  # noqa: F401
                       build_dragonfly, build_slimfly, fail_links)
from .paths import (EndpointTable, EVEntry, PathType,  # noqa: F401
                    build_endpoint_table, enumerate_bounded_paths, ev_assignment,
                    init_weights, memory_footprint, path_latency)
from .engine import Simulator, ecn_mark_probability  # noqa: F401
from .config import ExperimentConfig, from_dict  # noqa: F401
from .runner import run, sweep  # noqa: F401
