"""Command line interface: topo / paths / run / sweep / report.

Exit codes: 0 success, 1 configuration error, 2 runtime error. The default
output root comes from LDNSIM_OUTPUT_ROOT when set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import config as config_mod
from . import paths as paths_mod
from . import runner, workloads
from .errors import ConfigError, LdnsimError
from .loadbalancers import SCHEMES
from .topology import DragonflyParams, SlimFlyParams, build_dragonfly, build_slimfly


def _out_root() -> str:
    return os.environ.get("LDNSIM_OUTPUT_ROOT", "runs")


def _build_topo_from_args(args):
    if args.kind == "dragonfly":
        return build_dragonfly(DragonflyParams(args.p, args.a, args.h))
    return build_slimfly(SlimFlyParams(args.q, args.p))


def _add_topo_args(sp):
    sp.add_argument("--kind", choices=["dragonfly", "slimfly"], default="dragonfly")
    sp.add_argument("--p", type=int, default=4, help="endpoints per switch")
    sp.add_argument("--a", type=int, default=8, help="switches per group (dragonfly)")
    sp.add_argument("--h", type=int, default=4, help="global links per switch (dragonfly)")
    sp.add_argument("--q", type=int, default=9, help="prime power (slimfly)")


def cmd_topo(args) -> int:
    topo = _build_topo_from_args(args)
    doc = topo.to_json()
    if args.out:
        with open(args.out, "w") as f:
            json.dump(doc, f, indent=2, sort_keys=True)
            f.write("\n")
        print(f"wrote {args.out}: {doc['nodes']['switches']} switches, "
              f"{doc['nodes']['endpoints']} endpoints, {doc['nodes']['groups']} groups")
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        print()
    return 0


def cmd_paths_enumerate(args) -> int:
    topo = _build_topo_from_args(args)
    infos = paths_mod.EndpointTable(topo, args.src).entries(args.dst)
    print(f"# {len(infos)} paths {args.src} -> {args.dst} "
          f"(local,global latency_ns ev1 ev2 category hops)")
    for pi in infos:
        print(f"({pi.ptype.local_hops},{pi.ptype.global_hops}) "
              f"{pi.latency_ns:9.1f} {pi.entry.ev1:3d} {pi.entry.ev2:3d} "
              f"{pi.ptype.category:22s} {'-'.join(str(h) for h in pi.hops)}")
    return 0


def cmd_paths_memory(args) -> int:
    print("family,endpoints,bytes")
    targets = []
    n = 1000
    while n < args.endpoints:
        targets.append(n)
        n *= 2
    targets.append(args.endpoints)
    for family, paths in (("dragonfly", args.df_paths), ("slimfly", args.sf_paths)):
        for n in targets:
            b = paths_mod.memory_footprint(family, n, paths)
            print(f"{family},{n},{b}")
    return 0


def cmd_run(args) -> int:
    cfg = config_mod.load_file(args.config) if args.config else config_mod.from_dict({})
    overrides = list(args.set or [])
    if args.scheme:
        overrides.append(f"scheme={args.scheme}")
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.out:
        overrides.append(f"output={args.out}")
    cfg = config_mod.apply_overrides(cfg, overrides)
    if not args.out and not cfg.output:
        cfg.output = os.path.join(_out_root(), "run")
    topo = runner.build_topology(cfg)
    flows = runner.build_workload(cfg, topo)
    if args.export_workload:
        with open(args.export_workload, "w") as f:
            json.dump(workloads.flows_to_json(flows), f, indent=2)
            f.write("\n")
    res = runner.run(cfg, topo=topo, flows=flows)
    s = res.summary
    print(f"scheme={s['scheme']} flows={s['flows']} completed={s['flows_completed']} "
          f"sim_time_ns={s['sim_time_ns']:.0f} drops={s['drops']} -> {res.out_dir}")
    if not s["completed"]:
        print("note: run hit the simulated time limit before all flows completed")
    return 0


def cmd_sweep(args) -> int:
    cfg = config_mod.load_file(args.config) if args.config else config_mod.from_dict({})
    cfg = config_mod.apply_overrides(cfg, list(args.set or []))
    schemes = args.schemes.split(",") if args.schemes else []
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"unknown scheme {s!r}")
    seeds = [int(s) for s in args.seeds.split(",")] if args.seeds else [cfg.seed]
    out_root = args.out or os.path.join(_out_root(), "sweep")
    results = runner.sweep(cfg, schemes, seeds, out_root)
    failures = 0
    for scheme, seed, cell_dir, err in results:
        if err is None:
            print(f"ok   {scheme} seed={seed} -> {cell_dir}")
        else:
            failures += 1
            print(f"FAIL {scheme} seed={seed}: {err}")
    return 2 if failures else 0


def cmd_report(args) -> int:
    rows = []
    for d in args.runs:
        path = os.path.join(d, "summary.json")
        with open(path) as f:
            s = json.load(f)
        fct = s["fct"]
        rows.append((s["scheme"], s["seed"], s["flows"], s["flows_completed"],
                     fct["mean_ns"], fct["p99_ns"],
                     sum(s["drops"].values()), s["ooo_percent"], s["completed"]))
    print(f"{'scheme':<10} {'seed':>4} {'flows':>6} {'done':>6} {'mean_fct_us':>12} "
          f"{'p99_fct_us':>11} {'drops':>8} {'ooo%':>6} {'completed':>9}")
    for r in rows:
        mean_us = f"{r[4] / 1000.0:.1f}" if r[4] is not None else "-"
        p99_us = f"{r[5] / 1000.0:.1f}" if r[5] is not None else "-"
        print(f"{r[0]:<10} {r[1]:>4} {r[2]:>6} {r[3]:>6} {mean_us:>12} "
              f"{p99_us:>11} {r[6]:>8} {r[7]:>6.2f} {str(r[8]):>9}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ldnsim")
    sub = ap.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("topo", help="build a topology and export it as JSON")
    _add_topo_args(sp)
    sp.add_argument("--out", help="output JSON path (stdout when omitted)")
    sp.set_defaults(fn=cmd_topo)

    sp = sub.add_parser("paths", help="inspect bounded paths and the memory model")
    psub = sp.add_subparsers(dest="paths_cmd", required=True)
    spe = psub.add_parser("enumerate", help="print paths between two switches")
    _add_topo_args(spe)
    spe.add_argument("--src", type=int, required=True)
    spe.add_argument("--dst", type=int, required=True)
    spe.set_defaults(fn=cmd_paths_enumerate)
    spm = psub.add_parser("memory", help="endpoint-table memory model as CSV")
    spm.add_argument("--endpoints", type=int, required=True)
    spm.add_argument("--df-paths", type=int, default=200,
                     help="paths per destination assumed for dragonfly")
    spm.add_argument("--sf-paths", type=int, default=1771,
                     help="paths per destination assumed for slimfly")
    spm.set_defaults(fn=cmd_paths_memory)

    sp = sub.add_parser("run", help="run one experiment")
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--scheme", choices=SCHEMES)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out", help="output directory")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                    help="override a config field, e.g. workload.kind=adversarial")
    sp.add_argument("--export-workload", help="dump the generated FlowSpecs as JSON")
    sp.set_defaults(fn=cmd_run)

    sp = sub.add_parser("sweep", help="run a scheme x seed matrix")
    sp.add_argument("--config", help="JSON config file")
    sp.add_argument("--schemes", required=True, help="comma-separated scheme list")
    sp.add_argument("--seeds", help="comma-separated seed list")
    sp.add_argument("--out", help="output root directory")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("report", help="print a summary table for finished runs")
    sp.add_argument("runs", nargs="+", help="run output directories")
    sp.set_defaults(fn=cmd_report)
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (LdnsimError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
