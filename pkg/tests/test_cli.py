import json
import os

import pytest

from ldnsim.cli import main


def run_cli(args):
    return main(args)


class TestTopo:
    def test_writes_json(self, tmp_path, capsys):
        out = tmp_path / "topo.json"
        assert run_cli(["topo", "--kind", "dragonfly", "--p", "4", "--a", "8",
                        "--h", "4", "--out", str(out)]) == 0
        doc = json.loads(out.read_text())
        assert doc["nodes"]["switches"] == 264
        assert doc["nodes"]["endpoints"] == 1056

    def test_slimfly_stdout(self, capsys):
        assert run_cli(["topo", "--kind", "slimfly", "--q", "5", "--p", "1"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["nodes"]["switches"] == 50


class TestPaths:
    def test_enumerate_prints_paths(self, capsys):
        assert run_cli(["paths", "enumerate", "--kind", "dragonfly", "--p", "2",
                        "--a", "4", "--h", "2", "--src", "0", "--dst", "30"]) == 0
        out = capsys.readouterr().out
        assert "paths 0 -> 30" in out
        assert "ns" not in out.splitlines()[0] or out  # header present
        assert len(out.splitlines()) > 3

    def test_memory_csv(self, capsys):
        assert run_cli(["paths", "memory", "--endpoints", "40000"]) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0] == "family,endpoints,bytes"
        rows = [l.split(",") for l in lines[1:]]
        df40k = next(r for r in rows if r[0] == "dragonfly" and r[1] == "40000")
        assert float(df40k[2]) == pytest.approx(2.3 * 2**20, rel=0.1)


class TestRun:
    def test_run_and_report(self, tmp_path, capsys):
        out = tmp_path / "run1"
        rc = run_cli(["run", "--scheme", "spray_w", "--seed", "3",
                      "--out", str(out),
                      "--set", "topology.p=2", "--set", "topology.a=4",
                      "--set", "topology.h=2",
                      "--set", "workload.flow_bytes=131072"])
        assert rc == 0
        assert (out / "flows.csv").exists()
        assert (out / "summary.json").exists()
        capsys.readouterr()
        assert run_cli(["report", str(out)]) == 0
        table = capsys.readouterr().out
        assert "spray_w" in table

    def test_export_workload(self, tmp_path):
        out = tmp_path / "run2"
        wl = tmp_path / "wl.json"
        rc = run_cli(["run", "--scheme", "ecmp", "--out", str(out),
                      "--set", "topology.p=2", "--set", "topology.a=4",
                      "--set", "topology.h=2",
                      "--set", "workload.flow_bytes=65536",
                      "--export-workload", str(wl)])
        assert rc == 0
        doc = json.loads(wl.read_text())
        assert len(doc) == 72
        # replay produces the same flow set
        out2 = tmp_path / "run3"
        rc = run_cli(["run", "--scheme", "ecmp", "--out", str(out2),
                      "--set", "topology.p=2", "--set", "topology.a=4",
                      "--set", "topology.h=2",
                      "--set", "workload.kind=replay",
                      "--set", f"workload.file={wl}"])
        assert rc == 0

    def test_config_error_exit_code_one(self, tmp_path, capsys):
        assert run_cli(["run", "--set", "scheme=warp_drive"]) == 1
        assert run_cli(["run", "--set", "no_such_key=1"]) == 1
        bad = tmp_path / "bad.json"
        bad.write_text('{"workload": {"kind": "unknown"}}')
        assert run_cli(["run", "--config", str(bad)]) == 1

    def test_runtime_error_exit_code_two(self, tmp_path):
        missing = tmp_path / "missing.json"
        assert run_cli(["run", "--set", "workload.kind=replay",
                        "--set", f"workload.file={missing}"]) == 2


class TestSweep:
    def test_matrix(self, tmp_path, capsys):
        rc = run_cli(["sweep", "--schemes", "minimal,spray_w", "--seeds", "1,2",
                      "--out", str(tmp_path / "sw"),
                      "--set", "topology.p=2", "--set", "topology.a=4",
                      "--set", "topology.h=2",
                      "--set", "workload.flow_bytes=65536"])
        assert rc == 0
        cells = sorted(os.listdir(tmp_path / "sw"))
        assert cells == ["minimal-s1", "minimal-s2", "spray_w-s1", "spray_w-s2"]
        for c in cells:
            assert (tmp_path / "sw" / c / "summary.json").exists()

    def test_empty_schemes_rejected(self):
        assert run_cli(["sweep", "--schemes", "bogus"]) == 1
