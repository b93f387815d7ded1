import * as fs from "node:fs";
import * as path from "node:path";
import { FlowRow, Run, RunSet, RunSummary, SUPPORTED_SCHEMA } from "./types.js";

const NUMERIC_COLUMNS = new Set([
  "flow_id", "src", "dst", "bytes", "start_ns", "end_ns", "fct_ns",
  "packets_sent", "retransmissions", "ooo_packets", "received_packets",
  "acks", "ecn_acks", "nacks", "timeouts", "drops_queue", "drops_trim",
  "drops_failed_link",
]);

/** flows.csv is plain comma-separated with a fixed documented header; empty
 * cells mean null (flows that never finished). */
export function parseFlowsCsv(text: string): FlowRow[] {
  const lines = text.split("\n").filter((l) => l.length > 0);
  if (lines.length === 0) throw new Error("empty flows.csv");
  const header = lines[0].split(",");
  const rows: FlowRow[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new Error(`flows.csv row has ${cells.length} cells, expected ${header.length}`);
    }
    const row: Record<string, unknown> = {};
    header.forEach((col, i) => {
      const cell = cells[i];
      if (col === "completed") {
        row[col] = cell === "1";
      } else if (NUMERIC_COLUMNS.has(col)) {
        row[col] = cell === "" ? null : Number(cell);
      } else {
        row[col] = cell;
      }
    });
    rows.push(row as unknown as FlowRow);
  }
  return rows;
}

export function loadRun(dir: string): Run {
  const summaryPath = path.join(dir, "summary.json");
  const flowsPath = path.join(dir, "flows.csv");
  const summary = JSON.parse(fs.readFileSync(summaryPath, "utf8")) as RunSummary;
  if (summary.schema_version !== SUPPORTED_SCHEMA) {
    throw new Error(
      `${summaryPath}: schema_version ${summary.schema_version} unsupported ` +
      `(expected ${SUPPORTED_SCHEMA})`,
    );
  }
  const flows = parseFlowsCsv(fs.readFileSync(flowsPath, "utf8"));
  return { dir, label: summary.scheme, summary, flows };
}

/** Load several run directories. Comparisons only make sense on one network,
 * so mixed topology digests are rejected unless allowMixedTopologies. */
export function loadRunSet(dirs: string[], allowMixedTopologies = false): RunSet {
  if (dirs.length === 0) throw new Error("no run directories given");
  const runs = dirs.map(loadRun);
  const digests = new Set(runs.map((r) => r.summary.topology_digest));
  if (!allowMixedTopologies && digests.size > 1) {
    throw new Error(
      `runs span ${digests.size} different topologies; ` +
      "a comparison needs identical networks",
    );
  }
  return runs;
}

export function topologyLabel(run: Run): string {
  const t = run.summary.config.topology;
  return t.kind === "dragonfly"
    ? `dragonfly p=${t.p} a=${t.a} h=${t.h}`
    : `slimfly q=${t.q} p=${t.p}`;
}
