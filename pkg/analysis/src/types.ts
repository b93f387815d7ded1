export interface FlowRow {
  flow_id: number;
  tag: string;
  scheme: string;
  src: number;
  dst: number;
  bytes: number;
  start_ns: number;
  end_ns: number | null;
  fct_ns: number | null;
  completed: boolean;
  packets_sent: number;
  retransmissions: number;
  ooo_packets: number;
  received_packets: number;
  acks: number;
  ecn_acks: number;
  nacks: number;
  timeouts: number;
  drops_queue: number;
  drops_trim: number;
  drops_failed_link: number;
}

export interface RunSummary {
  schema_version: number;
  scheme: string;
  seed: number;
  topology_digest: string;
  completed: boolean;
  flows: number;
  flows_completed: number;
  fct: {
    count: number;
    mean_ns: number | null;
    p50_ns: number | null;
    p99_ns: number | null;
    max_ns: number | null;
  };
  by_tag: Record<
    string,
    {
      flows: number;
      completed: number;
      fct: { count: number; mean_ns: number | null; p99_ns: number | null };
      retransmissions: number;
      ooo_packets: number;
    }
  >;
  drops: { queue_drop: number; trim: number; failed_link: number };
  ooo_percent: number;
  config: { topology: { kind: string; p: number; a: number; h: number; q: number } };
}

export interface Run {
  dir: string;
  label: string; // scheme name from the summary
  summary: RunSummary;
  flows: FlowRow[];
}

export type RunSet = Run[];

export const SUPPORTED_SCHEMA = 1;

/** Fixed scheme order and palette so colors stay stable across figures. */
export const SCHEME_ORDER = [
  "minimal",
  "valiant",
  "ugal_l",
  "ecmp",
  "flicr",
  "ops_u",
  "ops_w",
  "scout",
  "spray_u",
  "spray_w",
];

export const SCHEME_COLORS: Record<string, string> = {
  minimal: "#7f7f7f",
  valiant: "#8c564b",
  ugal_l: "#9467bd",
  ecmp: "#e377c2",
  flicr: "#bcbd22",
  ops_u: "#17becf",
  ops_w: "#1f77b4",
  scout: "#d62728",
  spray_u: "#ff7f0e",
  spray_w: "#2ca02c",
};

export function schemeColor(scheme: string): string {
  return SCHEME_COLORS[scheme] ?? "#333333";
}

export function orderRuns(runs: RunSet): RunSet {
  return [...runs].sort((a, b) => {
    const ia = SCHEME_ORDER.indexOf(a.label);
    const ib = SCHEME_ORDER.indexOf(b.label);
    if (ia !== ib) return (ia < 0 ? 99 : ia) - (ib < 0 ? 99 : ib);
    return a.summary.seed - b.summary.seed;
  });
}
