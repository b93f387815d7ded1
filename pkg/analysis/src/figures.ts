import { cdfPoints, kde, mean, percentile } from "./stats.js";
import { Svg, niceTicks, scale } from "./svg.js";
import { topologyLabel } from "./load.js";
import { Run, RunSet, orderRuns, schemeColor } from "./types.js";

const US = 1000; // ns per microsecond

export interface FctOptions {
  style?: "violin" | "cdf";
  tag?: string; // restrict to one flow tag (e.g. bystander, monitored)
  completedOnly?: boolean;
}

function fctsUs(run: Run, tag?: string): number[] {
  return run.flows
    .filter((f) => f.completed && f.fct_ns !== null && (!tag || f.tag === tag))
    .map((f) => (f.fct_ns as number) / US);
}

function groupByTopology(runs: RunSet): Map<string, RunSet> {
  const panels = new Map<string, RunSet>();
  for (const run of runs) {
    const key = topologyLabel(run);
    if (!panels.has(key)) panels.set(key, []);
    panels.get(key)!.push(run);
  }
  return panels;
}

/** FCT distributions, one panel per topology, schemes side by side.
 * Violin panels for a bystander tag also carry per-scheme retransmission
 * bars under the violins. */
export function fctFigure(runs: RunSet, opts: FctOptions = {}): string {
  const style = opts.style ?? "violin";
  const panels = [...groupByTopology(orderRuns(runs)).entries()];
  const panelW = 120 + 70 * Math.max(...panels.map(([, rs]) => rs.length), 3);
  const withBars = style === "violin" && opts.tag !== undefined;
  const panelH = withBars ? 420 : 340;
  const svg = new Svg(panelW * panels.length, panelH);
  panels.forEach(([label, panelRuns], i) => {
    const x0 = i * panelW;
    if (style === "violin") {
      drawViolinPanel(svg, panelRuns, x0, panelW, panelH, label, opts, withBars);
    } else {
      drawCdfPanel(svg, panelRuns, x0, panelW, panelH, label, opts);
    }
  });
  return svg.render();
}

function drawViolinPanel(svg: Svg, runs: RunSet, x0: number, w: number, h: number,
                         title: string, opts: FctOptions, withBars: boolean): void {
  const plotTop = 34;
  const plotBottom = withBars ? h - 150 : h - 60;
  const plotLeft = x0 + 64;
  const plotRight = x0 + w - 16;
  const series = runs.map((r) => ({ run: r, fcts: fctsUs(r, opts.tag) }));
  const all = series.flatMap((s) => s.fcts);
  if (all.length === 0) throw new Error(`no completed flows to plot (tag=${opts.tag ?? "any"})`);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const y = scale(lo, hi, plotBottom, plotTop);
  const suffix = opts.tag ? ` (${opts.tag})` : "";
  svg.text((plotLeft + plotRight) / 2, 16, `${title}${suffix}`, { size: 13 });
  svg.text(x0 + 16, (plotTop + plotBottom) / 2, "FCT [us]",
           { rotate: -90, size: 11 });
  for (const t of niceTicks(lo, hi)) {
    svg.line(plotLeft - 4, y(t), plotRight, y(t), "#ddd", 0.6);
    svg.text(plotLeft - 8, y(t) + 3, fmt(t), { anchor: "end", size: 9 });
  }
  const slot = (plotRight - plotLeft) / series.length;
  const half = Math.min(26, slot * 0.4);
  series.forEach((s, i) => {
    const cx = plotLeft + slot * (i + 0.5);
    const color = schemeColor(s.run.label);
    if (s.fcts.length > 0) {
      const dens = kde(s.fcts);
      const right = dens.map((d) => [cx + d.w * half, y(d.at)] as [number, number]);
      const left = dens.map((d) => [cx - d.w * half, y(d.at)] as [number, number]).reverse();
      svg.polygon(right.concat(left), color);
      const med = percentile(s.fcts, 50);
      svg.line(cx - half, y(med), cx + half, y(med), "#111", 1.2);
    }
    svg.text(cx, plotBottom + 14, s.run.label, { size: 10, rotate: 35 });
  });
  if (withBars) {
    const barTop = plotBottom + 46;
    const barBottom = h - 26;
    const retr = series.map((s) =>
      s.run.flows.filter((f) => !opts.tag || f.tag === opts.tag)
        .reduce((acc, f) => acc + f.retransmissions, 0));
    const peak = Math.max(...retr, 1);
    const by = scale(0, peak, barBottom, barTop);
    svg.text(x0 + 16, (barTop + barBottom) / 2, "retrans.", { rotate: -90, size: 10 });
    svg.text(plotLeft - 8, by(peak) + 3, fmt(peak), { anchor: "end", size: 9 });
    svg.text(plotLeft - 8, by(0) + 3, "0", { anchor: "end", size: 9 });
    series.forEach((s, i) => {
      const cx = plotLeft + slot * (i + 0.5);
      svg.rect(cx - half * 0.6, by(retr[i]), half * 1.2, barBottom - by(retr[i]),
               schemeColor(s.run.label));
    });
  }
}

function drawCdfPanel(svg: Svg, runs: RunSet, x0: number, w: number, h: number,
                      title: string, opts: FctOptions): void {
  const plotTop = 34;
  const plotBottom = h - 60;
  const plotLeft = x0 + 64;
  const plotRight = x0 + w - 16;
  const series = runs.map((r) => ({ run: r, fcts: fctsUs(r, opts.tag) }));
  const all = series.flatMap((s) => s.fcts);
  if (all.length === 0) throw new Error(`no completed flows to plot (tag=${opts.tag ?? "any"})`);
  const lo = Math.min(...all);
  const hi = Math.max(...all);
  const x = scale(lo, hi, plotLeft, plotRight);
  const y = scale(0, 100, plotBottom, plotTop);
  svg.text((plotLeft + plotRight) / 2, 16, title, { size: 13 });
  svg.text((plotLeft + plotRight) / 2, h - 12, "FCT [us]", { size: 11 });
  svg.text(x0 + 16, (plotTop + plotBottom) / 2, "CDF [%]", { rotate: -90, size: 11 });
  for (const t of niceTicks(lo, hi)) {
    svg.text(x(t), plotBottom + 14, fmt(t), { size: 9 });
    svg.line(x(t), plotBottom, x(t), plotBottom + 4, "#444", 1);
  }
  for (const t of [0, 25, 50, 75, 100]) {
    svg.line(plotLeft, y(t), plotRight, y(t), "#ddd", 0.6);
    svg.text(plotLeft - 8, y(t) + 3, `${t}`, { anchor: "end", size: 9 });
  }
  series.forEach((s, i) => {
    if (s.fcts.length === 0) return;
    const pts = cdfPoints(s.fcts).map((p) => [x(p.x), y(p.y)] as [number, number]);
    svg.polyline(pts, schemeColor(s.run.label));
    svg.text(plotRight - 6, plotTop + 12 + i * 12, s.run.label,
             { anchor: "end", size: 10, fill: schemeColor(s.run.label) });
  });
}

/** Drops by cause plus out-of-order percentage, one bar group per scheme. */
export function barsFigure(runs: RunSet): string {
  const ordered = orderRuns(runs);
  const w = 140 + 90 * ordered.length;
  const h = 320;
  const svg = new Svg(w, h);
  const plotTop = 40;
  const plotBottom = h - 60;
  const plotLeft = 70;
  const plotRight = w - 70;
  const causes: ["queue_drop" | "trim" | "failed_link", string][] = [
    ["queue_drop", "#d62728"], ["trim", "#ff7f0e"], ["failed_link", "#7f7f7f"]];
  const totals = ordered.map((r) =>
    causes.reduce((acc, [c]) => acc + r.summary.drops[c], 0));
  const peak = Math.max(...totals, 1);
  const y = scale(0, peak, plotBottom, plotTop);
  const oooPeak = Math.max(...ordered.map((r) => r.summary.ooo_percent), 1);
  const oy = scale(0, oooPeak, plotBottom, plotTop);
  svg.text(w / 2, 16, "dropped packets by cause (bars) and OOO% (dots)", { size: 13 });
  svg.text(18, (plotTop + plotBottom) / 2, "drops", { rotate: -90, size: 11 });
  svg.text(w - 14, (plotTop + plotBottom) / 2, "OOO [%]", { rotate: 90, size: 11 });
  for (const t of niceTicks(0, peak, 4)) {
    svg.line(plotLeft - 4, y(t), plotRight, y(t), "#ddd", 0.6);
    svg.text(plotLeft - 8, y(t) + 3, fmt(t), { anchor: "end", size: 9 });
  }
  svg.text(plotRight + 24, oy(oooPeak) + 3, fmt(oooPeak), { size: 9 });
  svg.text(plotRight + 24, oy(0) + 3, "0", { size: 9 });
  const slot = (plotRight - plotLeft) / ordered.length;
  ordered.forEach((run, i) => {
    const cx = plotLeft + slot * (i + 0.5);
    let base = plotBottom;
    for (const [cause, color] of causes) {
      const v = run.summary.drops[cause];
      const hgt = plotBottom - y(v);
      if (hgt > 0) svg.rect(cx - 18, base - hgt, 36, hgt, color);
      base -= hgt;
    }
    svg.rect(cx - 3, oy(run.summary.ooo_percent) - 3, 6, 6, "#1f77b4");
    svg.text(cx, plotBottom + 14, run.label, { size: 10, rotate: 35 });
  });
  causes.forEach(([cause, color], i) => {
    svg.rect(plotLeft + i * 110, h - 18, 10, 10, color);
    svg.text(plotLeft + i * 110 + 16, h - 9, cause, { anchor: "start", size: 10 });
  });
  return svg.render();
}

export type SpeedupMetric = "mean" | "p99" | "monitored";

export interface SpeedupRow {
  scheme: string;
  value_us: number;
  speedup: number;
}

/** Ratios baseline/scheme on a chosen FCT metric (Table-style). */
export function speedupTable(runs: RunSet, baseline: string,
                             metric: SpeedupMetric = "mean"): SpeedupRow[] {
  const ordered = orderRuns(runs);
  const values = new Map<string, number>();
  for (const run of ordered) {
    values.set(run.label, metricValue(run, metric));
  }
  const base = values.get(baseline);
  if (base === undefined) {
    throw new Error(`baseline scheme "${baseline}" not present in the run set`);
  }
  return ordered.map((run) => {
    const v = values.get(run.label)!;
    return { scheme: run.label, value_us: v, speedup: base / v };
  });
}

function metricValue(run: Run, metric: SpeedupMetric): number {
  if (metric === "monitored") {
    const fcts = fctsUs(run, "monitored");
    if (fcts.length === 0) throw new Error(`${run.dir}: no monitored flows`);
    return mean(fcts);
  }
  const fcts = fctsUs(run);
  if (fcts.length === 0) throw new Error(`${run.dir}: no completed flows`);
  return metric === "p99" ? percentile(fcts, 99) : mean(fcts);
}

export function renderSpeedupText(rows: SpeedupRow[], baseline: string,
                                  metric: SpeedupMetric): string {
  const lines = [
    `speedup vs ${baseline} (${metric} FCT)`,
    `${"scheme".padEnd(10)} ${"fct_us".padStart(10)} ${"speedup".padStart(8)}`,
  ];
  for (const row of rows) {
    lines.push(
      `${row.scheme.padEnd(10)} ${row.value_us.toFixed(1).padStart(10)} ` +
      `${row.speedup.toFixed(2).padStart(7)}x`,
    );
  }
  return lines.join("\n") + "\n";
}

export function renderSpeedupCsv(rows: SpeedupRow[]): string {
  const lines = ["scheme,fct_us,speedup"];
  for (const row of rows) {
    lines.push(`${row.scheme},${row.value_us},${row.speedup}`);
  }
  return lines.join("\n") + "\n";
}

function fmt(v: number): string {
  if (v >= 10000) return v.toExponential(1);
  if (Number.isInteger(v)) return v.toString();
  return v.toFixed(v < 10 ? 1 : 0);
}
