#!/usr/bin/env node
/**
 * analyze --runs DIR... --figure fct|bars|speedup --out FILE
 *
 * fct:     FCT distribution panels (violin by default, --style cdf for CDFs);
 *          --tag bystander adds retransmission bars under the violins.
 * bars:    drops-by-cause bars plus OOO% markers per scheme.
 * speedup: table of baseline/scheme FCT ratios (--baseline, --metric),
 *          printed to stdout and written as CSV to --out.
 */

import * as fs from "node:fs";
import * as path from "node:path";
import { Resvg } from "@resvg/resvg-js";
import { loadRunSet } from "./load.js";
import {
  FctOptions, SpeedupMetric, barsFigure, fctFigure, renderSpeedupCsv,
  renderSpeedupText, speedupTable,
} from "./figures.js";

interface Args {
  cmd: string;
  runs: string[];
  figure: string;
  out: string | null;
  style: "violin" | "cdf";
  tag?: string;
  baseline: string;
  metric: SpeedupMetric;
  allowMixed: boolean;
  raster: boolean;
}

export function parseArgs(argv: string[]): Args {
  const args: Args = {
    cmd: "", runs: [], figure: "fct", out: null, style: "violin",
    baseline: "ugal_l", metric: "mean", allowMixed: false, raster: true,
  };
  let i = 0;
  if (argv.length === 0) throw new Error("usage: analyze --runs DIR... --figure fct|bars|speedup --out FILE");
  args.cmd = argv[i++];
  if (args.cmd !== "analyze") throw new Error(`unknown command "${args.cmd}"`);
  while (i < argv.length) {
    const flag = argv[i++];
    switch (flag) {
      case "--runs":
        while (i < argv.length && !argv[i].startsWith("--")) args.runs.push(argv[i++]);
        break;
      case "--figure":
        args.figure = argv[i++];
        break;
      case "--out":
        args.out = argv[i++];
        break;
      case "--style":
        args.style = argv[i++] as Args["style"];
        if (args.style !== "violin" && args.style !== "cdf") {
          throw new Error(`--style must be violin or cdf`);
        }
        break;
      case "--tag":
        args.tag = argv[i++];
        break;
      case "--baseline":
        args.baseline = argv[i++];
        break;
      case "--metric":
        args.metric = argv[i++] as SpeedupMetric;
        if (!["mean", "p99", "monitored"].includes(args.metric)) {
          throw new Error("--metric must be mean, p99 or monitored");
        }
        break;
      case "--allow-mixed-topologies":
        args.allowMixed = true;
        break;
      case "--no-raster":
        args.raster = false;
        break;
      default:
        throw new Error(`unknown flag "${flag}"`);
    }
  }
  if (args.runs.length === 0) throw new Error("--runs requires at least one directory");
  if (!["fct", "bars", "speedup"].includes(args.figure)) {
    throw new Error(`--figure must be fct, bars or speedup (got "${args.figure}")`);
  }
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (e) {
    console.error(`usage error: ${(e as Error).message}`);
    return 1;
  }
  try {
    const runs = loadRunSet(args.runs, args.allowMixed || args.figure === "fct");
    if (args.figure === "speedup") {
      const rows = speedupTable(runs, args.baseline, args.metric);
      process.stdout.write(renderSpeedupText(rows, args.baseline, args.metric));
      if (args.out) {
        fs.writeFileSync(args.out, renderSpeedupCsv(rows));
        console.error(`wrote ${args.out}`);
      }
      return 0;
    }
    const opts: FctOptions = { style: args.style, tag: args.tag };
    const svg = args.figure === "fct" ? fctFigure(runs, opts) : barsFigure(runs);
    const out = args.out ?? `${args.figure}.svg`;
    if (path.extname(out) !== ".svg") {
      throw new Error(`figures are written as SVG; use a .svg output path (got "${out}")`);
    }
    fs.writeFileSync(out, svg);
    console.error(`wrote ${out}`);
    if (args.raster) {
      const png = new Resvg(svg).render().asPng();
      const pngOut = out.slice(0, -4) + ".png";
      fs.writeFileSync(pngOut, png);
      console.error(`wrote ${pngOut}`);
    }
    return 0;
  } catch (e) {
    console.error(`error: ${(e as Error).message}`);
    return 2;
  }
}

const entry = process.argv[1] ? path.resolve(process.argv[1]) : "";
if (entry && import.meta.url === `file://${entry}`) {
  process.exit(main(process.argv.slice(2)));
}
