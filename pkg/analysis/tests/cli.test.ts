import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";
import { describe, expect, it } from "vitest";
import { main, parseArgs } from "../src/cli.js";

const FIX = path.join(__dirname, "fixtures");
const DF_RUNS = ["ugal_l-s1", "ops_u-s1", "spray_w-s1"].map((d) => path.join(FIX, d));

function tmpFile(name: string): string {
  return path.join(fs.mkdtempSync(path.join(os.tmpdir(), "analysis-")), name);
}

describe("parseArgs", () => {
  it("parses the documented surface", () => {
    const a = parseArgs(["analyze", "--runs", "a", "b", "--figure", "speedup",
                         "--out", "x.csv", "--baseline", "ugal_l",
                         "--metric", "monitored"]);
    expect(a.runs).toEqual(["a", "b"]);
    expect(a.figure).toBe("speedup");
    expect(a.metric).toBe("monitored");
  });
  it("rejects unknown figures and flags", () => {
    expect(() => parseArgs(["analyze", "--runs", "a", "--figure", "pie"])).toThrow();
    expect(() => parseArgs(["analyze", "--runs", "a", "--wat"])).toThrow();
    expect(() => parseArgs(["paint"])).toThrow();
  });
});

describe("main", () => {
  it("renders an fct violin from a 3-scheme sweep", () => {
    const out = tmpFile("fct.svg");
    const rc = main(["analyze", "--runs", ...DF_RUNS, "--figure", "fct",
                     "--out", out]);
    expect(rc).toBe(0);
    const svg = fs.readFileSync(out, "utf8");
    expect(svg).toContain("<svg");
    expect(svg).toContain("spray_w");
    // raster twin is written next to the vector file by default
    const png = fs.readFileSync(out.slice(0, -4) + ".png");
    expect(png.subarray(1, 4).toString()).toBe("PNG");
  });

  it("--no-raster skips the png", () => {
    const out = tmpFile("only.svg");
    expect(main(["analyze", "--runs", ...DF_RUNS, "--figure", "fct",
                 "--out", out, "--no-raster"])).toBe(0);
    expect(fs.existsSync(out.slice(0, -4) + ".png")).toBe(false);
  });

  it("renders the bars figure", () => {
    const out = tmpFile("bars.svg");
    expect(main(["analyze", "--runs", ...DF_RUNS, "--figure", "bars",
                 "--out", out])).toBe(0);
    expect(fs.existsSync(out)).toBe(true);
  });

  it("writes a speedup csv with baseline ratio 1.0", () => {
    const out = tmpFile("speed.csv");
    const rc = main(["analyze", "--runs", ...DF_RUNS, "--figure", "speedup",
                     "--baseline", "ugal_l", "--out", out]);
    expect(rc).toBe(0);
    const rows = fs.readFileSync(out, "utf8").trim().split("\n").slice(1)
      .map((l) => l.split(","));
    const base = rows.find((r) => r[0] === "ugal_l")!;
    expect(Number(base[2])).toBe(1.0);
  });

  it("usage errors exit 1, runtime errors exit 2", () => {
    expect(main(["analyze"])).toBe(1);
    expect(main(["analyze", "--runs", "/nonexistent", "--figure", "fct",
                 "--out", tmpFile("x.svg")])).toBe(2);
  });

  it("refuses non-svg figure outputs", () => {
    expect(main(["analyze", "--runs", ...DF_RUNS, "--figure", "fct",
                 "--out", tmpFile("fig.png")])).toBe(2);
  });
});
