import * as path from "node:path";
import { describe, expect, it } from "vitest";
import { loadRunSet } from "../src/load.js";
import {
  barsFigure, fctFigure, renderSpeedupCsv, renderSpeedupText, speedupTable,
} from "../src/figures.js";

const FIX = path.join(__dirname, "fixtures");
const DF_RUNS = ["ugal_l-s1", "ops_u-s1", "spray_w-s1"].map((d) => path.join(FIX, d));
const SF_RUN = path.join(FIX, "sf-spray_w-s1");

const runs = () => loadRunSet(DF_RUNS);

describe("fctFigure", () => {
  it("renders a violin panel with one shape per scheme", () => {
    const svg = fctFigure(runs(), { style: "violin" });
    expect(svg).toContain("<svg");
    expect((svg.match(/<polygon/g) ?? []).length).toBe(3);
    for (const scheme of ["ugal_l", "ops_u", "spray_w"]) {
      expect(svg).toContain(`>${scheme}</text>`);
    }
    expect(svg).toContain("FCT [us]");
  });

  it("renders CDF lines", () => {
    const svg = fctFigure(runs(), { style: "cdf" });
    expect((svg.match(/<polyline/g) ?? []).length).toBe(3);
    expect(svg).toContain("CDF [%]");
  });

  it("tag filter adds retransmission bars", () => {
    const svg = fctFigure(runs(), { style: "violin", tag: "background" });
    expect(svg).toContain("retrans.");
    expect(svg).toContain("(background)");
  });

  it("one panel per topology", () => {
    const mixed = loadRunSet([DF_RUNS[0], SF_RUN], true);
    const svg = fctFigure(mixed, { style: "violin" });
    expect(svg).toContain("dragonfly p=2 a=4 h=2");
    expect(svg).toContain("slimfly q=5 p=1");
  });

  it("fails cleanly when the tag matches nothing", () => {
    expect(() => fctFigure(runs(), { tag: "nonsense" })).toThrow(/no completed flows/);
  });

  it("is deterministic", () => {
    expect(fctFigure(runs())).toBe(fctFigure(runs()));
  });
});

describe("barsFigure", () => {
  it("renders drop bars and an OOO axis", () => {
    const svg = barsFigure(runs());
    expect(svg).toContain("OOO [%]");
    expect(svg).toContain("queue_drop");
    expect(svg).toContain("failed_link");
  });
});

describe("speedupTable", () => {
  it("baseline vs itself is exactly 1.0", () => {
    const rows = speedupTable(runs(), "ugal_l", "mean");
    const base = rows.find((r) => r.scheme === "ugal_l")!;
    expect(base.speedup).toBe(1.0);
  });

  it("monitored metric uses only the monitored flow", () => {
    const rows = speedupTable(runs(), "ugal_l", "monitored");
    expect(rows).toHaveLength(3);
    for (const row of rows) {
      expect(row.value_us).toBeGreaterThan(0);
      expect(Number.isFinite(row.speedup)).toBe(true);
    }
  });

  it("missing baseline is an error", () => {
    expect(() => speedupTable(runs(), "scout", "mean")).toThrow(/baseline/);
  });

  it("renders text and csv", () => {
    const rows = speedupTable(runs(), "ugal_l", "p99");
    const text = renderSpeedupText(rows, "ugal_l", "p99");
    expect(text).toContain("speedup vs ugal_l (p99 FCT)");
    expect(text).toContain("1.00x");
    const csv = renderSpeedupCsv(rows);
    expect(csv.split("\n")[0]).toBe("scheme,fct_us,speedup");
    expect(csv.split("\n").filter((l) => l.length > 0)).toHaveLength(4);
  });
});
