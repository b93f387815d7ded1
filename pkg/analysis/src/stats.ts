export function mean(values: number[]): number {
  if (values.length === 0) return NaN;
  return values.reduce((a, b) => a + b, 0) / values.length;
}

/** Nearest-rank percentile, matching the simulator's summary definition. */
export function percentile(values: number[], p: number): number {
  if (values.length === 0) return NaN;
  const sorted = [...values].sort((a, b) => a - b);
  if (p <= 0) return sorted[0];
  const rank = Math.ceil((p / 100) * sorted.length);
  return sorted[Math.min(sorted.length, rank) - 1];
}

export function cdfPoints(values: number[]): { x: number; y: number }[] {
  const sorted = [...values].sort((a, b) => a - b);
  return sorted.map((x, i) => ({ x, y: ((i + 1) / sorted.length) * 100 }));
}

/**
 * Gaussian kernel density over a fixed grid; returns normalized widths in
 * [0, 1] for violin outlines. Bandwidth: Silverman's rule with a floor so
 * near-constant samples still draw a sliver.
 */
export function kde(values: number[], gridSize = 64): { at: number; w: number }[] {
  if (values.length === 0) return [];
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || Math.abs(hi) * 0.01 || 1;
  const m = mean(values);
  const sd = Math.sqrt(mean(values.map((v) => (v - m) ** 2)));
  const bw = Math.max(1.06 * (sd || span / 4) * Math.pow(values.length, -0.2), span / 50);
  const pad = 2 * bw;
  const out: { at: number; w: number }[] = [];
  let peak = 0;
  for (let i = 0; i < gridSize; i++) {
    const at = lo - pad + ((hi - lo + 2 * pad) * i) / (gridSize - 1);
    let density = 0;
    for (const v of values) {
      const z = (at - v) / bw;
      density += Math.exp(-0.5 * z * z);
    }
    peak = Math.max(peak, density);
    out.push({ at, w: density });
  }
  for (const pt of out) pt.w = peak > 0 ? pt.w / peak : 0;
  return out;
}
