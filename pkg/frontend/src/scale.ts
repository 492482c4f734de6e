/** Affine map from data space to pixel space: px = a * x + b. */
export interface LinearScale {
  a: number;
  b: number;
}

/** Map [d0, d1] onto [r0, r1]; a degenerate domain is widened symmetrically. */
export function linearScale(d0: number, d1: number, r0: number, r1: number): LinearScale {
  if (d1 === d0) {
    const pad = d0 === 0 ? 1 : Math.abs(d0) * 0.5;
    d0 -= pad;
    d1 += pad;
  }
  const a = (r1 - r0) / (d1 - d0);
  return { a, b: r0 - a * d0 };
}

export function apply(s: LinearScale, x: number): number {
  return s.a * x + s.b;
}

/**
 * Tick positions on the 1-2-5 ladder covering [lo, hi].
 *
 * Pure function of its arguments, so rerenders place ticks identically.
 */
export function niceTicks(lo: number, hi: number, target = 6): number[] {
  if (!(hi > lo)) return [lo];
  const rawStep = (hi - lo) / Math.max(1, target);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  let step = mag * 10;
  for (const m of [1, 2, 5]) {
    if (mag * m >= rawStep) {
      step = mag * m;
      break;
    }
  }
  const ticks: number[] = [];
  const first = Math.ceil(lo / step);
  const last = Math.floor(hi / step);
  for (let k = first; k <= last; k++) {
    // snap to the grid to avoid 0.30000000000000004-style labels
    ticks.push(Number((k * step).toPrecision(12)));
  }
  return ticks;
}

/** Short deterministic tick label: shortest round-trip of a 6-digit rounding. */
export function fmtTick(v: number): string {
  if (v === 0) return "0";
  return String(Number(v.toPrecision(6)));
}
