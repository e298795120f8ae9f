/** Axis scales and tick generation for the hand-built SVG figures. */

export interface Scale {
  (value: number): number;
  readonly domain: [number, number];
  readonly range: [number, number];
  readonly log: boolean;
  readonly ticks: number[];
}

function withMeta(fn: (v: number) => number, domain: [number, number],
                  range: [number, number], log: boolean,
                  ticks: number[]): Scale {
  const scale = fn as Scale;
  Object.assign(scale, { domain, range, log, ticks });
  return scale;
}

/** Round tick positions covering [lo, hi] at a 1/2/5 step. */
export function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step0 = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step0);
  const step = step0 * (err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1);
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

/** Decade ticks covering [lo, hi], padded out to the enclosing decades. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  const first = Math.floor(Math.log10(lo));
  const last = Math.ceil(Math.log10(hi));
  for (let d = first; d <= last; d++) {
    ticks.push(Math.pow(10, d));
  }
  return ticks;
}

export function linearScale(domain: [number, number],
                            range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const slope = d1 === d0 ? 0 : (r1 - r0) / (d1 - d0);
  return withMeta(v => r0 + (v - d0) * slope, domain, range, false,
                  linearTicks(d0, d1));
}

export function logScale(domain: [number, number],
                         range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error(`log scale needs positive bounds, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const [r0, r1] = range;
  const slope = l1 === l0 ? 0 : (r1 - r0) / (l1 - l0);
  return withMeta(v => r0 + (Math.log10(v) - l0) * slope, domain, range,
                  true, logTicks(d0, d1).filter(t => t >= d0 / 1.0001
                                                     && t <= d1 * 1.0001));
}

/** Pad a positive interval multiplicatively (for log axes). */
export function padLog(lo: number, hi: number, factor = 1.4):
    [number, number] {
  return [lo / factor, hi * factor];
}

/** Pad an interval additively by a fraction of its span. */
export function padLinear(lo: number, hi: number, fraction = 0.08):
    [number, number] {
  const span = hi - lo || Math.abs(hi) || 1;
  return [lo - fraction * span, hi + fraction * span];
}

/** Short label for a tick value (decades as powers, else trimmed). */
export function tickLabel(value: number, log: boolean): string {
  if (log) {
    const d = Math.log10(value);
    if (Number.isInteger(d) && (d < -3 || d > 3)) return `1e${d}`;
  }
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-4) return value.toExponential(0);
  return String(parseFloat(value.toPrecision(6)));
}
