/**
 * Figure renderers, one per artifact family.  Each takes parsed CSV rows
 * and returns a complete SVG document as a string.
 *
 * Fitted statistics shown on a figure (the averaging-rate slope, the
 * attractor-scan slope) are quoted verbatim from the producer's summary
 * CSV; this module never fits anything itself, so a figure can never
 * disagree with the numbers the simulation side reported.
 */

import { EquilibriumRow, ModeRow, Ode3Row, RateRow, ScanRow, SchemaError,
         WaveRow, summaryValue } from "./csv.js";
import { linearScale, logScale, padLinear, padLog, Scale } from "./scale.js";
import { drawFrame, PlotArea, SERIES_COLORS, SvgDoc } from "./svg.js";

const WIDTH = 560;
const HEIGHT = 420;
const AREA: PlotArea = { left: 72, top: 40, width: 440, height: 310 };

function newFigure(): { doc: SvgDoc; area: PlotArea } {
  return { doc: new SvgDoc(WIDTH, HEIGHT), area: AREA };
}

function finiteExtent(values: number[], what: string): [number, number] {
  const finite = values.filter(Number.isFinite);
  if (finite.length === 0) {
    throw new SchemaError(`no finite ${what} values to plot`, what);
  }
  return [Math.min(...finite), Math.max(...finite)];
}

/** Averaging error against eps = 1/L on log-log axes with the fitted
 * line and slope annotation taken from the summary CSV. */
export function renderRateFigure(rows: RateRow[],
                                 summary: Map<string, string>,
                                 summaryPath: string): string {
  const slopeRaw = summaryValue(summary, "slope", summaryPath);
  const interceptRaw = summaryValue(summary, "intercept", summaryPath);
  const family = summary.get("family");

  const { doc, area } = newFigure();
  const [e0, e1] = finiteExtent(rows.map(r => r.eps), "eps");
  const [y0, y1] = finiteExtent(rows.map(r => r.err_h1), "err_h1");
  const x = logScale(padLog(e0, e1), [area.left, area.left + area.width]);
  const y = logScale(padLog(y0, y1), [area.top + area.height, area.top]);

  const title = family ? `Averaging error vs eps (${family})`
                       : "Averaging error vs eps";
  drawFrame(doc, area, x, y, "eps = 1/L", "H1 error at T", title);

  // fitted line err = exp(intercept) * eps^slope, from the summary values
  const slope = Number(slopeRaw);
  const intercept = Number(interceptRaw);
  if (Number.isFinite(slope) && Number.isFinite(intercept)) {
    const fit = (eps: number) => Math.exp(intercept) * Math.pow(eps, slope);
    doc.polyline([[x(e0), y(fit(e0))], [x(e1), y(fit(e1))]],
                 "#999", 1.2, "5 4");
  }

  const sorted = [...rows].sort((a, b) => a.eps - b.eps);
  doc.polyline(sorted.map(r => [x(r.eps), y(r.err_h1)]), SERIES_COLORS[0]);
  for (const r of sorted) {
    doc.circle(x(r.eps), y(r.err_h1), 3.5, SERIES_COLORS[0]);
  }

  doc.text(area.left + 12, area.top + 18, `slope = ${slopeRaw}`,
           { size: "12px", bold: true });
  return doc.render();
}

/** Ensemble attractor statistic against L on log-log axes; per-member
 * points, the per-L maxima from the summary, and its fitted slope. */
export function renderScanFigure(rows: ScanRow[],
                                 summary: Map<string, string>,
                                 summaryPath: string): string {
  const slopeRaw = summaryValue(summary, "slope", summaryPath);
  const family = summary.get("family");

  const finiteRows = rows.filter(r => Number.isFinite(r.stat));
  const skipped = rows.length - finiteRows.length;
  const { doc, area } = newFigure();
  const [l0, l1] = finiteExtent(finiteRows.map(r => r.L), "L");
  const [s0, s1] = finiteExtent(finiteRows.map(r => r.stat), "stat");
  const x = logScale(padLog(l0, l1), [area.left, area.left + area.width]);
  const y = logScale(padLog(s0, s1), [area.top + area.height, area.top]);

  const title = family ? `Attractor statistic vs L (${family})`
                       : "Attractor statistic vs L";
  drawFrame(doc, area, x, y, "dispersion L", "time-averaged H norm", title);

  for (const r of finiteRows) {
    doc.circle(x(r.L), y(r.stat), 2.5, "none", SERIES_COLORS[0]);
  }

  // per-L maxima recorded by the producer (max_stat_L=<L> rows)
  const maxima: [number, number][] = [];
  for (const [key, value] of summary) {
    if (key.startsWith("max_stat_L=")) {
      const L = Number(key.slice("max_stat_L=".length));
      const stat = Number(value);
      if (Number.isFinite(L) && Number.isFinite(stat)) {
        maxima.push([L, stat]);
      }
    }
  }
  maxima.sort((a, b) => a[0] - b[0]);
  if (maxima.length > 0) {
    doc.polyline(maxima.map(([L, s]) => [x(L), y(s)]), SERIES_COLORS[1]);
    for (const [L, s] of maxima) {
      doc.circle(x(L), y(s), 3.5, SERIES_COLORS[1]);
    }
  }

  doc.text(area.left + 12, area.top + 18, `slope = ${slopeRaw}`,
           { size: "12px", bold: true });
  if (skipped > 0) {
    doc.text(area.left + 12, area.top + 34,
             `${skipped} blown-up member${skipped > 1 ? "s" : ""} omitted`,
             { fill: "#a33" });
  }
  return doc.render();
}

function evalProfile(modes: ModeRow[], xs: number[]): number[] {
  return xs.map(xv => {
    let acc = 0;
    for (const { n, re, im } of modes) {
      // real part of w_n e^{inx}
      acc += re * Math.cos(n * xv) - im * Math.sin(n * xv);
    }
    return acc;
  });
}

export interface WaveProfile {
  modes: ModeRow[];
  path: string;
}

/** Physical-space traveling-wave profiles, one curve per continuation
 * step, labeled with eps and the computed speed. */
export function renderWaveFigure(waveRows: WaveRow[],
                                 profiles: WaveProfile[]): string {
  if (profiles.length === 0) {
    throw new SchemaError("wave figure needs at least one profile CSV", "n");
  }
  const grid: number[] = [];
  for (let i = 0; i <= 512; i++) {
    grid.push(-Math.PI + (2 * Math.PI * i) / 512);
  }
  const curves = profiles.map(p => evalProfile(p.modes, grid));

  const { doc, area } = newFigure();
  const flat = curves.flat();
  const [u0, u1] = finiteExtent(flat, "profile");
  const x = linearScale([-Math.PI, Math.PI],
                        [area.left, area.left + area.width]);
  const y = linearScale(padLinear(u0, u1), [area.top + area.height, area.top]);
  drawFrame(doc, area, x, y, "x", "u(x)", "Traveling-wave profiles");

  curves.forEach((curve, k) => {
    const color = SERIES_COLORS[k % SERIES_COLORS.length];
    doc.polyline(grid.map((xv, i) => [x(xv), y(curve[i])]), color);
    const wave = waveRows[k];
    const label = wave
      ? `eps = ${shortNumber(wave.eps)}, c = ${shortNumber(wave.c, 6)}`
      : profiles[k].path;
    doc.text(area.left + area.width - 8, area.top + 18 + 16 * k, label,
             { anchor: "end", fill: color });
  });
  return doc.render();
}

function shortNumber(value: number, digits = 6): string {
  return String(parseFloat(value.toPrecision(digits)));
}

function supportLabel(support: string): string {
  return support === "" ? "{}" : `{${support.split("|").join(",")}}`;
}

/** Equilibrium diagram: one marker per modulus pattern at its squared
 * norm; filled when stable, red-ringed when non-hyperbolic. */
export function renderEquilibriaFigure(rows: EquilibriumRow[]): string {
  const { doc, area } = newFigure();
  const [v0, v1] = finiteExtent(rows.map(r => r.norm_sq), "norm_sq");
  const x = linearScale([-0.6, rows.length - 0.4],
                        [area.left, area.left + area.width]);
  const y = linearScale(padLinear(Math.min(v0, 0), v1),
                        [area.top + area.height, area.top]);
  drawFrame(doc, { ...area }, xNoTicks(x), y, "modulus pattern",
            "squared H norm", "Equilibria of the reduced flow");

  rows.forEach((row, k) => {
    const px = x(k);
    const py = y(row.norm_sq);
    const ring = row.hyperbolic ? "#222" : "#d1495b";
    if (row.stable) {
      doc.circle(px, py, 5.5, SERIES_COLORS[2], ring);
    } else {
      doc.circle(px, py, 5.5, "white", ring);
    }
    doc.text(px, area.top + area.height + 16, supportLabel(row.support),
             { anchor: "middle" });
  });

  doc.text(area.left + 12, area.top + 18,
           "filled = stable, open = unstable, red ring = non-hyperbolic");
  return doc.render();
}

/** Drop numeric ticks from a categorical axis but keep its geometry. */
function xNoTicks(x: Scale): Scale {
  const clone = ((v: number) => x(v)) as Scale;
  Object.assign(clone, { domain: x.domain, range: x.range, log: x.log,
                         ticks: [] });
  return clone;
}

function heatColor(value: number, lo: number, hi: number): string {
  if (!Number.isFinite(value)) return "#d8d8d8";
  // diverging around zero: blue for contraction, red for expansion
  if (value < 0) {
    const t = lo < 0 ? value / lo : 0;
    return mix("#ffffff", "#1f6fb4", t);
  }
  const t = hi > 0 ? value / hi : 0;
  return mix("#ffffff", "#c02a2a", t);
}

function mix(a: string, b: string, t: number): string {
  const pa = [1, 3, 5].map(i => parseInt(a.slice(i, i + 2), 16));
  const pb = [1, 3, 5].map(i => parseInt(b.slice(i, i + 2), 16));
  const c = pa.map((v, i) => Math.round(v + (pb[i] - v) * Math.min(1, t)));
  return `#${c.map(v => v.toString(16).padStart(2, "0")).join("")}`;
}

/** Heat map of the top exponent over the (gamma, omega) grid at the
 * first instability value in the table. */
export function renderOde3Figure(rows: Ode3Row[]): string {
  const beta = rows[0].beta;
  const betas = [...new Set(rows.map(r => r.beta))];
  const slice = rows.filter(r => r.beta === beta);
  const gammas = [...new Set(slice.map(r => r.gamma))].sort((a, b) => a - b);
  const omegas = [...new Set(slice.map(r => r.omega))].sort((a, b) => a - b);

  const { doc, area } = newFigure();
  const [lo, hi] = finiteExtent(slice.map(r => r.lambda1), "lambda1");
  const cellW = area.width / gammas.length;
  const cellH = area.height / omegas.length;

  for (const row of slice) {
    const i = gammas.indexOf(row.gamma);
    const j = omegas.indexOf(row.omega);
    const px = area.left + i * cellW;
    const py = area.top + area.height - (j + 1) * cellH;
    doc.rect(px, py, cellW, cellH, heatColor(row.lambda1, lo, hi), "#fff");
  }

  gammas.forEach((g, i) => {
    doc.text(area.left + (i + 0.5) * cellW, area.top + area.height + 16,
             shortNumber(g, 4), { anchor: "middle" });
  });
  omegas.forEach((w, j) => {
    doc.text(area.left - 7, area.top + area.height - (j + 0.5) * cellH + 3.5,
             shortNumber(w, 4), { anchor: "end" });
  });

  const suffix = betas.length > 1
    ? ` (1 of ${betas.length} beta values)` : "";
  doc.text(area.left + area.width / 2, area.top - 12,
           `Top exponent of the polar reduction, beta = ${
             shortNumber(beta, 6)}${suffix}`,
           { anchor: "middle", size: "13px", bold: true });
  doc.text(area.left + area.width / 2, area.top + area.height + 34,
           "gamma", { anchor: "middle", size: "12px" });
  doc.text(area.left - 42, area.top + area.height / 2, "omega",
           { anchor: "middle", size: "12px", rotate: -90 });

  // color bar
  const barX = area.left + area.width + 14;
  const steps = 40;
  for (let s = 0; s < steps; s++) {
    const v = lo + ((hi - lo) * (steps - 1 - s)) / (steps - 1);
    doc.rect(barX, area.top + (s * area.height) / steps, 14,
             area.height / steps + 0.5, heatColor(v, lo, hi));
  }
  doc.text(barX + 18, area.top + 8, shortNumber(hi, 3));
  doc.text(barX + 18, area.top + area.height, shortNumber(lo, 3));
  return doc.render();
}
