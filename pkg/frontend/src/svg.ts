/**
 * Tiny SVG document builder: enough shapes for scatter/line plots, heat
 * maps and annotated axes, produced as plain markup with no DOM and no
 * rendering dependencies.
 */

import { Scale, tickLabel } from "./scale.js";

export const FONT = "11px";
export const FONT_FAMILY = "Helvetica, Arial, sans-serif";

export function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
             .replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

function fmt(value: number): string {
  return String(Math.round(value * 100) / 100);
}

export interface TextOptions {
  anchor?: "start" | "middle" | "end";
  size?: string;
  fill?: string;
  rotate?: number;
  baseline?: string;
  bold?: boolean;
}

export class SvgDoc {
  private parts: string[] = [];

  constructor(readonly width: number, readonly height: number) {}

  add(markup: string): void {
    this.parts.push(markup);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string,
       width = 1, dash?: string): void {
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" ` +
             `y2="${fmt(y2)}" stroke="${stroke}" stroke-width="${width}"${d}/>`);
  }

  polyline(points: [number, number][], stroke: string, width = 1.5,
           dash?: string): void {
    const joined = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    const d = dash ? ` stroke-dasharray="${dash}"` : "";
    this.add(`<polyline points="${joined}" fill="none" stroke="${stroke}" ` +
             `stroke-width="${width}"${d}/>`);
  }

  circle(cx: number, cy: number, r: number, fill: string,
         stroke = "none"): void {
    this.add(`<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" ` +
             `fill="${fill}" stroke="${stroke}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string,
       stroke = "none"): void {
    this.add(`<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" ` +
             `height="${fmt(h)}" fill="${fill}" stroke="${stroke}"/>`);
  }

  text(x: number, y: number, content: string, opts: TextOptions = {}): void {
    const anchor = opts.anchor ?? "start";
    const size = opts.size ?? FONT;
    const fill = opts.fill ?? "#222";
    const rotate = opts.rotate
      ? ` transform="rotate(${opts.rotate} ${fmt(x)} ${fmt(y)})"` : "";
    const baseline = opts.baseline ? ` dominant-baseline="${opts.baseline}"` : "";
    const weight = opts.bold ? ` font-weight="bold"` : "";
    this.add(`<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
             `font-size="${size}" font-family="${FONT_FAMILY}" ` +
             `fill="${fill}"${baseline}${weight}${rotate}>${esc(content)}</text>`);
  }

  render(): string {
    return `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" ` +
           `height="${this.height}" viewBox="0 0 ${this.width} ` +
           `${this.height}">\n<rect width="${this.width}" height="${
             this.height}" fill="white"/>\n` +
           this.parts.join("\n") + "\n</svg>\n";
  }
}

export interface PlotArea {
  left: number;
  top: number;
  width: number;
  height: number;
}

/** Axes, tick marks, tick labels, grid, axis titles and figure title. */
export function drawFrame(doc: SvgDoc, area: PlotArea, x: Scale, y: Scale,
                          xLabel: string, yLabel: string,
                          title: string): void {
  const bottom = area.top + area.height;
  const right = area.left + area.width;

  for (const t of x.ticks) {
    const px = x(t);
    doc.line(px, area.top, px, bottom, "#ddd", 0.6);
    doc.line(px, bottom, px, bottom + 4, "#222", 1);
    doc.text(px, bottom + 16, tickLabel(t, x.log), { anchor: "middle" });
  }
  for (const t of y.ticks) {
    const py = y(t);
    doc.line(area.left, py, right, py, "#ddd", 0.6);
    doc.line(area.left - 4, py, area.left, py, "#222", 1);
    doc.text(area.left - 7, py + 3.5, tickLabel(t, y.log), { anchor: "end" });
  }
  doc.line(area.left, bottom, right, bottom, "#222", 1);
  doc.line(area.left, area.top, area.left, bottom, "#222", 1);

  doc.text(area.left + area.width / 2, bottom + 34, xLabel,
           { anchor: "middle", size: "12px" });
  doc.text(area.left - 42, area.top + area.height / 2, yLabel,
           { anchor: "middle", size: "12px", rotate: -90 });
  doc.text(area.left + area.width / 2, area.top - 12, title,
           { anchor: "middle", size: "13px", bold: true });
}

export const SERIES_COLORS = ["#1f6fb4", "#d1495b", "#2e8b57", "#b8860b",
                              "#6a51a3", "#444444"];
