/** Deterministic SVG chart rendering: same rows in, same bytes out. */

import { Series } from "./csv.js";
import { FigureSpec } from "./figures.js";

const PANEL_WIDTH = 720;
const PANEL_HEIGHT = 300;
const MARGIN = { left: 70, right: 18, top: 24, bottom: 48 };
const LEGEND_HEIGHT = 26;
const TITLE_HEIGHT = 30;

const PALETTE = ["#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#8c564b"];

function fmt(v: number): string {
  // fixed-notation, trailing-zero-free formatting keeps output stable
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(3);
  return s.replace(/\.?0+$/, "") || "0";
}

interface Scale {
  (v: number): number;
  domain: [number, number];
}

function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  return scale;
}

/** 1-2-5 ticks for a log10-transformed domain. */
export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let decade = Math.floor(lo); decade <= Math.ceil(hi); decade++) {
    for (const mult of [1, 2, 5]) {
      const v = decade + Math.log10(mult);
      if (v >= lo - 1e-9 && v <= hi + 1e-9) ticks.push(v);
    }
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

export function niceTicks(lo: number, hi: number, count = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const span = hi - lo;
  const raw = span / Math.max(1, count);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const mult of [1, 2, 5, 10]) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= hi + step * 1e-9; v += step) {
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

function extent(series: Series[], pick: (p: { x: number; y: number; err: number }) => number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const s of series) {
    for (const p of s.points) {
      for (const v of pick(p)) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return [lo, hi];
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function renderPanel(series: Series[], xLabel: string, yLabel: string, hasError: boolean,
                     yOffset: number, colors: Map<string, string>, logY: boolean): string {
  const innerW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const innerH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const [xLo, xHi] = extent(series, (p) => [p.x]);
  if (logY) {
    for (const s of series) {
      for (const p of s.points) {
        if (p.y <= 0) {
          throw new Error(`log y-axis requires positive values, got ${p.y} for ${s.scheme}`);
        }
      }
    }
  }
  // on a log axis the lower error bound is clamped one decade below the point
  const ty = logY ? (v: number) => Math.log10(v) : (v: number) => v;
  const lowErr = (p: { y: number; err: number }) =>
    logY ? Math.max(p.y - p.err, p.y / 10) : p.y - p.err;
  let [yLo, yHi] = extent(series, (p) => (hasError ? [ty(lowErr(p)), ty(p.y + p.err)] : [ty(p.y)]));
  const pad = (yHi - yLo) * 0.08;
  yLo = logY ? yLo - pad : Math.min(yLo - pad, yLo >= 0 && yLo - pad < 0 ? 0 : yLo - pad);
  yHi += pad;
  const x = linearScale([xLo, xHi], [MARGIN.left, MARGIN.left + innerW]);
  const y = linearScale([yLo, yHi], [yOffset + MARGIN.top + innerH, yOffset + MARGIN.top]);

  const parts: string[] = [];
  parts.push(`<rect x="${MARGIN.left}" y="${yOffset + MARGIN.top}" width="${innerW}" height="${innerH}" fill="none" stroke="#333" stroke-width="1"/>`);
  for (const t of logY ? logTicks(yLo, yHi) : niceTicks(yLo, yHi)) {
    const py = fmt(y(t));
    parts.push(`<line x1="${MARGIN.left}" y1="${py}" x2="${MARGIN.left + innerW}" y2="${py}" stroke="#ddd" stroke-width="0.5"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="11">${fmt(logY ? Math.pow(10, t) : t)}</text>`);
  }
  for (const t of niceTicks(xLo, xHi)) {
    const px = fmt(x(t));
    const base = yOffset + MARGIN.top + innerH;
    parts.push(`<line x1="${px}" y1="${base}" x2="${px}" y2="${base + 5}" stroke="#333" stroke-width="1"/>`);
    parts.push(`<text x="${px}" y="${base + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`);
  }
  parts.push(`<text x="${MARGIN.left + innerW / 2}" y="${yOffset + PANEL_HEIGHT - 10}" text-anchor="middle" font-size="12">${esc(xLabel)}</text>`);
  parts.push(`<text transform="translate(16 ${yOffset + MARGIN.top + innerH / 2}) rotate(-90)" text-anchor="middle" font-size="12">${esc(yLabel)}</text>`);

  for (const s of series) {
    const color = colors.get(s.scheme)!;
    const pts = s.points.map((p) => `${fmt(x(p.x))},${fmt(y(ty(p.y)))}`).join(" ");
    parts.push(`<polyline class="series" data-scheme="${esc(s.scheme)}" points="${pts}" fill="none" stroke="${color}" stroke-width="2"/>`);
    for (const p of s.points) {
      const px = fmt(x(p.x));
      parts.push(`<circle cx="${px}" cy="${fmt(y(ty(p.y)))}" r="3" fill="${color}"/>`);
      if (hasError && p.err > 0) {
        const top = fmt(y(ty(p.y + p.err)));
        const bot = fmt(y(ty(lowErr(p))));
        parts.push(`<line class="errorbar" x1="${px}" y1="${top}" x2="${px}" y2="${bot}" stroke="${color}" stroke-width="1.2"/>`);
        parts.push(`<line x1="${fmt(Number(px) - 4)}" y1="${top}" x2="${fmt(Number(px) + 4)}" y2="${top}" stroke="${color}" stroke-width="1.2"/>`);
        parts.push(`<line x1="${fmt(Number(px) - 4)}" y1="${bot}" x2="${fmt(Number(px) + 4)}" y2="${bot}" stroke="${color}" stroke-width="1.2"/>`);
      }
    }
  }
  return parts.join("\n");
}

export interface RenderOptions {
  logY?: boolean;
}

/** Render one figure as a standalone SVG document. */
export function renderFigure(spec: FigureSpec, panelSeries: Series[][],
                             options: RenderOptions = {}): string {
  const schemes: string[] = [];
  for (const series of panelSeries) {
    for (const s of series) {
      if (!schemes.includes(s.scheme)) schemes.push(s.scheme);
    }
  }
  const colors = new Map(schemes.map((s, i) => [s, PALETTE[i % PALETTE.length]]));
  const height = TITLE_HEIGHT + LEGEND_HEIGHT + spec.panels.length * PANEL_HEIGHT;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${PANEL_WIDTH}" height="${height}" viewBox="0 0 ${PANEL_WIDTH} ${height}" font-family="Helvetica, Arial, sans-serif">`);
  parts.push(`<rect width="${PANEL_WIDTH}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${PANEL_WIDTH / 2}" y="20" text-anchor="middle" font-size="15" font-weight="bold">${esc(spec.title)}</text>`);
  let lx = MARGIN.left;
  for (const scheme of schemes) {
    parts.push(`<line x1="${lx}" y1="${TITLE_HEIGHT + 10}" x2="${lx + 22}" y2="${TITLE_HEIGHT + 10}" stroke="${colors.get(scheme)}" stroke-width="2.5"/>`);
    parts.push(`<text x="${lx + 28}" y="${TITLE_HEIGHT + 14}" font-size="12">${esc(scheme)}</text>`);
    lx += 28 + 10 * scheme.length + 24;
  }
  spec.panels.forEach((panel, i) => {
    parts.push(renderPanel(panelSeries[i], spec.xLabel, panel.yLabel, Boolean(panel.errorColumn),
                           TITLE_HEIGHT + LEGEND_HEIGHT + i * PANEL_HEIGHT, colors,
                           Boolean(options.logY)));
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
