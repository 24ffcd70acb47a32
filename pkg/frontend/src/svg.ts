/**
 * Minimal deterministic SVG plotting: line panels and a fixed-view 3D
 * projection. No DOM, no canvas; the output is a plain string built from
 * the data, so identical inputs give identical files.
 */

import { Panel, Path3d, Series } from "./figures.js";

const COLORS = [
  "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
  "#aec7e8", "#ffbb78",
];

const FONT = "font-family=\"Helvetica, Arial, sans-serif\"";

function fmt(v: number): string {
  return Number(v.toFixed(2)).toString();
}

function ticks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) {
    return [lo];
  }
  const out: number[] = [];
  for (let i = 0; i <= count; i++) {
    out.push(lo + ((hi - lo) * i) / count);
  }
  return out;
}

interface Extent {
  lo: number;
  hi: number;
}

function extent(values: number[][]): Extent {
  let lo = Infinity;
  let hi = -Infinity;
  for (const arr of values) {
    for (const v of arr) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  if (lo === Infinity) {
    lo = 0;
    hi = 1;
  }
  if (hi === lo) {
    hi = lo + 1;
  }
  return { lo, hi };
}

/** Map a data point into pixel coordinates inside the plot box. */
export function toPixel(
  v: number,
  ext: Extent,
  pixLo: number,
  pixHi: number,
): number {
  return pixLo + ((v - ext.lo) / (ext.hi - ext.lo)) * (pixHi - pixLo);
}

function polyline(xs: number[], ys: number[], color: string): string {
  const pts: string[] = [];
  // decimate long series for file size; always keep both endpoints
  const stride = Math.max(1, Math.floor(xs.length / 2000));
  for (let i = 0; i < xs.length; i += stride) {
    pts.push(`${xs[i].toFixed(2)},${ys[i].toFixed(2)}`);
  }
  const last = xs.length - 1;
  if (last >= 0 && (last % stride) !== 0) {
    pts.push(`${xs[last].toFixed(2)},${ys[last].toFixed(2)}`);
  }
  return `<polyline fill="none" stroke="${color}" stroke-width="1.2" points="${pts.join(" ")}"/>`;
}

function circleMarker(x: number, y: number, color: string): string {
  return `<circle cx="${x.toFixed(2)}" cy="${y.toFixed(2)}" r="3.5" fill="none" stroke="${color}" stroke-width="1.4"/>`;
}

function starMarker(x: number, y: number, color: string): string {
  const r = 4.0;
  const lines: string[] = [];
  for (const angle of [0, 60, 120]) {
    const rad = (angle * Math.PI) / 180;
    const dx = r * Math.cos(rad);
    const dy = r * Math.sin(rad);
    lines.push(
      `<line x1="${(x - dx).toFixed(2)}" y1="${(y - dy).toFixed(2)}" x2="${(x + dx).toFixed(2)}" y2="${(y + dy).toFixed(2)}" stroke="${color}" stroke-width="1.4"/>`,
    );
  }
  return lines.join("");
}

export interface PanelBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function renderPanel(panel: Panel, box: PanelBox): string {
  const margin = { left: 52, right: 12, top: 28, bottom: 34 };
  const plotX0 = box.x + margin.left;
  const plotX1 = box.x + box.width - margin.right;
  const plotY0 = box.y + margin.top;
  const plotY1 = box.y + box.height - margin.bottom;

  const xExt = extent(panel.series.map((s) => s.x));
  const yExt = extent(panel.series.map((s) => s.y));

  const parts: string[] = [];
  parts.push(
    `<rect x="${plotX0}" y="${plotY0}" width="${plotX1 - plotX0}" height="${plotY1 - plotY0}" fill="none" stroke="#333" stroke-width="0.8"/>`,
  );
  parts.push(
    `<text x="${box.x + box.width / 2}" y="${box.y + 16}" text-anchor="middle" font-size="12" ${FONT}>${panel.title}</text>`,
  );
  for (const tick of ticks(xExt.lo, xExt.hi)) {
    const px = toPixel(tick, xExt, plotX0, plotX1);
    parts.push(`<line x1="${px.toFixed(2)}" y1="${plotY1}" x2="${px.toFixed(2)}" y2="${plotY1 + 4}" stroke="#333" stroke-width="0.8"/>`);
    parts.push(
      `<text x="${px.toFixed(2)}" y="${plotY1 + 16}" text-anchor="middle" font-size="9" ${FONT}>${fmt(tick)}</text>`,
    );
  }
  for (const tick of ticks(yExt.lo, yExt.hi)) {
    const py = toPixel(tick, yExt, plotY1, plotY0);
    parts.push(`<line x1="${plotX0 - 4}" y1="${py.toFixed(2)}" x2="${plotX0}" y2="${py.toFixed(2)}" stroke="#333" stroke-width="0.8"/>`);
    parts.push(
      `<text x="${plotX0 - 6}" y="${(py + 3).toFixed(2)}" text-anchor="end" font-size="9" ${FONT}>${fmt(tick)}</text>`,
    );
  }
  parts.push(
    `<text x="${(plotX0 + plotX1) / 2}" y="${plotY1 + 30}" text-anchor="middle" font-size="10" ${FONT}>${panel.xLabel}</text>`,
  );
  parts.push(
    `<text x="${box.x + 12}" y="${(plotY0 + plotY1) / 2}" text-anchor="middle" font-size="10" ${FONT} transform="rotate(-90 ${box.x + 12} ${(plotY0 + plotY1) / 2})">${panel.yLabel}</text>`,
  );

  panel.series.forEach((series, idx) => {
    const color = COLORS[idx % COLORS.length];
    const px = series.x.map((v) => toPixel(v, xExt, plotX0, plotX1));
    const py = series.y.map((v) => toPixel(v, yExt, plotY1, plotY0));
    parts.push(polyline(px, py, color));
  });

  if (panel.series.length > 1) {
    panel.series.forEach((series, idx) => {
      const color = COLORS[idx % COLORS.length];
      const lx = plotX1 - 110;
      const ly = plotY0 + 12 + idx * 12;
      parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${color}" stroke-width="1.4"/>`);
      parts.push(`<text x="${lx + 20}" y="${ly + 3}" font-size="9" ${FONT}>${series.label}</text>`);
    });
  }
  return parts.join("\n");
}

/** Fixed orthographic camera (azimuth -60 deg, elevation 30 deg). */
export function project3d(x: number, y: number, z: number): [number, number] {
  const az = (-60 * Math.PI) / 180;
  const el = (30 * Math.PI) / 180;
  const u = -Math.sin(az) * x + Math.cos(az) * y;
  const w =
    -Math.cos(az) * Math.sin(el) * x - Math.sin(az) * Math.sin(el) * y + Math.cos(el) * z;
  return [u, w];
}

export function renderTrajectoryPaths(
  paths: Path3d[],
  width: number,
  height: number,
): string {
  const projected = paths.map((p) => {
    const us: number[] = [];
    const ws: number[] = [];
    for (let i = 0; i < p.xs.length; i++) {
      const [u, w] = project3d(p.xs[i], p.ys[i], p.zs[i]);
      us.push(u);
      ws.push(w);
    }
    return { ...p, us, ws };
  });
  const uExt = extent(projected.map((p) => p.us));
  const wExt = extent(projected.map((p) => p.ws));
  const margin = 46;
  const parts: string[] = [];
  parts.push(
    `<text x="${width / 2}" y="20" text-anchor="middle" font-size="13" ${FONT}>true and estimated trajectories (initial: circle, final: star)</text>`,
  );
  projected.forEach((p, idx) => {
    const color = COLORS[idx % COLORS.length];
    const px = p.us.map((v) => toPixel(v, uExt, margin, width - margin));
    const py = p.ws.map((v) => toPixel(v, wExt, height - margin, margin));
    if (!p.pointOnly) {
      parts.push(polyline(px, py, color));
    }
    parts.push(circleMarker(px[0], py[0], color));
    parts.push(starMarker(px[px.length - 1], py[py.length - 1], color));
  });
  const legendEntries = projected.filter((p) => !p.label.startsWith("landmark") || p.label === "landmark 1 (true)" || p.label === "landmark 1 (est)");
  legendEntries.forEach((p, idx) => {
    const color = COLORS[projected.indexOf(p) % COLORS.length];
    const lx = width - 180;
    const ly = 40 + idx * 13;
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 16}" y2="${ly}" stroke="${color}" stroke-width="1.4"/>`);
    parts.push(`<text x="${lx + 20}" y="${ly + 3}" font-size="9" ${FONT}>${p.label}</text>`);
  });
  return parts.join("\n");
}

export function svgDocument(body: string, width: number, height: number): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}
