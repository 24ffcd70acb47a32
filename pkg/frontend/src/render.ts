/**
 * Figure rendering: CSV in, SVG file out. Rendering never recomputes any
 * dynamics; whatever the log says is what gets drawn.
 */

import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv } from "./csv.js";
import { FIGURE_KINDS, FigureKind, extractFigure } from "./figures.js";
import { renderPanel, renderTrajectoryPaths, svgDocument } from "./svg.js";

export interface FigureSpec {
  csvPath: string;
  figure: FigureKind;
  outPath: string;
}

export function renderFigureString(csvText: string, figure: FigureKind): string {
  const table = parseCsv(csvText);
  const data = extractFigure(table, figure);

  if (data.kind === "trajectory3d") {
    const width = 760;
    const height = 620;
    return svgDocument(renderTrajectoryPaths(data.paths, width, height), width, height);
  }

  const panelWidth = 420;
  const panelHeight = 260;
  const cols = data.panels.length > 2 ? 2 : 1;
  const rows = Math.ceil(data.panels.length / cols);
  const width = cols * panelWidth;
  const height = rows * panelHeight;
  const body = data.panels
    .map((panel, idx) =>
      renderPanel(panel, {
        x: (idx % cols) * panelWidth,
        y: Math.floor(idx / cols) * panelHeight,
        width: panelWidth,
        height: panelHeight,
      }),
    )
    .join("\n");
  return svgDocument(body, width, height);
}

export function render(spec: FigureSpec): void {
  if (!FIGURE_KINDS.includes(spec.figure)) {
    throw new Error(`unknown figure ${spec.figure}; expected one of ${FIGURE_KINDS.join(", ")}`);
  }
  const text = readFileSync(spec.csvPath, "utf-8");
  writeFileSync(spec.outPath, renderFigureString(text, spec.figure), "utf-8");
}
