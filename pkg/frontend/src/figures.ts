/**
 * Figure data extraction: maps the trajectory table onto plottable series.
 *
 * Extraction is lossless; the series carry the parsed CSV values unchanged,
 * so the drawn endpoints are exactly the file's first and last rows.
 */

import { SchemaError, TrajectoryTable, requireColumns } from "./csv.js";

export type FigureKind = "trajectory3d" | "base_errors" | "inertial_errors";

export const FIGURE_KINDS: FigureKind[] = ["trajectory3d", "base_errors", "inertial_errors"];

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

export interface Path3d {
  label: string;
  xs: number[];
  ys: number[];
  zs: number[];
  /** single points (static landmarks) are drawn as markers only */
  pointOnly: boolean;
}

export interface TrajectoryFigure {
  kind: "trajectory3d";
  paths: Path3d[];
}

export interface PanelFigure {
  kind: "base_errors" | "inertial_errors";
  panels: Panel[];
}

export type FigureData = TrajectoryFigure | PanelFigure;

function triple(table: TrajectoryTable, names: [string, string, string]) {
  const [a, b, c] = requireColumns(table, names);
  return { xs: a, ys: b, zs: c };
}

export function extractTrajectory3d(table: TrajectoryTable): TrajectoryFigure {
  const n = table.landmarkCount;
  const paths: Path3d[] = [
    { label: "robot (true)", ...triple(table, ["x1", "x2", "x3"]), pointOnly: false },
    { label: "robot (est)", ...triple(table, ["hat_x1", "hat_x2", "hat_x3"]), pointOnly: false },
  ];
  for (let i = 1; i <= n; i++) {
    const truth = triple(table, [`p${i}_1`, `p${i}_2`, `p${i}_3`]);
    paths.push({
      label: `landmark ${i} (true)`,
      xs: [truth.xs[0]],
      ys: [truth.ys[0]],
      zs: [truth.zs[0]],
      pointOnly: true,
    });
    paths.push({
      label: `landmark ${i} (est)`,
      ...triple(table, [`hat_p${i}_1`, `hat_p${i}_2`, `hat_p${i}_3`]),
      pointOnly: false,
    });
  }
  return { kind: "trajectory3d", paths };
}

function lineSeries(table: TrajectoryTable, column: string, label: string): Series {
  const [t, y] = requireColumns(table, ["t", column]);
  return { label, x: t, y };
}

export function extractBaseErrors(table: TrajectoryTable): PanelFigure {
  const n = table.landmarkCount;
  const landmarkSeries: Series[] = [];
  for (let i = 1; i <= n; i++) {
    landmarkSeries.push(lineSeries(table, `err_lm${i}_body`, `landmark ${i}`));
  }
  return {
    kind: "base_errors",
    panels: [
      {
        title: "reduced attitude error",
        xLabel: "t [s]",
        yLabel: "angle [rad]",
        series: [lineSeries(table, "err_att_reduced", "attitude")],
      },
      {
        title: "body-frame velocity error",
        xLabel: "t [s]",
        yLabel: "[m/s]",
        series: [lineSeries(table, "err_vel_body", "velocity")],
      },
      {
        title: "relative landmark errors (body frame)",
        xLabel: "t [s]",
        yLabel: "[m]",
        series: landmarkSeries,
      },
      {
        title: "Lyapunov function",
        xLabel: "t [s]",
        yLabel: "L",
        series: [lineSeries(table, "lyap_L", "L")],
      },
    ],
  };
}

export function extractInertialErrors(table: TrajectoryTable): PanelFigure {
  const n = table.landmarkCount;
  const positionSeries: Series[] = [lineSeries(table, "err_pos_inertial", "robot position")];
  for (let i = 1; i <= n; i++) {
    positionSeries.push(lineSeries(table, `err_lm${i}_inertial`, `landmark ${i}`));
  }
  return {
    kind: "inertial_errors",
    panels: [
      {
        title: "attitude error (yaw-pitch-roll)",
        xLabel: "t [s]",
        yLabel: "angle [rad]",
        series: [
          lineSeries(table, "roll_err", "roll"),
          lineSeries(table, "pitch_err", "pitch"),
          lineSeries(table, "yaw_err", "yaw"),
        ],
      },
      {
        title: "inertial-frame position errors",
        xLabel: "t [s]",
        yLabel: "[m]",
        series: positionSeries,
      },
    ],
  };
}

export function extractFigure(table: TrajectoryTable, kind: FigureKind): FigureData {
  if (table.rowCount === 0) {
    throw new SchemaError("no data rows: nothing to plot");
  }
  switch (kind) {
    case "trajectory3d":
      return extractTrajectory3d(table);
    case "base_errors":
      return extractBaseErrors(table);
    case "inertial_errors":
      return extractInertialErrors(table);
  }
}
