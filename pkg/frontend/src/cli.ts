#!/usr/bin/env node
/**
 * Usage: lislam-plot <figure> <csv> --out <path>
 *
 * <figure> is one of trajectory3d, base_errors, inertial_errors; <csv> is a
 * trajectory log produced by the simulator CLI.
 */

import { SchemaError } from "./csv.js";
import { FIGURE_KINDS, FigureKind } from "./figures.js";
import { render } from "./render.js";

function usage(): string {
  return `usage: lislam-plot <${FIGURE_KINDS.join("|")}> <csv> --out <path>`;
}

function main(argv: string[]): number {
  const positional: string[] = [];
  let outPath: string | null = null;
  for (let i = 0; i < argv.length; i++) {
    if (argv[i] === "--out") {
      outPath = argv[i + 1] ?? null;
      i++;
    } else if (argv[i] === "--help" || argv[i] === "-h") {
      console.log(usage());
      return 0;
    } else {
      positional.push(argv[i]);
    }
  }
  if (positional.length !== 2 || outPath === null) {
    console.error(usage());
    return 1;
  }
  const [figure, csvPath] = positional;
  if (!FIGURE_KINDS.includes(figure as FigureKind)) {
    console.error(`unknown figure: ${figure}\n${usage()}`);
    return 1;
  }
  try {
    render({ figure: figure as FigureKind, csvPath, outPath });
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
      return 1;
    }
    console.error(String(err));
    return 1;
  }
  console.log(`wrote ${outPath}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
