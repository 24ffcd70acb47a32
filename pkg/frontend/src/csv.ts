/**
 * Reader for the trajectory CSV schema emitted by the simulator CLI.
 *
 * The file is a plain comma-separated table with a fixed header; every cell
 * after the header is a decimal float. Parsing never mutates the input and
 * the same bytes always produce the same numbers.
 */

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export interface TrajectoryTable {
  /** column name -> per-row values, in file order */
  columns: Map<string, number[]>;
  header: string[];
  rowCount: number;
  /** landmark count recovered from the p{i}_1 columns */
  landmarkCount: number;
}

export function parseCsv(text: string): TrajectoryTable {
  const lines = text.split("\n").filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty file: expected a header row");
  }
  const header = lines[0].split(",");
  const columns = new Map<string, number[]>(header.map((name) => [name, []]));
  if (columns.size !== header.length) {
    throw new SchemaError("duplicate column names in header");
  }
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(`row ${i} has ${cells.length} cells, expected ${header.length}`);
    }
    for (let j = 0; j < cells.length; j++) {
      const value = Number(cells[j]);
      if (Number.isNaN(value)) {
        throw new SchemaError(`row ${i}, column ${header[j]}: not a number`);
      }
      columns.get(header[j])!.push(value);
    }
  }
  const landmarkCount = header.filter((name) => /^p\d+_1$/.test(name)).length;
  return { columns, header, rowCount: lines.length - 1, landmarkCount };
}

/** Fetch a column, raising SchemaError naming the first missing one. */
export function requireColumns(table: TrajectoryTable, names: string[]): number[][] {
  for (const name of names) {
    if (!table.columns.has(name)) {
      throw new SchemaError(`missing column: ${name}`);
    }
  }
  return names.map((name) => table.columns.get(name)!);
}
