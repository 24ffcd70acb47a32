import { describe, expect, it } from "vitest";

import { SchemaError, parseCsv, requireColumns } from "../src/csv.js";

const SMALL = "t,a,b\n0,1.5,2\n0.1,3,4.25\n";

describe("parseCsv", () => {
  it("parses rows into named columns", () => {
    const table = parseCsv(SMALL);
    expect(table.rowCount).toBe(2);
    expect(table.columns.get("a")).toEqual([1.5, 3]);
    expect(table.columns.get("b")).toEqual([2, 4.25]);
  });

  it("counts landmarks from the header", () => {
    const table = parseCsv("t,p1_1,p1_2,p1_3,p2_1,p2_2,p2_3,pitch_err\n0,1,2,3,4,5,6,7\n");
    expect(table.landmarkCount).toBe(2);
  });

  it("accepts a header-only file with zero rows", () => {
    expect(parseCsv("t,a\n").rowCount).toBe(0);
  });

  it("rejects ragged rows", () => {
    expect(() => parseCsv("t,a\n1,2,3\n")).toThrow(SchemaError);
  });

  it("rejects non-numeric cells", () => {
    expect(() => parseCsv("t,a\n0,oops\n")).toThrow(SchemaError);
  });
});

describe("requireColumns", () => {
  it("names the first missing column", () => {
    const table = parseCsv(SMALL);
    expect(() => requireColumns(table, ["a", "lyap_L", "lyap_V"])).toThrow(
      /missing column: lyap_L/,
    );
  });
});
