import { describe, it } from "node:test";
import assert from "node:assert/strict";

import { SchemaError, distinct, numericColumn, parseCsv, requireColumns } from "../src/csv.js";

describe("csv parsing", () => {
  it("parses header and rows", () => {
    const t = parseCsv("a,b\n1,2\n3,4\n");
    assert.deepEqual(t.columns, ["a", "b"]);
    assert.equal(t.rows.length, 2);
    assert.equal(t.rows[1]["b"], "4");
  });

  it("rejects ragged rows", () => {
    assert.throws(() => parseCsv("a,b\n1\n"), SchemaError);
  });

  it("names the missing column", () => {
    const t = parseCsv("a,b\n1,2\n");
    assert.throws(
      () => requireColumns(t, ["a", "curvature"], "fermi-curvature"),
      (err: Error) => err instanceof SchemaError && err.message.includes("'curvature'"),
    );
  });

  it("parses numeric columns at full precision", () => {
    const t = parseCsv("x\n1.2345678901234567e-08\n");
    assert.equal(numericColumn(t, "x")[0], 1.2345678901234567e-8);
  });

  it("rejects non-numeric cells", () => {
    const t = parseCsv("x\nnan\n");
    assert.throws(() => numericColumn(t, "x"), SchemaError);
  });

  it("collects distinct values in order", () => {
    const t = parseCsv("c\n0\n1\n0\n2\n");
    assert.deepEqual(distinct(t, "c"), ["0", "1", "2"]);
  });
});
