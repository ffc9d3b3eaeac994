import { describe, it } from "node:test";
import assert from "node:assert/strict";

import { contourSegments, lobeRadius, regionLhs } from "../src/regions.js";

describe("region formulas", () => {
  it("matches the frozen massless value", () => {
    // z = 4, m = 0, q = 3/2: |k| = 2, |zeta| = 1 -> 2 / 3^{3/2}
    const v = regionLhs({ re: 4, im: 0 }, 0, 1.5);
    assert.ok(Math.abs(v - 2 / Math.pow(3, 1.5)) < 1e-12);
  });

  it("matches the frozen massive value", () => {
    // z = 5, m = 3, q = 3/2: |k| = 2, |zeta| = 2 -> 2 / 3.5^{3/2}
    const v = regionLhs({ re: 5, im: 0 }, 3, 1.5);
    assert.ok(Math.abs(v - 2 / Math.pow(3.5, 1.5)) < 1e-12);
  });

  it("is homogeneous of degree q-1 at m = 0", () => {
    const q = 1.25;
    const a = regionLhs({ re: 0.4, im: 0.9 }, 0, q);
    const b = regionLhs({ re: 1.6, im: 3.6 }, 0, q);
    assert.ok(Math.abs(b / a - Math.pow(4, q - 1)) < 1e-10);
  });

  it("lobe radius inverts the power", () => {
    const r = lobeRadius(0.3, 1.5);
    assert.ok(Math.abs(Math.pow(r, 0.5) - 0.3) < 1e-12);
    assert.equal(lobeRadius(0.3, 1.0), Number.POSITIVE_INFINITY);
  });
});

describe("marching squares", () => {
  it("recovers a circle boundary", () => {
    const segs = contourSegments((x, y) => x * x + y * y - 1, -2, 2, -2, 2, 200);
    assert.ok(segs.length > 100);
    for (const [ax, ay, bx, by] of segs) {
      for (const r of [Math.hypot(ax, ay), Math.hypot(bx, by)]) {
        assert.ok(Math.abs(r - 1) < 0.02, `vertex radius ${r}`);
      }
    }
  });

  it("finds nothing when the level is not crossed", () => {
    const segs = contourSegments((x, y) => x * x + y * y + 1, -2, 2, -2, 2, 50);
    assert.equal(segs.length, 0);
  });
});
