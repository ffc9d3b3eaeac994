import { describe, it } from "node:test";
import assert from "node:assert/strict";
import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

import { parseCsv, SchemaError } from "../src/csv.js";
import { FIGURE_KINDS, render } from "../src/figures.js";

const here = dirname(fileURLToPath(import.meta.url));
const FIXTURES = join(here, "..", "..", "fixtures");

const FIXTURE_FOR: Record<string, string> = {
  "spectrum-region": "eig_massless.csv",
  "fermi-curvature": "fermi_lam_0p03125.csv",
  "decay-fit": "decay_circle.csv",
  "kernel-profile": "cancellation.csv",
  "bs-sweep": "bs_norm.csv",
};

function load(name: string) {
  return parseCsv(readFileSync(join(FIXTURES, name), "utf8"));
}

describe("figure rendering", () => {
  for (const kind of FIGURE_KINDS) {
    it(`renders ${kind} from its fixture`, () => {
      const svg = render(kind, load(FIXTURE_FOR[kind]));
      assert.ok(svg.length > 500, "nonempty SVG");
      assert.ok(svg.startsWith("<svg"));
      assert.ok(svg.trimEnd().endsWith("</svg>"));
    });
  }

  it("fermi legend echoes the component count from the CSV", () => {
    const svg = render("fermi-curvature", load(FIXTURE_FOR["fermi-curvature"]));
    assert.ok(svg.includes("components: 4"), "legend should read components: 4");
  });

  it("decay-fit slope label is near -1/2 for the circle", () => {
    const svg = render("decay-fit", load(FIXTURE_FOR["decay-fit"]));
    const match = svg.match(/slope = (-?\d+\.\d+)/);
    assert.ok(match, "slope label present");
    const slope = Number(match![1]);
    assert.ok(slope > -0.55 && slope < -0.45, `slope ${slope}`);
  });

  it("kernel-profile reports the sup", () => {
    const svg = render("kernel-profile", load(FIXTURE_FOR["kernel-profile"]));
    assert.ok(/sup \|kernel\| = 3\.14159/.test(svg));
  });

  it("spectrum-region honors a supplied constant", () => {
    const table = load(FIXTURE_FOR["spectrum-region"]);
    const a = render("spectrum-region", table, { constant: 0.05 });
    const b = render("spectrum-region", table, { constant: 0.2 });
    assert.notEqual(a, b);
    assert.ok(a.includes("C = 0.05000"));
  });

  it("is deterministic", () => {
    const table = load(FIXTURE_FOR["bs-sweep"]);
    assert.equal(render("bs-sweep", table), render("bs-sweep", table));
  });

  it("names the missing column on schema mismatch", () => {
    const bad = parseCsv("re_z,im_z\n1,2\n");
    assert.throws(
      () => render("bs-sweep", bad),
      (err: Error) => err instanceof SchemaError && err.message.includes("'bs_norm'"),
    );
  });
});
