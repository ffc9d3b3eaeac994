import { describe, it } from "node:test";
import assert from "node:assert/strict";
import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, statSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { fileURLToPath } from "node:url";
import { dirname, join } from "node:path";

const here = dirname(fileURLToPath(import.meta.url));
const CLI = join(here, "..", "src", "cli.js");
const FIXTURES = join(here, "..", "..", "fixtures");

function runCli(args: string[]) {
  return spawnSync(process.execPath, [CLI, ...args], { encoding: "utf8" });
}

describe("plot CLI", () => {
  const out = mkdtempSync(join(tmpdir(), "plots-"));

  const CASES: Array<[string, string]> = [
    ["spectrum-region", "eig_massless.csv"],
    ["fermi-curvature", "fermi_lam_0p03125.csv"],
    ["decay-fit", "decay_circle.csv"],
    ["kernel-profile", "cancellation.csv"],
    ["bs-sweep", "bs_norm.csv"],
  ];

  for (const [kind, fixture] of CASES) {
    it(`${kind} exits 0 with nonempty output`, () => {
      const dest = join(out, `${kind}.svg`);
      const res = runCli([kind, "--in", join(FIXTURES, fixture), "--out", dest]);
      assert.equal(res.status, 0, res.stderr);
      assert.ok(statSync(dest).size > 500);
      assert.ok(readFileSync(dest, "utf8").startsWith("<svg"));
    });
  }

  it("rejects an unknown kind", () => {
    const res = runCli(["pie-chart", "--in", "x.csv", "--out", "y.svg"]);
    assert.equal(res.status, 2);
    assert.ok(res.stderr.includes("figure kind"));
  });

  it("reports a missing input file", () => {
    const res = runCli(["bs-sweep", "--in", join(out, "nope.csv"), "--out", join(out, "x.svg")]);
    assert.equal(res.status, 2);
  });

  it("fails with the missing column named on schema mismatch", () => {
    const bad = join(out, "bad.csv");
    writeFileSync(bad, "rho\n1.0\n");
    const res = runCli(["kernel-profile", "--in", bad, "--out", join(out, "bad.svg")]);
    assert.equal(res.status, 1);
    assert.ok(res.stderr.includes("'kernel'"), res.stderr);
  });

  it("accepts a constant for the region boundary", () => {
    const dest = join(out, "region-c.svg");
    const res = runCli([
      "spectrum-region",
      "--in", join(FIXTURES, "eig_massless.csv"),
      "--constant", "0.1",
      "--out", dest,
    ]);
    assert.equal(res.status, 0, res.stderr);
    assert.ok(readFileSync(dest, "utf8").includes("C = 0.1000"));
  });
});
