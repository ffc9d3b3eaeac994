/** The five figure kinds, each a pure function from a parsed CSV to SVG. */

import { Table, SchemaError, distinct, numericColumn, requireColumns } from "./csv.js";
import { Figure, divergingColor } from "./svg.js";
import { SADDLE_VALUE, contourSegments, lobeRadius, regionLhs } from "./regions.js";

export const FIGURE_KINDS = [
  "spectrum-region",
  "fermi-curvature",
  "decay-fit",
  "kernel-profile",
  "bs-sweep",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureOptions {
  constant?: number; // C-hat for region boundaries; defaults to max ratio
}

export function render(kind: FigureKind, table: Table, opts: FigureOptions = {}): string {
  switch (kind) {
    case "spectrum-region":
      return spectrumRegion(table, opts);
    case "fermi-curvature":
      return fermiCurvature(table);
    case "decay-fit":
      return decayFit(table);
    case "kernel-profile":
      return kernelProfile(table);
    case "bs-sweep":
      return bsSweep(table);
    default:
      throw new SchemaError(`unknown figure kind '${kind}'`);
  }
}

function extent(vals: number[], padFrac = 0.1): [number, number] {
  let lo = Math.min(...vals);
  let hi = Math.max(...vals);
  if (lo === hi) {
    lo -= 1;
    hi += 1;
  }
  const pad = (hi - lo) * padFrac;
  return [lo - pad, hi + pad];
}

function spectrumRegion(table: Table, opts: FigureOptions): string {
  requireColumns(table, ["re_z", "im_z", "ratio", "thm1_lhs", "vq_norm", "q", "m"], "spectrum-region");
  const re = numericColumn(table, "re_z");
  const im = numericColumn(table, "im_z");
  const ratio = numericColumn(table, "ratio");
  const q = numericColumn(table, "q")[0];
  const m = numericColumn(table, "m")[0];
  const vq = numericColumn(table, "vq_norm")[0];
  const chat = opts.constant ?? Math.max(...ratio);

  const fig = new Figure();
  const [x0, x1] = extent(re, 0.15);
  const [y0, y1] = extent(im, 0.15);
  const xs = fig.xScale("linear", x0, x1);
  const ys = fig.yScale("linear", y0, y1);
  fig.axes(xs, ys, "Re z", "Im z", `point spectrum and inclusion boundary (C = ${chat.toPrecision(4)})`);

  // closed-form boundary {lhs(z) = C * ||V||_q^q} by marching squares
  const segs = contourSegments(
    (x, y) => regionLhs({ re: x, im: y }, m, q) - chat * vq,
    x0, x1, y0, y1, 160,
  );
  for (const [ax, ay, bx, by] of segs) {
    fig.line(xs.apply(ax), ys.apply(ay), xs.apply(bx), ys.apply(by), "#2ca02c", 1.6);
  }

  // warped-model lobes around 0 and the saddle value share the same radius
  const rad = lobeRadius(chat * vq, q);
  if (Number.isFinite(rad) && rad < Math.max(x1 - x0, y1 - y0)) {
    for (const cx of [0, SADDLE_VALUE]) {
      const pts: Array<[number, number]> = [];
      for (let k = 0; k <= 128; k++) {
        const th = (2 * Math.PI * k) / 128;
        pts.push([xs.apply(cx + rad * Math.cos(th)), ys.apply(rad * Math.sin(th))]);
      }
      fig.polyline(pts, "#9467bd", 1.0);
    }
  }

  for (let i = 0; i < re.length; i++) {
    fig.circle(xs.apply(re[i]), ys.apply(im[i]), 2.4, "#d62728", 0.75);
  }
  fig.text(fig.plotRight - 6, fig.plotTop + 14, `${re.length} eigenvalues`, { anchor: "end", size: 12 });
  return fig.toString();
}

function fermiCurvature(table: Table): string {
  requireColumns(table, ["component", "x1", "x2", "curvature"], "fermi-curvature");
  const comps = distinct(table, "component");
  const x1 = numericColumn(table, "x1");
  const x2 = numericColumn(table, "x2");
  const kap = numericColumn(table, "curvature");
  const kmax = Math.max(...kap.map(Math.abs), 1e-12);

  const fig = new Figure(640, 640, { top: 36, right: 24, bottom: 46, left: 64 });
  const [lo, hi] = extent(x1.concat(x2), 0.12);
  const xs = fig.xScale("linear", lo, hi);
  const ys = fig.yScale("linear", lo, hi);
  fig.axes(xs, ys, "xi_1", "xi_2", "level curve colored by curvature");

  for (const comp of comps) {
    const rows = table.rows.filter((r) => r["component"] === comp);
    for (let i = 0; i + 1 < rows.length; i++) {
      const a = rows[i];
      const b = rows[i + 1];
      const k = Number(a["curvature"]);
      fig.line(
        xs.apply(Number(a["x1"])), ys.apply(Number(a["x2"])),
        xs.apply(Number(b["x1"])), ys.apply(Number(b["x2"])),
        divergingColor(k / kmax), 2.0,
      );
    }
  }
  fig.text(fig.plotRight - 6, fig.plotTop + 14, `components: ${comps.length}`, {
    anchor: "end",
    size: 13,
  });
  fig.text(fig.plotRight - 6, fig.plotTop + 30, `|curvature| max: ${kmax.toPrecision(3)}`, {
    anchor: "end",
    size: 11,
  });
  return fig.toString();
}

function decayFit(table: Table): string {
  requireColumns(table, ["radius", "sup_ft"], "decay-fit");
  const r = numericColumn(table, "radius");
  const v = numericColumn(table, "sup_ft");
  const n = r.length;
  const lr = r.map(Math.log);
  const lv = v.map(Math.log);
  const mx = lr.reduce((a, b) => a + b, 0) / n;
  const my = lv.reduce((a, b) => a + b, 0) / n;
  let sxx = 0;
  let sxy = 0;
  for (let i = 0; i < n; i++) {
    sxx += (lr[i] - mx) ** 2;
    sxy += (lr[i] - mx) * (lv[i] - my);
  }
  const slope = sxy / sxx;
  const icept = my - slope * mx;

  const fig = new Figure();
  const xs = fig.xScale("log", Math.min(...r), Math.max(...r));
  const ys = fig.yScale("log", Math.min(...v) * 0.8, Math.max(...v) * 1.25);
  fig.axes(xs, ys, "|x|", "sup over directions of |FT|", "arclength-measure decay");
  const fitPts: Array<[number, number]> = [r[0], r[n - 1]].map((rr) => [
    xs.apply(rr),
    ys.apply(Math.exp(icept + slope * Math.log(rr))),
  ]);
  fig.polyline(fitPts, "#555", 1.2);
  for (let i = 0; i < n; i++) {
    fig.circle(xs.apply(r[i]), ys.apply(v[i]), 3, "#1f77b4");
  }
  fig.text(fig.plotRight - 6, fig.plotTop + 14, `slope = ${slope.toFixed(3)}`, {
    anchor: "end",
  });
  return fig.toString();
}

function kernelProfile(table: Table): string {
  requireColumns(table, ["rho", "kernel"], "kernel-profile");
  const rho = numericColumn(table, "rho");
  const val = numericColumn(table, "kernel");
  const fig = new Figure();
  const xs = fig.xScale("log", Math.min(...rho), Math.max(...rho));
  const [v0, v1] = extent(val, 0.08);
  const ys = fig.yScale("linear", v0, v1);
  fig.axes(xs, ys, "rho", "kernel value", "cancellation kernel profile");
  if (v0 < 0 && v1 > 0) {
    fig.line(fig.plotLeft, ys.apply(0), fig.plotRight, ys.apply(0), "#bbb", 1);
  }
  fig.polyline(
    rho.map((x, i) => [xs.apply(x), ys.apply(val[i])] as [number, number]),
    "#1f77b4",
    1.8,
  );
  const sup = Math.max(...val.map(Math.abs));
  fig.text(fig.plotRight - 6, fig.plotTop + 14, `sup |kernel| = ${sup.toPrecision(6)}`, {
    anchor: "end",
  });
  return fig.toString();
}

function bsSweep(table: Table): string {
  requireColumns(table, ["re_z", "im_z", "bs_norm"], "bs-sweep");
  const re = numericColumn(table, "re_z");
  const norm = numericColumn(table, "bs_norm");
  const fig = new Figure();
  const xs = fig.xScale("linear", ...extent(re, 0.05));
  const ys = fig.yScale("linear", 0, Math.max(...norm) * 1.1);
  fig.axes(xs, ys, "Re z", "||K(z)||", "Birman-Schwinger norm sweep");
  // one polyline per distinct imaginary offset
  const groups = distinct(table, "im_z");
  const palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd"];
  groups.forEach((imv, gi) => {
    const rows = table.rows
      .filter((r) => r["im_z"] === imv)
      .sort((a, b) => Number(a["re_z"]) - Number(b["re_z"]));
    fig.polyline(
      rows.map((r) => [xs.apply(Number(r["re_z"])), ys.apply(Number(r["bs_norm"]))] as [number, number]),
      palette[gi % palette.length],
      1.8,
    );
  });
  if (Math.max(...norm) >= 1) {
    fig.line(fig.plotLeft, ys.apply(1), fig.plotRight, ys.apply(1), "#bbb", 1);
    fig.text(fig.plotLeft + 4, ys.apply(1) - 4, "||K|| = 1", { size: 11, fill: "#888" });
  }
  return fig.toString();
}
