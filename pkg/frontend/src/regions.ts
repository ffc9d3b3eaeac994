/** Closed-form inclusion-region quantities re-evaluated from CSV-carried
 * (q, m, C-hat).  Only moduli enter, so no complex branch cuts are needed:
 * |k(z)| = |z^2 - m^2|^{1/4} and |zeta(z)| = |z + m| / |k|^2.
 */

export interface Complex {
  re: number;
  im: number;
}

function cabs(re: number, im: number): number {
  return Math.hypot(re, im);
}

/** |k(z)|^{2q-2} / (1 + |zeta| + 1/|zeta|)^q. */
export function regionLhs(z: Complex, m: number, q: number): number {
  const w2re = z.re * z.re - z.im * z.im - m * m;
  const w2im = 2 * z.re * z.im;
  const kAbs = Math.pow(cabs(w2re, w2im), 0.25);
  if (kAbs === 0) {
    return Number.POSITIVE_INFINITY;
  }
  const zetaAbs = cabs(z.re + m, z.im) / (kAbs * kAbs);
  if (zetaAbs === 0) {
    return 0;
  }
  return Math.pow(kAbs, 2 * q - 2) / Math.pow(1 + zetaAbs + 1 / zetaAbs, q);
}

export const SADDLE_VALUE = 1 / 16;

/** Radius of {|z - c|^{q-1} <= bound}; Infinity when the power degenerates. */
export function lobeRadius(bound: number, q: number): number {
  if (q <= 1 || bound <= 0) {
    return Number.POSITIVE_INFINITY;
  }
  return Math.pow(bound, 1 / (q - 1));
}

/** Marching squares: level-0 contour segments of f on an nx-by-ny grid. */
export function contourSegments(
  f: (x: number, y: number) => number,
  x0: number,
  x1: number,
  y0: number,
  y1: number,
  n: number,
): Array<[number, number, number, number]> {
  const xs = new Array(n + 1).fill(0).map((_, i) => x0 + ((x1 - x0) * i) / n);
  const ys = new Array(n + 1).fill(0).map((_, j) => y0 + ((y1 - y0) * j) / n);
  const vals: number[][] = xs.map((x) => ys.map((y) => f(x, y)));
  const segs: Array<[number, number, number, number]> = [];

  const cross = (va: number, vb: number) => va * vb < 0;
  const lerp = (a: number, b: number, va: number, vb: number) => a + (va / (va - vb)) * (b - a);

  for (let i = 0; i < n; i++) {
    for (let j = 0; j < n; j++) {
      const v00 = vals[i][j];
      const v10 = vals[i + 1][j];
      const v01 = vals[i][j + 1];
      const v11 = vals[i + 1][j + 1];
      const pts: Array<[number, number]> = [];
      if (cross(v00, v10)) pts.push([lerp(xs[i], xs[i + 1], v00, v10), ys[j]]);
      if (cross(v01, v11)) pts.push([lerp(xs[i], xs[i + 1], v01, v11), ys[j + 1]]);
      if (cross(v00, v01)) pts.push([xs[i], lerp(ys[j], ys[j + 1], v00, v01)]);
      if (cross(v10, v11)) pts.push([xs[i + 1], lerp(ys[j], ys[j + 1], v10, v11)]);
      if (pts.length >= 2) {
        // ambiguous saddle cells (4 crossings) are split arbitrarily
        for (let k = 0; k + 1 < pts.length; k += 2) {
          segs.push([pts[k][0], pts[k][1], pts[k + 1][0], pts[k + 1][1]]);
        }
      }
    }
  }
  return segs;
}
