/** Minimal deterministic SVG scene builder with linear/log axes. */

export interface Margin {
  top: number;
  right: number;
  bottom: number;
  left: number;
}

const DEFAULT_MARGIN: Margin = { top: 36, right: 24, bottom: 46, left: 64 };

export type ScaleKind = "linear" | "log";

export class Scale {
  constructor(
    readonly kind: ScaleKind,
    readonly domain: [number, number],
    readonly range: [number, number],
  ) {
    if (kind === "log" && (domain[0] <= 0 || domain[1] <= 0)) {
      throw new Error(`log scale needs a positive domain, got [${domain}]`);
    }
  }

  private t(v: number): number {
    return this.kind === "log" ? Math.log10(v) : v;
  }

  apply(v: number): number {
    const [d0, d1] = [this.t(this.domain[0]), this.t(this.domain[1])];
    const u = d1 === d0 ? 0.5 : (this.t(v) - d0) / (d1 - d0);
    return this.range[0] + u * (this.range[1] - this.range[0]);
  }

  ticks(count = 6): number[] {
    const [a, b] = this.domain;
    if (this.kind === "log") {
      const lo = Math.ceil(Math.log10(a) - 1e-9);
      const hi = Math.floor(Math.log10(b) + 1e-9);
      const out: number[] = [];
      const stride = Math.max(1, Math.round((hi - lo) / count));
      for (let e = lo; e <= hi; e += stride) out.push(Math.pow(10, e));
      return out.length >= 2 ? out : [a, b];
    }
    const span = b - a;
    if (span <= 0) return [a];
    const step = Math.pow(10, Math.floor(Math.log10(span / count)));
    const mult = span / count / step >= 5 ? 5 : span / count / step >= 2 ? 2 : 1;
    const s = step * mult;
    const out: number[] = [];
    for (let v = Math.ceil(a / s) * s; v <= b + 1e-12 * Math.abs(span); v += s) {
      out.push(Number(v.toFixed(12)));
    }
    return out;
  }
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const av = Math.abs(v);
  if (av >= 0.01 && av < 10000) {
    return Number(v.toPrecision(4)).toString();
  }
  return v.toExponential(0);
}

export class Figure {
  private body: string[] = [];

  constructor(
    readonly width = 720,
    readonly height = 480,
    readonly margin: Margin = DEFAULT_MARGIN,
  ) {}

  get plotLeft(): number {
    return this.margin.left;
  }
  get plotRight(): number {
    return this.width - this.margin.right;
  }
  get plotTop(): number {
    return this.margin.top;
  }
  get plotBottom(): number {
    return this.height - this.margin.bottom;
  }

  xScale(kind: ScaleKind, lo: number, hi: number): Scale {
    return new Scale(kind, [lo, hi], [this.plotLeft, this.plotRight]);
  }

  yScale(kind: ScaleKind, lo: number, hi: number): Scale {
    return new Scale(kind, [lo, hi], [this.plotBottom, this.plotTop]);
  }

  add(el: string): void {
    this.body.push(el);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke = "#333", width = 1): void {
    this.add(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke = "#1f77b4", width = 1.5): void {
    const d = pts.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    this.add(`<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"/>`);
  }

  circle(cx: number, cy: number, r: number, fill = "#d62728", opacity = 1.0): void {
    this.add(
      `<circle cx="${r2(cx)}" cy="${r2(cy)}" r="${r2(r)}" fill="${fill}" opacity="${opacity}"/>`,
    );
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string } = {}): void {
    const size = opts.size ?? 13;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222";
    this.add(
      `<text x="${r2(x)}" y="${r2(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}" font-family="sans-serif">${escapeXml(s)}</text>`,
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string, title: string): void {
    this.line(this.plotLeft, this.plotBottom, this.plotRight, this.plotBottom);
    this.line(this.plotLeft, this.plotBottom, this.plotLeft, this.plotTop);
    for (const t of xs.ticks()) {
      const px = xs.apply(t);
      this.line(px, this.plotBottom, px, this.plotBottom + 5);
      this.text(px, this.plotBottom + 20, fmtTick(t), { anchor: "middle", size: 11 });
    }
    for (const t of ys.ticks()) {
      const py = ys.apply(t);
      this.line(this.plotLeft - 5, py, this.plotLeft, py);
      this.text(this.plotLeft - 8, py + 4, fmtTick(t), { anchor: "end", size: 11 });
    }
    this.text((this.plotLeft + this.plotRight) / 2, this.height - 10, xLabel, {
      anchor: "middle",
    });
    this.add(
      `<text x="16" y="${r2((this.plotTop + this.plotBottom) / 2)}" font-size="13" ` +
        `text-anchor="middle" fill="#222" font-family="sans-serif" ` +
        `transform="rotate(-90 16 ${r2((this.plotTop + this.plotBottom) / 2)})">${escapeXml(yLabel)}</text>`,
    );
    this.text((this.plotLeft + this.plotRight) / 2, 20, title, { anchor: "middle", size: 15 });
  }

  toString(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}">\n<rect width="100%" height="100%" fill="white"/>\n` +
      this.body.join("\n") +
      "\n</svg>\n"
    );
  }
}

function r2(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Diverging blue-white-red map for t in [-1, 1]. */
export function divergingColor(t: number): string {
  const u = Math.max(-1, Math.min(1, t));
  const mix = (a: number, b: number, s: number) => Math.round(a + (b - a) * s);
  let rgb: [number, number, number];
  if (u < 0) {
    rgb = [mix(255, 33, -u), mix(255, 102, -u), mix(255, 172, -u)];
  } else {
    rgb = [mix(255, 178, u), mix(255, 24, u), mix(255, 43, u)];
  }
  return `rgb(${rgb[0]},${rgb[1]},${rgb[2]})`;
}
