#!/usr/bin/env node
/** plot <kind> --in <csv> [--constant C] --out <svg> */

import { readFileSync, writeFileSync } from "node:fs";
import { SchemaError, parseCsv } from "./csv.js";
import { FIGURE_KINDS, FigureKind, FigureOptions, render } from "./figures.js";

export function main(argv: string[]): number {
  let kind: string | undefined;
  let input: string | undefined;
  let output: string | undefined;
  let constant: number | undefined;

  const args = [...argv];
  while (args.length > 0) {
    const a = args.shift()!;
    if (a === "--in") {
      input = args.shift();
    } else if (a === "--out") {
      output = args.shift();
    } else if (a === "--constant") {
      const raw = args.shift();
      constant = raw === undefined ? undefined : Number(raw);
      if (constant === undefined || !Number.isFinite(constant)) {
        process.stderr.write(`error: --constant needs a finite number, got '${raw}'\n`);
        return 2;
      }
    } else if (a === "--help" || a === "-h") {
      process.stdout.write(usage());
      return 0;
    } else if (!kind) {
      kind = a;
    } else {
      process.stderr.write(`error: unexpected argument '${a}'\n${usage()}`);
      return 2;
    }
  }

  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    process.stderr.write(`error: figure kind must be one of ${FIGURE_KINDS.join(", ")}\n`);
    return 2;
  }
  if (!input || !output) {
    process.stderr.write(`error: --in and --out are required\n${usage()}`);
    return 2;
  }

  let text: string;
  try {
    text = readFileSync(input, "utf8");
  } catch (err) {
    process.stderr.write(`error: cannot read ${input}: ${(err as Error).message}\n`);
    return 2;
  }

  const opts: FigureOptions = {};
  if (constant !== undefined) {
    opts.constant = constant;
  }

  let svg: string;
  try {
    svg = render(kind as FigureKind, parseCsv(text), opts);
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    throw err;
  }

  writeFileSync(output, svg, "utf8");
  process.stdout.write(`${kind}: ${input} -> ${output} (${svg.length} bytes)\n`);
  return 0;
}

function usage(): string {
  return `usage: plot <kind> --in <csv> [--constant C] --out <svg>\n  kinds: ${FIGURE_KINDS.join(", ")}\n`;
}

const entry = process.argv[1] ?? "";
if (entry.endsWith("cli.js") || entry.endsWith("plot")) {
  process.exit(main(process.argv.slice(2)));
}
