/**
 * render --in <sweep dir> --out <figure dir>
 *
 * Reads metrics.csv and summary.csv from the input directory and writes the
 * five standard SVG figures. Inputs are never modified; existing outputs
 * are overwritten.
 */

import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { CsvFormatError, parseSchemaCsv } from "./csv.js";
import { buildFigures } from "./figures.js";

function usage(): string {
  return "usage: render --in <sweep dir> --out <figure dir>";
}

export function parseArgs(argv: string[]): { inDir: string; outDir: string } {
  const args = [...argv];
  if (args[0] === "render") {
    args.shift();
  }
  let inDir = "";
  let outDir = "";
  while (args.length > 0) {
    const flag = args.shift();
    if (flag === "--in") {
      inDir = args.shift() ?? "";
    } else if (flag === "--out") {
      outDir = args.shift() ?? "";
    } else {
      throw new Error(`unknown argument "${flag}"\n${usage()}`);
    }
  }
  if (!inDir || !outDir) {
    throw new Error(usage());
  }
  return { inDir, outDir };
}

export function render(inDir: string, outDir: string): string[] {
  const metrics = parseSchemaCsv(
    readFileSync(join(inDir, "metrics.csv"), "utf-8"),
    "metrics.csv",
  );
  const summary = parseSchemaCsv(
    readFileSync(join(inDir, "summary.csv"), "utf-8"),
    "summary.csv",
  );
  const figures = buildFigures(metrics, summary);
  mkdirSync(outDir, { recursive: true });
  const written: string[] = [];
  for (const [name, svg] of figures) {
    const path = join(outDir, name);
    writeFileSync(path, svg, "utf-8");
    written.push(path);
  }
  return written;
}

export function main(argv: string[]): number {
  try {
    const { inDir, outDir } = parseArgs(argv);
    for (const path of render(inDir, outDir)) {
      console.log(path);
    }
    return 0;
  } catch (err) {
    if (err instanceof CsvFormatError || err instanceof Error) {
      console.error(err.message);
      return 1;
    }
    throw err;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
