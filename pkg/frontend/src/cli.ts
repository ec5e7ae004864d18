#!/usr/bin/env node
/**
 * plots — render block-maxima Monte Carlo summary CSVs to SVG figures.
 *
 * Usage:
 *   plots --in summary.csv --kind fixed_n_triptych --out fig.svg
 *   plots --in a.csv --in b.csv --kind fixed_m_mse --out fig.svg [options]
 *
 * Exit codes: 0 success, 2 bad usage / malformed or unusable input,
 * 4 file I/O failure.
 */

import { readFileSync, realpathSync, writeFileSync } from "node:fs";
import process from "node:process";
import { pathToFileURL } from "node:url";

import { SchemaError } from "./schema.js";
import {
  DataError,
  FIGURE_KINDS,
  renderFigure,
  type AxisOptions,
  type FigureKind,
  type PlotSpec,
} from "./render.js";

export const USAGE = `usage: plots --in SUMMARY_CSV [--in SUMMARY_CSV ...] --kind KIND --out FIG_SVG
               [--width PX] [--height PX] [--title TEXT] [--log-y]

Render a figure from Monte Carlo summary CSVs (header
mode,n,m,k,N,B_sum,Var_sum,MSE_sum with # key=value metadata comments).

kinds:
  fixed_n_triptych  B_sum / Var_sum / MSE_sum panels against the number of
                    blocks k (log-scaled x); one input CSV with one row group
  fixed_m_mse       MSE_sum against k, one curve per labelled row group
                    (# lambda_u=... comments); levels 0.25 / 0.5 / 0.75 are
                    drawn solid / dashed / dotted

options:
  --in PATH     input summary CSV (repeatable; fixed_m_mse overlays them)
  --kind KIND   one of: fixed_n_triptych, fixed_m_mse
  --out PATH    output SVG path ("-" writes the SVG to stdout)
  --width PX    figure width in pixels
  --height PX   figure height in pixels
  --title TEXT  replace the default title line
  --log-y       log-scale the y axes
  --help        show this message
`;

/** Raised for malformed command lines. */
export class UsageError extends Error {
  override name = "UsageError";
}

function takeValue(argv: string[], i: number, flag: string): string {
  const value = argv[i + 1];
  if (value === undefined) {
    throw new UsageError(`${flag} needs a value`);
  }
  return value;
}

function parsePixels(raw: string, flag: string): number {
  const value = Number(raw);
  if (!Number.isFinite(value) || value <= 0) {
    throw new UsageError(`${flag} needs a positive number, got ${raw}`);
  }
  return value;
}

/** Parse argv (without the node/script prefix) into a PlotSpec, or null for --help. */
export function parseArgs(argv: string[]): PlotSpec | null {
  const inputs: string[] = [];
  let kind: string | undefined;
  let output: string | undefined;
  const axes: AxisOptions = {};

  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i] as string;
    switch (arg) {
      case "--help":
      case "-h":
        return null;
      case "--in":
        inputs.push(takeValue(argv, i, arg));
        i++;
        break;
      case "--kind":
        kind = takeValue(argv, i, arg);
        i++;
        break;
      case "--out":
        output = takeValue(argv, i, arg);
        i++;
        break;
      case "--width":
        axes.width = parsePixels(takeValue(argv, i, arg), arg);
        i++;
        break;
      case "--height":
        axes.height = parsePixels(takeValue(argv, i, arg), arg);
        i++;
        break;
      case "--title":
        axes.title = takeValue(argv, i, arg);
        i++;
        break;
      case "--log-y":
        axes.logY = true;
        break;
      default:
        throw new UsageError(`unknown argument ${arg}`);
    }
  }

  if (inputs.length === 0) throw new UsageError("at least one --in CSV is required");
  if (kind === undefined) throw new UsageError("--kind is required");
  if (!(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new UsageError(
      `unknown kind ${kind}; expected one of: ${FIGURE_KINDS.join(", ")}`,
    );
  }
  if (output === undefined) throw new UsageError("--out is required");
  return { inputs, kind: kind as FigureKind, output, axes };
}

/** Read the spec's inputs, render, and write the SVG (the impure wrapper). */
export function render(spec: PlotSpec): void {
  const inputs = spec.inputs.map((path) => {
    try {
      return { name: path, text: readFileSync(path, "utf-8") };
    } catch (error) {
      throw ioError(`cannot read ${path}`, error);
    }
  });
  const svg = renderFigure(spec.kind, inputs, spec.axes ?? {});
  if (spec.output === "-") {
    process.stdout.write(svg);
    return;
  }
  try {
    writeFileSync(spec.output, svg, "utf-8");
  } catch (error) {
    throw ioError(`cannot write ${spec.output}`, error);
  }
}

function ioError(prefix: string, cause: unknown): Error {
  const detail = cause instanceof Error ? cause.message : String(cause);
  const error = new Error(`${prefix}: ${detail}`);
  error.name = "IoError";
  return error;
}

export function main(argv: string[]): number {
  let spec: PlotSpec | null;
  try {
    spec = parseArgs(argv);
  } catch (error) {
    if (error instanceof UsageError) {
      process.stderr.write(`plots: ${error.message}\n${USAGE}`);
      return 2;
    }
    throw error;
  }
  if (spec === null) {
    process.stdout.write(USAGE);
    return 0;
  }
  try {
    render(spec);
  } catch (error) {
    if (error instanceof SchemaError || error instanceof DataError) {
      process.stderr.write(`plots: ${error.message}\n`);
      return 2;
    }
    if (error instanceof Error && error.name === "IoError") {
      process.stderr.write(`plots: ${error.message}\n`);
      return 4;
    }
    throw error;
  }
  return 0;
}

function invokedDirectly(): boolean {
  const entry = process.argv[1];
  if (entry === undefined) return false;
  try {
    return import.meta.url === pathToFileURL(realpathSync(entry)).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  process.exit(main(process.argv.slice(2)));
}
