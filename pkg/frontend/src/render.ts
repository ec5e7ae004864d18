/**
 * Figure rendering: summary CSVs in, a deterministic SVG document out.
 *
 * Two figure kinds cover the simulation study's charts:
 *
 *   fixed_n_triptych  three panels (B_sum, Var_sum, MSE_sum) against the
 *                     number of blocks k on a log-scaled x axis, for one
 *                     sweep at a fixed series length;
 *   fixed_m_mse       MSE_sum against k at a fixed block length, one curve
 *                     per labelled row group — tail-dependence levels
 *                     0.25 / 0.5 / 0.75 get solid / dashed / dotted lines.
 *
 * `renderFigure` is a pure function of the CSV text and the options: no
 * clock, no locale, no randomness, so byte-identical inputs yield
 * byte-identical SVG.
 */

import {
  parseSummaryCsv,
  rowCount,
  type RowGroup,
  type SummaryFile,
  type SummaryRow,
} from "./schema.js";
import { linearScale, logScale, padDomain, type Scale } from "./scales.js";
import { document as svgDocument, el, fmtValue, leaf, pathThrough, px, text } from "./svg.js";

export type FigureKind = "fixed_n_triptych" | "fixed_m_mse";

export const FIGURE_KINDS: readonly FigureKind[] = ["fixed_n_triptych", "fixed_m_mse"];

export interface AxisOptions {
  /** Figure width in pixels (defaults depend on the kind). */
  width?: number;
  /** Figure height in pixels. */
  height?: number;
  /** Title line; a kind-specific default is used when omitted. */
  title?: string;
  /** Log-scale the y axes (requires strictly positive values). */
  logY?: boolean;
}

/** Everything needed to produce one figure file. */
export interface PlotSpec {
  inputs: string[];
  kind: FigureKind;
  output: string;
  axes?: AxisOptions;
}

/** One already-read input: a display name plus the raw CSV text. */
export interface CsvInput {
  name: string;
  text: string;
}

/** Structurally valid input whose content cannot make the requested figure. */
export class DataError extends Error {
  override name = "DataError";
}

const COLORS = ["#2a6fb0", "#c23b3b", "#2e8b57", "#8257b0", "#b07b2a", "#3aa0a0"];
const DASHES = ["", "7 4", "1.5 3.5", "8 3 1.5 3"]; // solid, dashed, dotted, dash-dot
const GRID = "#e0e0e0";
const FRAME = "#444444";
const INK = "#1a1a1a";
const MUTED = "#666666";

const TITLE_BAND = 52;
const TICK_LEN = 4;

interface PanelBox {
  x: number;
  y: number;
  w: number;
  h: number;
}

/** Tail-dependence levels with a fixed line style (solid, dashed, dotted). */
const CANONICAL_LEVELS = [0.25, 0.5, 0.75];

function dashForLabel(lambda: number | null, curveIndex: number): string {
  if (lambda !== null) {
    const hit = CANONICAL_LEVELS.findIndex((level) => Math.abs(level - lambda) < 1e-9);
    if (hit >= 0) return DASHES[hit] as string;
  }
  return DASHES[curveIndex % DASHES.length] as string;
}

function prettyMetaValue(raw: string): string {
  const value = Number(raw);
  return raw.trim() !== "" && Number.isFinite(value) ? fmtValue(value) : raw;
}

function subtitleFrom(meta: Record<string, string>, keys: readonly string[]): string {
  const parts: string[] = [];
  for (const key of keys) {
    const raw = meta[key];
    if (raw !== undefined) parts.push(`${key}=${prettyMetaValue(raw)}`);
  }
  return parts.join("  ");
}

function baseName(path: string): string {
  const slash = Math.max(path.lastIndexOf("/"), path.lastIndexOf("\\"));
  const name = path.slice(slash + 1);
  return name.endsWith(".csv") ? name.slice(0, -4) : name;
}

/** Frame, grid lines, tick marks, and tick labels for one panel. */
function panelChrome(
  box: PanelBox,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  title?: string,
): string[] {
  const parts: string[] = [];
  for (const tick of yScale.ticks) {
    const y = yScale.pos(tick);
    parts.push(
      leaf("line", { x1: box.x, y1: y, x2: box.x + box.w, y2: y, stroke: GRID, "stroke-width": 1 }),
    );
  }
  for (const tick of xScale.ticks) {
    const x = xScale.pos(tick);
    parts.push(
      leaf("line", { x1: x, y1: box.y, x2: x, y2: box.y + box.h, stroke: GRID, "stroke-width": 1 }),
    );
  }
  parts.push(
    leaf("rect", {
      x: box.x,
      y: box.y,
      width: box.w,
      height: box.h,
      fill: "none",
      stroke: FRAME,
      "stroke-width": 1,
    }),
  );
  for (const tick of xScale.ticks) {
    const x = xScale.pos(tick);
    const yBase = box.y + box.h;
    parts.push(
      leaf("line", { x1: x, y1: yBase, x2: x, y2: yBase + TICK_LEN, stroke: FRAME, "stroke-width": 1 }),
    );
    parts.push(
      text(fmtValue(tick), {
        x,
        y: yBase + TICK_LEN + 12,
        "font-size": 11,
        fill: INK,
        "text-anchor": "middle",
      }),
    );
  }
  for (const tick of yScale.ticks) {
    const y = yScale.pos(tick);
    parts.push(
      leaf("line", { x1: box.x - TICK_LEN, y1: y, x2: box.x, y2: y, stroke: FRAME, "stroke-width": 1 }),
    );
    parts.push(
      text(fmtValue(tick), {
        x: box.x - TICK_LEN - 4,
        y: y + 3.5,
        "font-size": 11,
        fill: INK,
        "text-anchor": "end",
      }),
    );
  }
  parts.push(
    text(xLabel, {
      x: box.x + box.w / 2,
      y: box.y + box.h + 34,
      "font-size": 12,
      fill: INK,
      "text-anchor": "middle",
    }),
  );
  if (title !== undefined) {
    parts.push(
      text(title, {
        x: box.x + box.w / 2,
        y: box.y - 8,
        "font-size": 12,
        "font-weight": "bold",
        fill: INK,
        "text-anchor": "middle",
      }),
    );
  }
  return parts;
}

/** A polyline through the points plus a marker at each one. */
function seriesMarks(
  points: Array<[number, number]>,
  color: string,
  dash: string,
): string[] {
  const parts: string[] = [];
  if (points.length > 1) {
    const attrs: Record<string, string | number> = {
      d: pathThrough(points),
      fill: "none",
      stroke: color,
      "stroke-width": 1.6,
    };
    if (dash !== "") {
      attrs["stroke-dasharray"] = dash;
      attrs["stroke-linecap"] = "round";
    }
    parts.push(leaf("path", attrs));
  }
  for (const [x, y] of points) {
    parts.push(leaf("circle", { cx: x, cy: y, r: 2.4, fill: color }));
  }
  return parts;
}

function titleBlock(width: number, title: string, subtitle: string): string[] {
  const parts = [
    text(title, {
      x: width / 2,
      y: 22,
      "font-size": 15,
      "font-weight": "bold",
      fill: INK,
      "text-anchor": "middle",
    }),
  ];
  if (subtitle !== "") {
    parts.push(
      text(subtitle, {
        x: width / 2,
        y: 40,
        "font-size": 11,
        fill: MUTED,
        "text-anchor": "middle",
      }),
    );
  }
  return parts;
}

function yDomain(values: number[], logY: boolean, context: string): [number, number] {
  const max = Math.max(...values);
  if (logY) {
    const positive = values.filter((v) => v > 0);
    if (positive.length === 0) {
      throw new DataError(`log-scaled y axis needs positive values (${context})`);
    }
    return padDomain(Math.min(...positive), Math.max(...positive), 0.08, true);
  }
  return [0, max > 0 ? max * 1.06 : 1];
}

function makeYScale(domain: [number, number], box: PanelBox, logY: boolean): Scale {
  const range: [number, number] = [box.y + box.h, box.y];
  return logY ? logScale(domain, range) : linearScale(domain, range);
}

function sortedByBlocks(rows: SummaryRow[]): SummaryRow[] {
  return [...rows].sort((a, b) => a.k - b.k);
}

function checkPositiveBlocks(file: SummaryFile): void {
  for (const group of file.groups) {
    for (const row of group.rows) {
      if (row.k <= 0) {
        throw new DataError(`block count k must be positive in ${file.name}, found k=${row.k}`);
      }
    }
  }
}

function parseFiles(inputs: CsvInput[]): SummaryFile[] {
  if (inputs.length === 0) {
    throw new DataError("no input CSVs given");
  }
  return inputs.map((input) => {
    const file = parseSummaryCsv(input.name, input.text);
    if (rowCount(file) === 0) {
      throw new DataError(`no data rows in ${file.name}; refusing to render an empty figure`);
    }
    checkPositiveBlocks(file);
    return file;
  });
}

const TRIPTYCH_COLUMNS = ["B_sum", "Var_sum", "MSE_sum"] as const;
const TRIPTYCH_META_KEYS = ["model", "family", "lambda_u", "mode", "n", "m", "n_reps", "master_seed"];
const MSE_META_KEYS = ["model", "family", "mode", "m", "n_reps", "master_seed"];

function renderTriptych(files: SummaryFile[], axes: AxisOptions): string {
  if (files.length !== 1) {
    throw new DataError(`fixed_n_triptych takes exactly one input CSV, got ${files.length}`);
  }
  const file = files[0] as SummaryFile;
  if (file.groups.length !== 1) {
    throw new DataError(
      `fixed_n_triptych needs a single row group, found ${file.groups.length} labelled groups in ${file.name}`,
    );
  }
  const rows = sortedByBlocks((file.groups[0] as RowGroup).rows);
  const width = axes.width ?? 900;
  const height = axes.height ?? 340;
  const logY = axes.logY ?? false;

  const ks = rows.map((r) => r.k);
  const xDomain = padDomain(Math.min(...ks), Math.max(...ks), 0.04, true);

  const outerPad = 8;
  const gap = 18;
  const cellW = (width - 2 * outerPad - 2 * gap) / 3;
  const margins = { left: 56, right: 6, top: 24, bottom: 48 };
  const cellTop = TITLE_BAND;
  const cellH = height - cellTop - outerPad;

  const body: string[] = [
    leaf("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    ...titleBlock(
      width,
      axes.title ?? "Summed bias, variance, and MSE against the number of blocks",
      subtitleFrom(file.meta, TRIPTYCH_META_KEYS),
    ),
  ];

  TRIPTYCH_COLUMNS.forEach((column, panelIndex) => {
    const cellX = outerPad + panelIndex * (cellW + gap);
    const box: PanelBox = {
      x: cellX + margins.left,
      y: cellTop + margins.top,
      w: cellW - margins.left - margins.right,
      h: cellH - margins.top - margins.bottom,
    };
    const xScale = logScale(xDomain, [box.x, box.x + box.w]);
    const values = rows.map((r) => r[column]);
    const yScale = makeYScale(yDomain(values, logY, `${column} in ${file.name}`), box, logY);
    body.push(...panelChrome(box, xScale, yScale, "number of blocks k", column));
    const points = rows.map(
      (r): [number, number] => [xScale.pos(r.k), yScale.pos(r[column])],
    );
    body.push(...seriesMarks(points, COLORS[panelIndex] as string, ""));
  });

  return svgDocument(width, height, body);
}

interface Curve {
  label: string;
  lambda: number | null;
  rows: SummaryRow[];
}

function curveLabel(
  file: SummaryFile,
  group: RowGroup,
  manyFiles: boolean,
  overallIndex: number,
): { label: string; lambda: number | null } {
  const raw = group.meta["lambda_u"] ?? file.meta["lambda_u"];
  if (raw !== undefined) {
    const value = Number(raw);
    if (Number.isFinite(value)) {
      return { label: `lambda_u = ${fmtValue(value)}`, lambda: value };
    }
  }
  if (manyFiles) return { label: baseName(file.name), lambda: null };
  return { label: `group ${overallIndex + 1}`, lambda: null };
}

function collectCurves(files: SummaryFile[]): Curve[] {
  const manyFiles = files.length > 1;
  const curves: Curve[] = [];
  for (const file of files) {
    for (const group of file.groups) {
      if (group.rows.length === 0) continue;
      const { label, lambda } = curveLabel(file, group, manyFiles, curves.length);
      curves.push({ label, lambda, rows: sortedByBlocks(group.rows) });
    }
  }
  return curves;
}

function legend(box: PanelBox, curves: Curve[]): string[] {
  const pad = 8;
  const entryH = 16;
  const sampleW = 26;
  const maxLabel = Math.max(...curves.map((c) => c.label.length));
  const boxW = sampleW + 8 + Math.ceil(maxLabel * 6.3) + 2 * pad;
  const boxH = curves.length * entryH + 2 * pad - 4;
  const x0 = box.x + box.w - boxW - 10;
  const y0 = box.y + 10;
  const parts: string[] = [
    leaf("rect", {
      x: x0,
      y: y0,
      width: boxW,
      height: boxH,
      fill: "#ffffff",
      "fill-opacity": "0.88",
      stroke: "#cccccc",
      "stroke-width": 1,
    }),
  ];
  curves.forEach((curve, i) => {
    const yMid = y0 + pad + i * entryH + 4;
    const color = COLORS[i % COLORS.length] as string;
    const dash = dashForLabel(curve.lambda, i);
    const attrs: Record<string, string | number> = {
      x1: x0 + pad,
      y1: yMid,
      x2: x0 + pad + sampleW,
      y2: yMid,
      stroke: color,
      "stroke-width": 1.6,
    };
    if (dash !== "") {
      attrs["stroke-dasharray"] = dash;
      attrs["stroke-linecap"] = "round";
    }
    parts.push(leaf("line", attrs));
    parts.push(
      text(curve.label, {
        x: x0 + pad + sampleW + 8,
        y: yMid + 3.5,
        "font-size": 11,
        fill: INK,
        "text-anchor": "start",
      }),
    );
  });
  return parts;
}

function renderMse(files: SummaryFile[], axes: AxisOptions): string {
  const curves = collectCurves(files);
  const width = axes.width ?? 640;
  const height = axes.height ?? 420;
  const logY = axes.logY ?? false;

  const allRows = curves.flatMap((c) => c.rows);
  const ks = allRows.map((r) => r.k);
  const xDomain = padDomain(Math.min(...ks), Math.max(...ks), 0.04);
  const values = allRows.map((r) => r.MSE_sum);

  const outerPad = 8;
  const margins = { left: 64, right: 14, top: 12, bottom: 48 };
  const box: PanelBox = {
    x: outerPad + margins.left,
    y: TITLE_BAND + margins.top,
    w: width - 2 * outerPad - margins.left - margins.right,
    h: height - TITLE_BAND - outerPad - margins.top - margins.bottom,
  };
  const xScale = linearScale(xDomain, [box.x, box.x + box.w]);
  const yScale = makeYScale(yDomain(values, logY, "MSE_sum"), box, logY);

  const firstMeta = (files[0] as SummaryFile).meta;
  const body: string[] = [
    leaf("rect", { x: 0, y: 0, width, height, fill: "#ffffff" }),
    ...titleBlock(
      width,
      axes.title ?? "Summed MSE against the number of blocks",
      subtitleFrom(firstMeta, MSE_META_KEYS),
    ),
    ...panelChrome(box, xScale, yScale, "number of blocks k"),
  ];
  body.push(
    text("MSE_sum", {
      x: 16,
      y: box.y + box.h / 2,
      "font-size": 12,
      fill: INK,
      "text-anchor": "middle",
      transform: `rotate(-90 ${px(16)} ${px(box.y + box.h / 2)})`,
    }),
  );
  curves.forEach((curve, i) => {
    const color = COLORS[i % COLORS.length] as string;
    const dash = dashForLabel(curve.lambda, i);
    const points = curve.rows.map(
      (r): [number, number] => [xScale.pos(r.k), yScale.pos(r.MSE_sum)],
    );
    body.push(...seriesMarks(points, color, dash));
  });
  body.push(...legend(box, curves));

  return svgDocument(width, height, body);
}

/**
 * Render one figure from already-read CSV inputs.
 *
 * Pure: the output depends only on the arguments.  Throws SchemaError for
 * malformed CSVs and DataError for structurally valid input that cannot
 * make the requested figure (no rows, wrong group shape, ...).
 */
export function renderFigure(
  kind: FigureKind,
  inputs: CsvInput[],
  axes: AxisOptions = {},
): string {
  const files = parseFiles(inputs);
  if (kind === "fixed_n_triptych") return renderTriptych(files, axes);
  if (kind === "fixed_m_mse") return renderMse(files, axes);
  throw new DataError(`unknown figure kind ${String(kind)}`);
}
