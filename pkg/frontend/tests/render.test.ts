import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, test } from "vitest";

import { DataError, renderFigure, type CsvInput } from "../src/render.js";
import { SchemaError, SUMMARY_COLUMNS } from "../src/schema.js";

const here = path.dirname(fileURLToPath(import.meta.url));
const fixture = (name: string) => path.join(here, "fixtures", name);
const read = (name: string) => readFileSync(fixture(name), "utf-8");
const input = (name: string): CsvInput => ({ name, text: read(name) });

const HEADER = SUMMARY_COLUMNS.join(",");

function syntheticMse(rows: Array<[number, number]>, meta = ""): string {
  const body = rows
    .map(([k, mse]) => `fixed_m,${8 * k},8,${k},4,1.0e-03,2.0e-03,${mse.toExponential(16)}`)
    .join("\n");
  return `${meta}${HEADER}\n${body}\n`;
}

describe("golden figures", () => {
  test("fixed_n_triptych matches the checked-in SVG byte for byte", () => {
    const svg = renderFigure("fixed_n_triptych", [input("fixed_n.csv")]);
    expect(svg).toBe(read("fixed_n_triptych.svg"));
  });

  test("fixed_m_mse matches the checked-in SVG byte for byte", () => {
    const svg = renderFigure("fixed_m_mse", [input("fixed_m.csv")]);
    expect(svg).toBe(read("fixed_m_mse.svg"));
  });

  test("rendering is deterministic: two runs, identical output", () => {
    const once = renderFigure("fixed_m_mse", [input("fixed_m.csv")]);
    const twice = renderFigure("fixed_m_mse", [input("fixed_m.csv")]);
    expect(twice).toBe(once);
  });
});

describe("figure content", () => {
  test("three tail-dependence levels get solid, dashed, dotted strokes", () => {
    const svg = renderFigure("fixed_m_mse", [input("fixed_m.csv")]);
    const curves = svg.split("\n").filter((line) => line.startsWith("<path"));
    expect(curves).toHaveLength(3);
    expect(curves[0]).not.toContain("stroke-dasharray");
    expect(curves[1]).toContain('stroke-dasharray="7 4"');
    expect(curves[2]).toContain('stroke-dasharray="1.5 3.5"');
    expect(svg).toContain(">lambda_u = 0.25<");
    expect(svg).toContain(">lambda_u = 0.5<");
    expect(svg).toContain(">lambda_u = 0.75<");
  });

  test("the triptych draws one panel per error column on a log-x axis", () => {
    const svg = renderFigure("fixed_n_triptych", [input("fixed_n.csv")]);
    for (const panelTitle of ["B_sum", "Var_sum", "MSE_sum"]) {
      expect(svg).toContain(`>${panelTitle}<`);
    }
    // log ticks for k in [20, 240]: mantissas {1,2,5} only
    for (const tick of [20, 50, 100, 200]) {
      expect(svg).toContain(`>${tick}<`);
    }
    expect(svg).not.toContain(">60<");
  });

  test("legend labels fall back to file names when levels are unlabelled", () => {
    const a: CsvInput = { name: "runs/desk.csv", text: syntheticMse([[10, 0.5], [20, 0.25]]) };
    const b: CsvInput = { name: "runs/full.csv", text: syntheticMse([[10, 0.4], [20, 0.2]]) };
    const svg = renderFigure("fixed_m_mse", [a, b]);
    expect(svg).toContain(">desk<");
    expect(svg).toContain(">full<");
    const solo = renderFigure("fixed_m_mse", [a]);
    expect(solo).toContain(">group 1<");
  });

  test("file-level lambda_u labels a file whose rows are ungrouped", () => {
    const a: CsvInput = {
      name: "a.csv",
      text: syntheticMse([[10, 0.5], [20, 0.25]], "# lambda_u=2.5000000000000000e-01\n"),
    };
    const svg = renderFigure("fixed_m_mse", [a]);
    expect(svg).toContain(">lambda_u = 0.25<");
  });

  test("axis options change the geometry and the title", () => {
    const svg = renderFigure("fixed_m_mse", [input("fixed_m.csv")], {
      width: 400,
      height: 300,
      title: "MSE, desk scale",
    });
    expect(svg).toContain('width="400" height="300"');
    expect(svg).toContain(">MSE, desk scale<");
    expect(svg).not.toBe(read("fixed_m_mse.svg"));
  });

  test("log-y draws decade-style ticks for positive data", () => {
    const svg = renderFigure("fixed_m_mse", [input("fixed_m.csv")], { logY: true });
    expect(svg).toContain(">0.01<");
    expect(svg).toContain(">0.1<");
    expect(svg).toContain(">0.5<");
    expect(svg).not.toContain(">0.3<"); // a linear-axis tick; absent on mantissa ticks
  });
});

describe("unusable input", () => {
  test("a header-only CSV is refused: no empty figures", () => {
    const empty: CsvInput = { name: "empty.csv", text: `# mode=fixed_m\n${HEADER}\n` };
    for (const kind of ["fixed_n_triptych", "fixed_m_mse"] as const) {
      expect(() => renderFigure(kind, [empty])).toThrow(DataError);
      expect(() => renderFigure(kind, [empty])).toThrow(/no data rows in empty.csv/);
    }
  });

  test("no inputs at all is refused", () => {
    expect(() => renderFigure("fixed_m_mse", [])).toThrow(/no input CSVs/);
  });

  test("schema errors from any input surface unchanged", () => {
    const bad: CsvInput = { name: "bad.csv", text: "a,b\n1,2\n" };
    expect(() => renderFigure("fixed_m_mse", [input("fixed_m.csv"), bad])).toThrow(SchemaError);
  });

  test("the triptych rejects multiple inputs and multi-group files", () => {
    expect(() =>
      renderFigure("fixed_n_triptych", [input("fixed_n.csv"), input("fixed_n.csv")]),
    ).toThrow(/exactly one input CSV/);
    expect(() => renderFigure("fixed_n_triptych", [input("fixed_m.csv")])).toThrow(
      /single row group, found 3/,
    );
  });

  test("nonpositive block counts cannot be drawn", () => {
    const zero: CsvInput = {
      name: "zero.csv",
      text: `${HEADER}\nfixed_m,0,8,0,4,1.0e-03,2.0e-03,3.0e-03\n`,
    };
    expect(() => renderFigure("fixed_m_mse", [zero])).toThrow(/k must be positive/);
  });

  test("log-y refuses data without positive values", () => {
    const flat: CsvInput = {
      name: "flat.csv",
      text: `${HEADER}\nfixed_m,96,8,12,4,0.0e+00,0.0e+00,0.0e+00\n`,
    };
    expect(() => renderFigure("fixed_m_mse", [flat], { logY: true })).toThrow(
      /log-scaled y axis needs positive values/,
    );
  });
});
