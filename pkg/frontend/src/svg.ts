/**
 * Minimal SVG assembly: elements, escaping, and number formatting.
 *
 * All output is built from plain string concatenation with fixed attribute
 * order and locale-independent number formatting, so identical inputs
 * produce byte-identical documents — the property the golden-file tests
 * pin down.
 */

export type Attrs = Record<string, string | number>;

const ESCAPES: Record<string, string> = {
  "&": "&amp;",
  "<": "&lt;",
  ">": "&gt;",
  '"': "&quot;",
};

export function esc(text: string): string {
  return text.replace(/[&<>"]/g, (c) => ESCAPES[c] as string);
}

/** Pixel coordinates: two decimals, trailing zeros and "-0" removed. */
export function px(value: number): string {
  let out = value.toFixed(2);
  if (out.includes(".")) out = out.replace(/\.?0+$/, "");
  return out === "-0" ? "0" : out;
}

/**
 * Tick and legend labels: shortest unambiguous decimal.  Values far from 1
 * switch to exponent notation so axes stay readable for tiny MSEs.
 */
export function fmtValue(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) {
    const [mantissa, exponent] = value.toExponential(2).split("e") as [string, string];
    const trimmed = mantissa.replace(/\.?0+$/, "");
    return `${trimmed}e${exponent}`;
  }
  return String(Number(value.toPrecision(10)));
}

function attrText(attrs: Attrs): string {
  const parts: string[] = [];
  for (const [key, value] of Object.entries(attrs)) {
    const text = typeof value === "number" ? px(value) : value;
    parts.push(` ${key}="${text}"`);
  }
  return parts.join("");
}

/** A container element with children, one per line. */
export function el(name: string, attrs: Attrs, children: string[]): string {
  return `<${name}${attrText(attrs)}>\n${children.join("\n")}\n</${name}>`;
}

/** A self-closing element. */
export function leaf(name: string, attrs: Attrs): string {
  return `<${name}${attrText(attrs)}/>`;
}

/** A text element (content is escaped here). */
export function text(content: string, attrs: Attrs): string {
  return `<text${attrText(attrs)}>${esc(content)}</text>`;
}

/** Polyline path data through pixel points: "M x,y L x,y ...". */
export function pathThrough(points: Array<[number, number]>): string {
  return points
    .map(([x, y], i) => `${i === 0 ? "M" : "L"}${px(x)},${px(y)}`)
    .join(" ");
}

export function document(width: number, height: number, children: string[]): string {
  const root = el(
    "svg",
    {
      xmlns: "http://www.w3.org/2000/svg",
      width,
      height,
      viewBox: `0 0 ${px(width)} ${px(height)}`,
      "font-family": "sans-serif",
    },
    children,
  );
  return `<?xml version="1.0" encoding="UTF-8"?>\n${root}\n`;
}
