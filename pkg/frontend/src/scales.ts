/**
 * Axis scales and tick placement.
 *
 * Everything here is a pure function of its numeric inputs, so a figure
 * rendered twice from the same data lands on identical coordinates.
 */

export interface Scale {
  /** Map a data value to a pixel position. */
  pos(value: number): number;
  /** Tick values inside the domain, ascending. */
  ticks: number[];
  domain: [number, number];
  range: [number, number];
}

/** Round away float fuzz from tick arithmetic (0.30000000000000004 -> 0.3). */
export function snap(value: number): number {
  if (value === 0) return 0; // normalizes -0 from ceil/floor arithmetic
  if (!Number.isFinite(value)) return value;
  return Number(value.toPrecision(12));
}

/** The largest {1,2,5}*10^e step not exceeding `raw`. */
function niceStepBelow(raw: number): number {
  const exponent = Math.floor(Math.log10(raw));
  const base = Math.pow(10, exponent);
  const mantissa = raw / base;
  let nice = 1;
  if (mantissa >= 5) nice = 5;
  else if (mantissa >= 2) nice = 2;
  return snap(nice * base);
}

/**
 * Round tick values covering [lo, hi], aiming for about `count` intervals.
 * The endpoints themselves need not be ticks.
 */
export function linearTicks(lo: number, hi: number, count = 5): number[] {
  if (!(hi > lo)) return [snap(lo)];
  const step = niceStepBelow((hi - lo) / Math.max(1, count));
  const first = Math.ceil(lo / step - 1e-9);
  const last = Math.floor(hi / step + 1e-9);
  const ticks: number[] = [];
  for (let i = first; i <= last; i++) {
    ticks.push(snap(i * step));
  }
  return ticks;
}

/**
 * Ticks for a logarithmic axis: mantissas {1, 2, 5} at every decade
 * intersecting [lo, hi] (both ends must be positive).  Falls back to
 * linear ticks when the span is too narrow to catch two of them.
 */
export function logTicks(lo: number, hi: number): number[] {
  if (!(lo > 0) || !(hi > lo)) return [snap(lo)];
  const ticks: number[] = [];
  const eLo = Math.floor(Math.log10(lo));
  const eHi = Math.ceil(Math.log10(hi));
  for (let e = eLo; e <= eHi; e++) {
    for (const mantissa of [1, 2, 5]) {
      const value = snap(mantissa * Math.pow(10, e));
      if (value >= lo * (1 - 1e-9) && value <= hi * (1 + 1e-9)) {
        ticks.push(value);
      }
    }
  }
  return ticks.length >= 2 ? ticks : linearTicks(lo, hi);
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const slope = d1 === d0 ? 0 : (r1 - r0) / (d1 - d0);
  return {
    pos: (value) => r0 + (value - d0) * slope,
    ticks: linearTicks(d0, d1),
    domain,
    range,
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new RangeError(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const [r0, r1] = range;
  const slope = l1 === l0 ? 0 : (r1 - r0) / (l1 - l0);
  return {
    pos: (value) => r0 + (Math.log10(value) - l0) * slope,
    ticks: logTicks(d0, d1),
    domain,
    range,
  };
}

/** Pad [lo, hi] by a fraction of its width (in log space when `log`). */
export function padDomain(lo: number, hi: number, fraction: number, log = false): [number, number] {
  if (log) {
    const factor = Math.pow(hi / lo, fraction);
    return [lo / factor, hi * factor];
  }
  const pad = (hi - lo) * fraction;
  if (pad === 0) {
    const unit = lo === 0 ? 1 : Math.abs(lo) * fraction;
    return [lo - unit, hi + unit];
  }
  return [lo - pad, hi + pad];
}
