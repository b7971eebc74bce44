/**
 * Minimal SVG scene building: scales, axes, series paths, legends.
 *
 * Figures are assembled as plain strings so rendering stays a pure function
 * of the parsed records (no DOM, no timestamps, no randomness).
 */

export interface Scale {
  (value: number): number;
  ticks(): number[];
}

export function linearScale(domain: [number, number], range: [number, number], tickCount = 6): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => {
    const step = niceStep(span / Math.max(tickCount - 1, 1));
    const start = Math.ceil(d0 / step) * step;
    const out: number[] = [];
    for (let v = start; v <= d1 + 1e-12 * Math.abs(span); v += step) {
      out.push(roundTo(v, step));
    }
    return out;
  };
  return scale;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (d0 <= 0 || d1 <= 0) {
    throw new Error(`log scale requires a positive domain, got [${d0}, ${d1}]`);
  }
  const [r0, r1] = range;
  const l0 = Math.log10(d0);
  const l1 = Math.log10(d1);
  const span = l1 - l0 || 1;
  const scale = ((value: number) => r0 + ((Math.log10(value) - l0) / span) * (r1 - r0)) as Scale;
  scale.ticks = () => {
    const out: number[] = [];
    for (let e = Math.ceil(l0 - 1e-9); e <= Math.floor(l1 + 1e-9); e++) {
      out.push(Math.pow(10, e));
    }
    return out.length >= 2 ? out : [d0, d1];
  };
  return scale;
}

function niceStep(rough: number): number {
  const power = Math.pow(10, Math.floor(Math.log10(rough)));
  const ratio = rough / power;
  const factor = ratio >= 5 ? 10 : ratio >= 2 ? 5 : ratio >= 1 ? 2 : 1;
  return factor * power;
}

function roundTo(value: number, step: number): number {
  const digits = Math.max(0, -Math.floor(Math.log10(step)) + 1);
  return Number(value.toFixed(digits + 2));
}

export function formatTick(value: number): string {
  const exp = Math.log10(value);
  if (Number.isInteger(exp) && (value >= 1e4 || value < 1e-3)) {
    return `1e${exp}`;
  }
  return value >= 1 ? String(value) : value.toPrecision(3).replace(/0+$/, "").replace(/\.$/, "");
}

export interface Series {
  id: string;
  points: Array<[number, number]>;
  stroke: string;
  dash?: string;
  label: string;
  markers?: boolean;
}

export interface FrameOptions {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  xLabel: string;
  yLabel: string;
  title: string;
}

export function pathOf(points: Array<[number, number]>, x: Scale, y: Scale): string {
  return points
    .map(([px, py], i) => `${i === 0 ? "M" : "L"}${x(px).toFixed(2)},${y(py).toFixed(2)}`)
    .join(" ");
}

export function renderFrame(
  opts: FrameOptions,
  x: Scale,
  y: Scale,
  series: Series[],
  annotations: string[] = [],
): string {
  const { width, height, margin } = opts;
  const innerRight = width - margin.right;
  const innerBottom = height - margin.bottom;
  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<text x="${width / 2}" y="${margin.top / 2}" text-anchor="middle" font-size="14">${opts.title}</text>`);

  for (const tick of x.ticks()) {
    const px = x(tick).toFixed(2);
    parts.push(`<line x1="${px}" y1="${margin.top}" x2="${px}" y2="${innerBottom}" stroke="#ddd"/>`);
    parts.push(`<text x="${px}" y="${innerBottom + 16}" text-anchor="middle">${formatTick(tick)}</text>`);
  }
  for (const tick of y.ticks()) {
    const py = y(tick).toFixed(2);
    parts.push(`<line x1="${margin.left}" y1="${py}" x2="${innerRight}" y2="${py}" stroke="#ddd"/>`);
    parts.push(`<text x="${margin.left - 6}" y="${py}" text-anchor="end" dominant-baseline="middle">${formatTick(tick)}</text>`);
  }
  parts.push(
    `<rect x="${margin.left}" y="${margin.top}" width="${innerRight - margin.left}" ` +
      `height="${innerBottom - margin.top}" fill="none" stroke="black"/>`,
  );
  parts.push(
    `<text x="${(margin.left + innerRight) / 2}" y="${height - 8}" text-anchor="middle">${opts.xLabel}</text>`,
  );
  parts.push(
    `<text x="14" y="${(margin.top + innerBottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 14 ${(margin.top + innerBottom) / 2})">${opts.yLabel}</text>`,
  );

  for (const s of series) {
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<path id="${s.id}" d="${pathOf(s.points, x, y)}" fill="none" stroke="${s.stroke}" stroke-width="1.6"${dash}/>`,
    );
    if (s.markers) {
      for (const [px, py] of s.points) {
        parts.push(`<circle cx="${x(px).toFixed(2)}" cy="${y(py).toFixed(2)}" r="2.4" fill="${s.stroke}"/>`);
      }
    }
  }

  series.forEach((s, i) => {
    const ly = margin.top + 14 + 16 * i;
    const lx = innerRight - 150;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(`<line x1="${lx}" y1="${ly}" x2="${lx + 24}" y2="${ly}" stroke="${s.stroke}" stroke-width="1.6"${dash}/>`);
    parts.push(`<text x="${lx + 30}" y="${ly + 4}">${s.label}</text>`);
  });

  parts.push(...annotations);
  parts.push("</svg>");
  return parts.join("\n");
}
