/**
 * The two figure kinds rendered from sweep CSVs.
 *
 * The plotter never recomputes bounds or spreading: it draws exactly what
 * the certification harness emitted, and fails on inputs that violate the
 * figure's preconditions instead of guessing.
 */

import { SweepRecord } from "./csv.js";
import { FrameOptions, Series, linearScale, logScale, renderFrame } from "./svg.js";

export class PlotDataError extends Error {}

const FRAME: FrameOptions = {
  width: 720,
  height: 480,
  margin: { top: 40, right: 30, bottom: 48, left: 64 },
  xLabel: "",
  yLabel: "",
  title: "",
};

function range(values: number[]): [number, number] {
  return [Math.min(...values), Math.max(...values)];
}

function padLog([lo, hi]: [number, number]): [number, number] {
  return [lo / 1.5, hi * 1.5];
}

/** Indices of the central share of records when ordered by mu. */
export function midRange(count: number, fraction = 0.6): [number, number] {
  const drop = Math.floor((count * (1 - fraction)) / 2);
  return [drop, count - drop - 1];
}

export interface MuSweepOptions {
  annotations?: boolean;
}

export function renderMuSweepPlot(records: SweepRecord[], options: MuSweepOptions = {}): string {
  if (records.length < 3) {
    throw new PlotDataError(`mu-sweep figure needs at least 3 rows, got ${records.length}`);
  }
  const sorted = [...records].sort((a, b) => a.mu - b.mu);
  for (const r of sorted) {
    if (r.mu <= 0 || r.xi_measured <= 0 || r.bound <= 0) {
      throw new PlotDataError(
        `log-log axes need positive mu, xi_measured and bound (mu=${r.mu}: xi=${r.xi_measured}, bound=${r.bound})`,
      );
    }
  }
  const annotate = options.annotations ?? true;

  const mus = sorted.map((r) => r.mu);
  const floor = sorted[0].floor;
  const yValues = sorted.flatMap((r) => [r.xi_measured, r.bound]);
  if (annotate && floor > 0) yValues.push(floor);

  const x = logScale(padLog(range(mus)), [FRAME.margin.left, FRAME.width - FRAME.margin.right]);
  const y = logScale(padLog(range(yValues)), [FRAME.height - FRAME.margin.bottom, FRAME.margin.top]);

  const series: Series[] = [
    {
      id: "xi-series",
      points: sorted.map((r) => [r.mu, r.xi_measured]),
      stroke: "#1f77b4",
      label: "measured spreading",
      markers: true,
    },
    {
      id: "bound-series",
      points: sorted.map((r) => [r.mu, r.bound]),
      stroke: "#ff7f0e",
      dash: "6 3",
      label: "certified bound",
    },
  ];

  if (annotate) {
    if (floor > 0) {
      series.push({
        id: "floor-line",
        points: [
          [mus[0], floor],
          [mus[mus.length - 1], floor],
        ],
        stroke: "#444444",
        dash: "2 3",
        label: "feasibility floor",
      });
    }
    // inverse square-root guide anchored at the bound's first mid-range point
    const [lo, hi] = midRange(sorted.length);
    const anchor = sorted[lo];
    series.push({
      id: "slope-ref",
      points: sorted.slice(lo, hi + 1).map((r) => [
        r.mu,
        anchor.bound * Math.sqrt(anchor.mu / r.mu),
      ]),
      stroke: "#2ca02c",
      dash: "8 3 2 3",
      label: "slope -1/2 reference",
    });
  }

  return renderFrame(
    {
      ...FRAME,
      title: `spreading vs regularisation strength (rho=${sorted[0].rho})`,
      xLabel: "regularisation strength mu (log)",
      yLabel: "spreading (log)",
    },
    x,
    y,
    series,
  );
}

export function renderRhoSweepPlot(records: SweepRecord[]): string {
  if (records.length === 0) {
    throw new PlotDataError("rho-sweep figure needs at least one row");
  }
  const mus = new Set(records.map((r) => r.mu));
  if (mus.size !== 1) {
    throw new PlotDataError(
      `rho-sweep rows must share one mu, found ${[...mus].join(", ")}`,
    );
  }
  if (records.length === 1) {
    console.warn("rho sweep has a single admissible point; rendering a degenerate plot");
  }
  const sorted = [...records].sort((a, b) => a.rho - b.rho);
  const rhos = sorted.map((r) => r.rho);
  const yValues = sorted.flatMap((r) => [r.xi_measured, r.bound]);

  const [rhoLo, rhoHi] = range(rhos);
  const x = linearScale(
    [Math.min(rhoLo, 0), Math.max(rhoHi * 1.05, rhoHi + 1e-6)],
    [FRAME.margin.left, FRAME.width - FRAME.margin.right],
  );
  const y = linearScale(
    [0, Math.max(...yValues) * 1.1 || 1],
    [FRAME.height - FRAME.margin.bottom, FRAME.margin.top],
  );

  const series: Series[] = [
    {
      id: "xi-series",
      points: sorted.map((r) => [r.rho, r.xi_measured]),
      stroke: "#1f77b4",
      label: "measured spreading",
      markers: true,
    },
    {
      id: "bound-series",
      points: sorted.map((r) => [r.rho, r.bound]),
      stroke: "#ff7f0e",
      dash: "6 3",
      label: "certified bound",
      markers: true,
    },
  ];

  // mark where the stability margin binds hardest
  const tightest = sorted.reduce((a, b) => (b.stability_margin < a.stability_margin ? b : a));
  const annotations = [
    `<text id="margin-note" x="${FRAME.width - FRAME.margin.right - 6}" ` +
      `y="${FRAME.height - FRAME.margin.bottom - 8}" text-anchor="end" fill="#666">` +
      `min stability margin ${tightest.stability_margin.toPrecision(3)} at rho=${tightest.rho}</text>`,
  ];

  return renderFrame(
    {
      ...FRAME,
      title: `spreading vs propagation factor (mu=${sorted[0].mu})`,
      xLabel: "propagation factor rho",
      yLabel: "spreading",
    },
    x,
    y,
    series,
    annotations,
  );
}
