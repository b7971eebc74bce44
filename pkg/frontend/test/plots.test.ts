import { readFileSync } from "fs";
import { describe, expect, it, vi } from "vitest";
import { CSV_COLUMNS, CSV_SCHEMA, SweepRecord, parseSweepCsv } from "../src/csv.js";
import { PlotDataError, midRange, renderMuSweepPlot, renderRhoSweepPlot } from "../src/plots.js";

function record(overrides: Partial<SweepRecord>): SweepRecord {
  return {
    mu: 1,
    rho: 0.5,
    xi_measured: 0.1,
    bound: 0.5,
    floor: 0.3,
    lambda_star: 1,
    laplacian_energy: 0.01,
    iterations: 10,
    stability_margin: 0.5,
    ...overrides,
  };
}

function muSeries(count: number): SweepRecord[] {
  return Array.from({ length: count }, (_, i) => {
    const mu = Math.pow(10, -1 + (6 * i) / (count - 1));
    return record({ mu, xi_measured: 0.2 / Math.sqrt(mu), bound: 0.3 + 1 / Math.sqrt(mu) });
  });
}

const demoMu = parseSweepCsv(
  readFileSync(new URL("./fixtures/sweep_mu.csv", import.meta.url), "utf-8"),
);
const demoRho = parseSweepCsv(
  readFileSync(new URL("./fixtures/sweep_rho.csv", import.meta.url), "utf-8"),
);

describe("renderMuSweepPlot", () => {
  it("renders all four layers from the demo sweep", () => {
    const svg = renderMuSweepPlot(demoMu);
    for (const id of ["xi-series", "bound-series", "floor-line", "slope-ref"]) {
      expect(svg).toContain(`id="${id}"`);
    }
    expect(svg).toContain("measured spreading");
    expect(svg).toContain("certified bound");
    expect(svg).toContain("feasibility floor");
    expect(svg).toContain("slope -1/2 reference");
    expect(svg).toContain("regularisation strength mu");
    expect(svg.startsWith("<svg")).toBe(true);
    expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
  });

  it("is a pure function of the records", () => {
    expect(renderMuSweepPlot(demoMu)).toBe(renderMuSweepPlot(demoMu));
  });

  it("coincides the two curves when bound equals xi", () => {
    const rows = muSeries(9).map((r) => ({ ...r, bound: r.xi_measured }));
    const svg = renderMuSweepPlot(rows);
    const path = (id: string) => svg.match(new RegExp(`id="${id}" d="([^"]+)"`))?.[1];
    expect(path("xi-series")).toBe(path("bound-series"));
  });

  it("anchors the slope reference at the first mid-range bound point", () => {
    const rows = muSeries(25);
    const svg = renderMuSweepPlot(rows);
    const [lo] = midRange(rows.length);
    const anchor = rows[lo];
    const ref = svg.match(/id="slope-ref" d="M([\d.]+),([\d.]+)/);
    const boundPath = svg.match(/id="bound-series" d="([^"]+)"/)![1];
    const boundPoints = boundPath.split(" ").map((seg) => seg.slice(1).split(","));
    expect(ref).not.toBeNull();
    expect(Number(ref![1])).toBeCloseTo(Number(boundPoints[lo][0]), 1);
    expect(Number(ref![2])).toBeCloseTo(Number(boundPoints[lo][1]), 1);
    expect(anchor.mu).toBeGreaterThan(rows[0].mu);
  });

  it("rejects too few rows", () => {
    expect(() => renderMuSweepPlot(muSeries(25).slice(0, 1))).toThrow(PlotDataError);
    expect(() => renderMuSweepPlot([])).toThrow(/at least 3/);
  });

  it("rejects nonpositive values", () => {
    const rows = muSeries(5);
    rows[2] = { ...rows[2], xi_measured: 0 };
    expect(() => renderMuSweepPlot(rows)).toThrow(/positive/);
    const negMu = muSeries(5);
    negMu[0] = { ...negMu[0], mu: -1 };
    expect(() => renderMuSweepPlot(negMu)).toThrow(PlotDataError);
  });
});

describe("renderRhoSweepPlot", () => {
  it("renders both series from the demo sweep with the margin note", () => {
    const svg = renderRhoSweepPlot(demoRho);
    expect(svg).toContain('id="xi-series"');
    expect(svg).toContain('id="bound-series"');
    expect(svg).toContain('id="margin-note"');
    expect(svg).toContain("propagation factor rho");
    const demoBoundAboveXi = demoRho.every((r) => r.xi_measured <= r.bound);
    expect(demoBoundAboveXi).toBe(true);
  });

  it("rejects mixed mu values", () => {
    const rows = [record({ mu: 10, rho: 0.1 }), record({ mu: 20, rho: 0.2 })];
    expect(() => renderRhoSweepPlot(rows)).toThrow(/share one mu/);
  });

  it("rejects an empty sweep", () => {
    expect(() => renderRhoSweepPlot([])).toThrow(PlotDataError);
  });

  it("warns on a degenerate one-point sweep but still renders", () => {
    const warn = vi.spyOn(console, "warn").mockImplementation(() => {});
    const svg = renderRhoSweepPlot([record({ rho: 0.3 })]);
    expect(svg).toContain('id="xi-series"');
    expect(warn).toHaveBeenCalledOnce();
    warn.mockRestore();
  });
});
