import { describe, expect, it } from "vitest";

import { parseSchemaCsv } from "../src/csv.js";
import { buildFigures, lossSeries, trendSeries } from "../src/figures.js";
import { metricsCsv, sampleMetrics, sampleSummary, summaryCsv } from "./fixtures.js";

const FIGURES = [
  "network_efficiency.svg",
  "secrecy_rate.svg",
  "v2v_efficiency.svg",
  "v2i_efficiency.svg",
  "training_loss.svg",
];

function dataY(svg: string, series: string): number[] {
  const out: number[] = [];
  const re = /<circle[^>]*data-series="([^"]*)"[^>]*data-y="([^"]*)"/g;
  for (const match of svg.matchAll(re)) {
    if (match[1] === series) {
      out.push(Number(match[2]));
    }
  }
  return out;
}

describe("trendSeries", () => {
  it("averages across seeds per policy and count, sorted by count", () => {
    const summary = parseSchemaCsv(sampleSummary(), "summary.csv");
    const series = trendSeries(summary, "network_efficiency");
    expect(series.map((s) => s.name)).toEqual(["seed", "random"]);
    expect(series[0].points).toEqual([
      { x: 20, y: (5.07 + 5.27) / 2 },
      { x: 40, y: (4.16 + 4.36) / 2 },
    ]);
    expect(series[1].points[0].y).toBeCloseTo(2.45, 12);
  });
});

describe("lossSeries", () => {
  it("plots the learning policy at its lowest count, one series per seed", () => {
    const metrics = parseSchemaCsv(sampleMetrics(), "metrics.csv");
    const series = lossSeries(metrics);
    expect(series.map((s) => s.name)).toEqual(["seed v20 seed 0", "seed v20 seed 1"]);
    // warmup episodes with nan loss are not plotted
    expect(series[0].points).toEqual([
      { x: 1, y: 12.8125 },
      { x: 2, y: 4.25 },
      { x: 3, y: 0.107421875 },
    ]);
  });

  it("faults when no losses were logged", () => {
    const metrics = parseSchemaCsv(
      metricsCsv(["random,20,0,0,0.5,1.0,0.3,0.97,3.0,nan"]),
      "metrics.csv",
    );
    expect(() => lossSeries(metrics)).toThrowError(/no finite mean_loss/);
  });
});

describe("buildFigures", () => {
  const metrics = parseSchemaCsv(sampleMetrics(), "metrics.csv");
  const summary = parseSchemaCsv(sampleSummary(), "summary.csv");

  it("renders all five figures", () => {
    const figures = buildFigures(metrics, summary);
    expect([...figures.keys()]).toEqual(FIGURES);
    for (const svg of figures.values()) {
      expect(svg).toContain("<svg");
      expect(svg).toContain("</svg>");
      expect(svg).toContain("<polyline");
    }
  });

  it("loss endpoints in the figure match the CSV values exactly", () => {
    const svg = buildFigures(metrics, summary).get("training_loss.svg")!;
    const plotted = dataY(svg, "seed v20 seed 0");
    expect(plotted[0]).toBe(12.8125);
    expect(plotted[plotted.length - 1]).toBe(0.107421875);
  });

  it("loss figure y axis starts at zero", () => {
    const svg = buildFigures(metrics, summary).get("training_loss.svg")!;
    expect(svg).toMatch(/text-anchor="end" dominant-baseline="middle">0</);
  });

  it("renders with a single policy present", () => {
    const oneSummary = parseSchemaCsv(
      summaryCsv(["seed,20,0,300,30,5.1,5.5,1.2,5.07,8.1,0.4"]),
      "summary.csv",
    );
    const figures = buildFigures(metrics, oneSummary);
    expect(figures.get("network_efficiency.svg")).toContain("seed");
  });

  it("faults on a summary missing a needed column", () => {
    const broken = parseSchemaCsv(
      "# schema=1\npolicy,vehicle_count\nseed,20\n",
      "summary.csv",
    );
    expect(() => buildFigures(metrics, broken)).toThrowError(/missing column "seed"/);
  });
});
