/**
 * Minimal multi-series line charts as standalone SVG strings.
 *
 * Point markers carry their source values in data attributes so rendered
 * figures stay checkable against the CSVs they came from.
 */

export interface SeriesPoint {
  x: number;
  y: number;
}

export interface Series {
  name: string;
  points: SeriesPoint[];
}

export interface ChartOptions {
  title: string;
  xLabel: string;
  yLabel: string;
  width?: number;
  height?: number;
  /** force the y axis to start at zero (loss curves) */
  yFromZero?: boolean;
  /** draw point markers (off for dense curves) */
  markers?: boolean;
}

const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
const MARGIN = { top: 42, right: 24, bottom: 48, left: 64 };

function niceTicks(min: number, max: number, count: number): number[] {
  if (!(max > min)) {
    max = min + 1;
  }
  const span = max - min;
  const rawStep = span / Math.max(count - 1, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 2.5, 5, 10].map((m) => m * mag);
  const step = candidates.find((c) => c >= rawStep) ?? candidates[candidates.length - 1];
  const start = Math.ceil(min / step) * step;
  const ticks: number[] = [];
  for (let v = start; v <= max + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}

function fmtTick(v: number): string {
  if (v === 0) return "0";
  const abs = Math.abs(v);
  if (abs >= 1e4 || abs < 1e-3) return v.toExponential(1);
  return String(Number(v.toPrecision(6)));
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderLineChart(series: Series[], options: ChartOptions): string {
  const width = options.width ?? 720;
  const height = options.height ?? 480;
  const plot = {
    left: MARGIN.left,
    right: width - MARGIN.right,
    top: MARGIN.top,
    bottom: height - MARGIN.bottom,
  };

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const ys = series.flatMap((s) => s.points.map((p) => p.y));
  if (xs.length === 0) {
    throw new Error(`chart "${options.title}": no points to draw`);
  }
  let xMin = Math.min(...xs);
  let xMax = Math.max(...xs);
  if (xMin === xMax) {
    xMin -= 1;
    xMax += 1;
  }
  let yMin = options.yFromZero ? 0 : Math.min(...ys);
  let yMax = Math.max(...ys);
  if (yMin === yMax) {
    yMax = yMin + 1;
  }
  const pad = (yMax - yMin) * 0.06;
  yMax += pad;
  if (!options.yFromZero) {
    yMin -= pad;
  }

  const sx = (x: number) =>
    plot.left + ((x - xMin) / (xMax - xMin)) * (plot.right - plot.left);
  const sy = (y: number) =>
    plot.bottom - ((y - yMin) / (yMax - yMin)) * (plot.bottom - plot.top);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="sans-serif" font-size="12">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="#ffffff"/>`);

  for (const tick of niceTicks(yMin, yMax, 6)) {
    const y = sy(tick).toFixed(2);
    parts.push(
      `<line x1="${plot.left}" y1="${y}" x2="${plot.right}" y2="${y}" stroke="#e0e0e0"/>`,
      `<text x="${plot.left - 8}" y="${y}" text-anchor="end" dominant-baseline="middle">` +
        `${fmtTick(tick)}</text>`,
    );
  }
  for (const tick of niceTicks(xMin, xMax, 7)) {
    const x = sx(tick).toFixed(2);
    parts.push(
      `<line x1="${x}" y1="${plot.bottom}" x2="${x}" y2="${plot.bottom + 5}" stroke="#333"/>`,
      `<text x="${x}" y="${plot.bottom + 18}" text-anchor="middle">${fmtTick(tick)}</text>`,
    );
  }
  parts.push(
    `<rect x="${plot.left}" y="${plot.top}" width="${plot.right - plot.left}" ` +
      `height="${plot.bottom - plot.top}" fill="none" stroke="#333"/>`,
    `<text x="${(plot.left + plot.right) / 2}" y="22" text-anchor="middle" ` +
      `font-size="15">${escapeXml(options.title)}</text>`,
    `<text x="${(plot.left + plot.right) / 2}" y="${height - 12}" text-anchor="middle">` +
      `${escapeXml(options.xLabel)}</text>`,
    `<text x="16" y="${(plot.top + plot.bottom) / 2}" text-anchor="middle" ` +
      `transform="rotate(-90 16 ${(plot.top + plot.bottom) / 2})">` +
      `${escapeXml(options.yLabel)}</text>`,
  );

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const coords = s.points
      .map((p) => `${sx(p.x).toFixed(2)},${sy(p.y).toFixed(2)}`)
      .join(" ");
    parts.push(
      `<polyline points="${coords}" fill="none" stroke="${color}" stroke-width="2"/>`,
    );
    if (options.markers ?? true) {
      for (const p of s.points) {
        parts.push(
          `<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="3.5" ` +
            `fill="${color}" data-series="${escapeXml(s.name)}" data-x="${p.x}" data-y="${p.y}"/>`,
        );
      }
    } else {
      // keep the endpoints checkable even without full markers
      for (const p of [s.points[0], s.points[s.points.length - 1]]) {
        parts.push(
          `<circle cx="${sx(p.x).toFixed(2)}" cy="${sy(p.y).toFixed(2)}" r="2.5" ` +
            `fill="${color}" data-series="${escapeXml(s.name)}" data-x="${p.x}" data-y="${p.y}"/>`,
        );
      }
    }
    const lx = plot.left + 12;
    const ly = plot.top + 16 + i * 18;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
        `stroke="${color}" stroke-width="2"/>`,
      `<text x="${lx + 28}" y="${ly}">${escapeXml(s.name)}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n");
}
