/**
 * Entropy-vs-steps chart: one series per measurement set, horizontal
 * reference lines at each flat plateau and at the noncontextual baselines.
 * Every annotated number is the verbatim string from the CSV.
 */

import { EntropyCsv } from "./csv.js";
import { AXIS_STYLE, GRID_STYLE, REF_STYLE, SvgChart, linearScale } from "./svg.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 170, top: 36, bottom: 48 };

const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

export function renderEntropyCurve(series: EntropyCsv[]): string {
  if (series.length === 0) {
    throw new Error("at least one entropy CSV is required");
  }
  const chart = new SvgChart(WIDTH, HEIGHT);
  const allRows = series.flatMap((s) => s.rows);
  const maxStep = Math.max(...allRows.map((r) => r.step));
  const minStep = Math.min(...allRows.map((r) => r.step));
  const bitsValues = allRows.map((r) => r.entropyBits);
  for (const s of series) {
    if (s.baselineBits !== null) {
      bitsValues.push(s.baselineBits);
    }
  }
  const maxBits = Math.max(...bitsValues);
  const x = linearScale(minStep, Math.max(maxStep, minStep + 1), MARGIN.left, WIDTH - MARGIN.right);
  const y = linearScale(0, maxBits * 1.12, HEIGHT - MARGIN.bottom, MARGIN.top);

  // axes and step grid
  chart.line(MARGIN.left, y(0), WIDTH - MARGIN.right, y(0), AXIS_STYLE);
  chart.line(MARGIN.left, y(0), MARGIN.left, MARGIN.top, AXIS_STYLE);
  for (let step = minStep; step <= maxStep; step += 1) {
    chart.line(x(step), y(0), x(step), y(0) + 4, AXIS_STYLE);
    chart.text(x(step), y(0) + 18, String(step), 'font-size="11" text-anchor="middle"');
  }
  const yTicks = 6;
  for (let i = 0; i <= yTicks; i += 1) {
    const v = (maxBits * 1.12 * i) / yTicks;
    chart.line(MARGIN.left, y(v), WIDTH - MARGIN.right, y(v), GRID_STYLE);
    chart.text(MARGIN.left - 8, y(v) + 4, v.toFixed(1), 'font-size="11" text-anchor="end"');
  }
  chart.text(WIDTH / 2, HEIGHT - 10, "measurement steps", 'font-size="13" text-anchor="middle"');
  chart.text(16, HEIGHT / 2, "memory (bits)", `font-size="13" text-anchor="middle" transform="rotate(-90 16 ${HEIGHT / 2})"`);

  series.forEach((s, idx) => {
    const color = SERIES_COLORS[idx % SERIES_COLORS.length];
    const points = s.rows.map((r) => [x(r.step), y(r.entropyBits)] as [number, number]);
    chart.polyline(points, `stroke="${color}" stroke-width="2"`);
    for (const [px, py] of points) {
      chart.circle(px, py, 2.5, `fill="${color}"`);
    }
    const last = s.rows[s.rows.length - 1];
    // annotate the final value verbatim from the file
    chart.text(
      x(last.step) + 8,
      y(last.entropyBits) + 4,
      `${s.setName}: ${last.entropyText} bits`,
      `font-size="12" fill="${color}"`,
    );
    // flat series get a reference line at their plateau value
    const flat = s.rows.every((r) => r.entropyText === s.rows[0].entropyText);
    if (flat && s.rows.length > 1) {
      chart.line(MARGIN.left, y(last.entropyBits), WIDTH - MARGIN.right, y(last.entropyBits), REF_STYLE);
    }
    if (s.baselineBits !== null && s.baselineText !== null) {
      chart.line(MARGIN.left, y(s.baselineBits), WIDTH - MARGIN.right, y(s.baselineBits), REF_STYLE);
      chart.text(
        WIDTH - MARGIN.right + 8,
        y(s.baselineBits) + 4,
        `${s.setName} baseline: ${s.baselineText}`,
        `font-size="11" fill="${color}"`,
      );
    }
  });

  return chart.render();
}
