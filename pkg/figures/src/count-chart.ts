/**
 * Reachable-state growth chart on a log scale, annotating the counts at
 * steps 1, 3, 5, 7 (verbatim from the CSV) when those steps are present.
 */

import { CountsCsv } from "./csv.js";
import { AXIS_STYLE, GRID_STYLE, SvgChart, linearScale, log10Scale } from "./svg.js";

const WIDTH = 720;
const HEIGHT = 480;
const MARGIN = { left: 76, right: 32, top: 36, bottom: 48 };

const ANNOTATED_STEPS = [1, 3, 5, 7];

export function renderCountGrowth(counts: CountsCsv): string {
  const chart = new SvgChart(WIDTH, HEIGHT);
  const rows = counts.rows;
  const maxStep = Math.max(...rows.map((r) => r.step));
  const minStep = Math.min(...rows.map((r) => r.step));
  const maxCount = Math.max(...rows.map((r) => r.reachableCount));
  const x = linearScale(minStep, Math.max(maxStep, minStep + 1), MARGIN.left, WIDTH - MARGIN.right);
  const y = log10Scale(1, Math.max(10, maxCount * 2), HEIGHT - MARGIN.bottom, MARGIN.top);

  chart.line(MARGIN.left, y(1), WIDTH - MARGIN.right, y(1), AXIS_STYLE);
  chart.line(MARGIN.left, y(1), MARGIN.left, MARGIN.top, AXIS_STYLE);
  for (let step = minStep; step <= maxStep; step += 1) {
    chart.line(x(step), y(1), x(step), y(1) + 4, AXIS_STYLE);
    chart.text(x(step), y(1) + 18, String(step), 'font-size="11" text-anchor="middle"');
  }
  for (let decade = 1; decade <= Math.ceil(Math.log10(Math.max(10, maxCount * 2))); decade += 1) {
    const v = 10 ** decade;
    chart.line(MARGIN.left, y(v), WIDTH - MARGIN.right, y(v), GRID_STYLE);
    chart.text(MARGIN.left - 8, y(v) + 4, `1e${decade}`, 'font-size="11" text-anchor="end"');
  }
  chart.text(WIDTH / 2, HEIGHT - 10, "measurement steps", 'font-size="13" text-anchor="middle"');
  chart.text(
    18,
    HEIGHT / 2,
    "reachable states (log scale)",
    `font-size="13" text-anchor="middle" transform="rotate(-90 18 ${HEIGHT / 2})"`,
  );

  const points = rows.map((r) => [x(r.step), y(r.reachableCount)] as [number, number]);
  chart.polyline(points, 'stroke="#1f77b4" stroke-width="2"');
  rows.forEach((r, idx) => {
    chart.circle(points[idx][0], points[idx][1], 3, 'fill="#1f77b4"');
  });
  for (const r of rows) {
    if (ANNOTATED_STEPS.includes(r.step)) {
      chart.text(
        x(r.step) + 6,
        y(r.reachableCount) - 8,
        r.countText,
        'font-size="12" fill="#d62728" font-weight="bold"',
      );
    }
  }
  chart.text(MARGIN.left + 8, MARGIN.top - 12, `${counts.setName}: reachable-state growth`, 'font-size="13"');

  return chart.render();
}
