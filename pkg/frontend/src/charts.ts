/** SVG chart builders: pure functions of fetched series.
 *
 * Only display geometry happens here (scaling values onto pixels);
 * no statistics are recomputed client-side. Element counts always
 * equal the input series lengths, which the contract tests assert.
 */

import type { HeatmapCell } from "./types.js";

const WIDTH = 480;
const HEIGHT = 200;
const PAD = 24;

function scale(value: number, lo: number, hi: number, outLo: number, outHi: number): number {
  if (hi === lo) return (outLo + outHi) / 2;
  return outLo + ((value - lo) / (hi - lo)) * (outHi - outLo);
}

/** Longitudinal performance line: one circle per completed lab. */
export function svgProgressLine(series: [string, number, string][]): string {
  if (series.length === 0) {
    return `<svg class="chart progress-line" data-points="0" viewBox="0 0 ${WIDTH} ${HEIGHT}"></svg>`;
  }
  const xs = series.map((_, index) => scale(index, 0, Math.max(1, series.length - 1), PAD, WIDTH - PAD));
  const ys = series.map(([, score]) => scale(score, 0, 100, HEIGHT - PAD, PAD));
  const path = xs.map((x, i) => `${i === 0 ? "M" : "L"}${x.toFixed(1)},${ys[i].toFixed(1)}`).join(" ");
  const points = series
    .map(
      ([labId, score], i) =>
        `<circle cx="${xs[i].toFixed(1)}" cy="${ys[i].toFixed(1)}" r="4" data-lab="${labId}" data-score="${score}"><title>${labId}: ${score}</title></circle>`,
    )
    .join("");
  return `<svg class="chart progress-line" data-points="${series.length}" viewBox="0 0 ${WIDTH} ${HEIGHT}"><path d="${path}" fill="none" stroke="currentColor"/>${points}</svg>`;
}

/** Weekday x week activity heatmap: one rect per reported cell. */
export function svgHeatmap(cells: HeatmapCell[]): string {
  const size = 22;
  const weeks = cells.length ? Math.max(...cells.map((c) => c.week)) + 1 : 0;
  const maxCount = cells.length ? Math.max(...cells.map((c) => c.count)) : 1;
  const rects = cells
    .map((cell) => {
      const opacity = (0.25 + 0.75 * (cell.count / maxCount)).toFixed(2);
      return `<rect x="${cell.week * size}" y="${(cell.weekday - 1) * size}" width="${size - 2}" height="${size - 2}" fill-opacity="${opacity}" data-count="${cell.count}"><title>week ${cell.week}, day ${cell.weekday}: ${cell.count}</title></rect>`;
    })
    .join("");
  return `<svg class="chart heatmap" data-cells="${cells.length}" viewBox="0 0 ${Math.max(1, weeks) * size} ${7 * size}">${rects}</svg>`;
}

/** AI-vs-faculty scatter: one circle per exported pair. */
export function svgScatter(pairs: [number, number][]): string {
  const points = pairs
    .map(
      ([ai, faculty]) =>
        `<circle cx="${scale(ai, 0, 100, PAD, WIDTH - PAD).toFixed(1)}" cy="${scale(faculty, 0, 100, HEIGHT - PAD, PAD).toFixed(1)}" r="3" data-ai="${ai}" data-faculty="${faculty}"/>`,
    )
    .join("");
  const diagonal = `<line x1="${PAD}" y1="${HEIGHT - PAD}" x2="${WIDTH - PAD}" y2="${PAD}" stroke-dasharray="4 4" stroke="currentColor"/>`;
  return `<svg class="chart scatter" data-points="${pairs.length}" viewBox="0 0 ${WIDTH} ${HEIGHT}">${diagonal}${points}</svg>`;
}

/** Error histogram: one bar per bin, labels starting at firstLabel. */
export function svgHistogram(bins: number[], firstLabel: number): string {
  const maxCount = Math.max(1, ...bins);
  const barWidth = (WIDTH - 2 * PAD) / Math.max(1, bins.length);
  const bars = bins
    .map((count, index) => {
      const height = scale(count, 0, maxCount, 0, HEIGHT - 2 * PAD);
      const x = PAD + index * barWidth;
      return `<rect x="${x.toFixed(1)}" y="${(HEIGHT - PAD - height).toFixed(1)}" width="${(barWidth - 1).toFixed(1)}" height="${height.toFixed(1)}" data-label="${firstLabel + index}" data-count="${count}"><title>${firstLabel + index}: ${count}</title></rect>`;
    })
    .join("");
  return `<svg class="chart histogram" data-bars="${bins.length}" viewBox="0 0 ${WIDTH} ${HEIGHT}">${bars}</svg>`;
}
