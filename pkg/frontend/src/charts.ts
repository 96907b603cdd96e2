/** SVG renderers: grouped stage bars, heatmap, line chart.  Pure functions
 *  from data to elements so tests can inspect the output directly. */

const SVG_NS = "http://www.w3.org/2000/svg";

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) el.setAttribute(k, String(v));
  return el;
}

export interface BarSeries {
  label: string;
  color: string;
  values: number[];
}

/** Grouped bar chart; one group per stage. */
export function barChart(
  series: BarSeries[],
  opts: { width?: number; height?: number; title?: string } = {},
): SVGSVGElement {
  const width = opts.width ?? 460;
  const height = opts.height ?? 180;
  const pad = 28;
  const n = Math.max(...series.map((s) => s.values.length));
  const all = series.flatMap((s) => s.values);
  const lo = Math.min(0, ...all);
  const hi = Math.max(0, ...all, 1e-12);
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  svg.dataset.chart = "bars";
  const plotW = width - 2 * pad;
  const plotH = height - 2 * pad;
  const groupW = plotW / n;
  const barW = (groupW * 0.8) / series.length;
  const y = (v: number) => pad + plotH * (1 - (v - lo) / (hi - lo));
  for (let g = 0; g < n; g++) {
    for (let s = 0; s < series.length; s++) {
      const v = series[s].values[g] ?? 0;
      const x = pad + g * groupW + groupW * 0.1 + s * barW;
      const rect = svgEl("rect", {
        x,
        y: Math.min(y(v), y(0)),
        width: barW,
        height: Math.abs(y(v) - y(0)) || 0.5,
        fill: series[s].color,
      });
      rect.dataset.series = series[s].label;
      rect.dataset.group = String(g);
      rect.dataset.value = String(v);
      svg.appendChild(rect);
    }
    const label = svgEl("text", {
      x: pad + g * groupW + groupW / 2,
      y: height - 6,
      "text-anchor": "middle",
      "font-size": 9,
    });
    label.textContent = String(g + 1);
    svg.appendChild(label);
  }
  if (opts.title) {
    const t = svgEl("text", { x: width / 2, y: 13, "text-anchor": "middle", "font-size": 11 });
    t.textContent = opts.title;
    svg.appendChild(t);
  }
  return svg;
}

function colorFor(t: number): string {
  // simple blue->white->red diverging-free ramp (viridis-ish endpoints)
  const r = Math.round(254 * t);
  const g = Math.round(80 + 150 * (1 - Math.abs(t - 0.5) * 2) * 0.6 + 80 * t);
  const b = Math.round(254 * (1 - t));
  return `rgb(${r},${Math.min(g, 255)},${b})`;
}

/** Heatmap of a row-major [radial, tangential] matrix; span on the y axis
 *  (hub at the bottom), theta on the x axis. */
export function heatmap(
  values: Float32Array | number[],
  rows: number,
  cols: number,
  opts: { width?: number; height?: number } = {},
): SVGSVGElement {
  const width = opts.width ?? 320;
  const height = opts.height ?? 320;
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  svg.dataset.chart = "heatmap";
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const span = hi - lo;
  const cellW = width / cols;
  const cellH = height / rows;
  for (let i = 0; i < rows; i++) {
    for (let j = 0; j < cols; j++) {
      const v = Number(values[i * cols + j]);
      const t = span > 0 ? (v - lo) / span : 0.5;
      const rect = svgEl("rect", {
        x: j * cellW,
        y: height - (i + 1) * cellH, // hub at the bottom
        width: cellW + 0.5,
        height: cellH + 0.5,
        fill: colorFor(t),
      });
      rect.dataset.value = String(v);
      svg.appendChild(rect);
    }
  }
  return svg;
}

/** Simple polyline chart of y versus x. */
export function lineChart(
  x: number[],
  y: number[],
  opts: { width?: number; height?: number; xLabel?: string; yLabel?: string } = {},
): SVGSVGElement {
  const width = opts.width ?? 320;
  const height = opts.height ?? 320;
  const pad = 30;
  const svg = svgEl("svg", { width, height, viewBox: `0 0 ${width} ${height}` });
  svg.dataset.chart = "line";
  const xLo = Math.min(...x);
  const xHi = Math.max(...x);
  const yLo = Math.min(...y);
  const yHi = Math.max(...y);
  const sx = (v: number) =>
    pad + ((width - 2 * pad) * (v - xLo)) / Math.max(xHi - xLo, 1e-12);
  const sy = (v: number) =>
    height - pad - ((height - 2 * pad) * (v - yLo)) / Math.max(yHi - yLo, 1e-12);
  const points = x.map((xv, i) => `${sx(xv)},${sy(y[i])}`).join(" ");
  const line = svgEl("polyline", {
    points,
    fill: "none",
    stroke: "#1666c0",
    "stroke-width": 1.5,
  });
  line.dataset.points = x.map((xv, i) => `${xv}:${y[i]}`).join(";");
  svg.appendChild(line);
  return svg;
}
