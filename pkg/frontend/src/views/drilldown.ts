/** Contour drill-down: pick a plane and variable, fetch the raw slice, and
 *  render a heatmap plus its circumferential average as a profile line.
 *  The line is display preparation only; performance numbers always come
 *  from service fields. */

import { ApiClient, BuildValues, decodeContour, N_PLANES, VARIABLES } from "../api.js";
import { heatmap, lineChart } from "../charts.js";

export const PLANE_NAMES = ["inlet"]
  .concat(
    ["IGV"]
      .concat(...Array.from({ length: 10 }, (_, i) => [`R${i + 1}`, `S${i + 1}`]))
      .concat(["EGV"])
      .map((r) => `${r}_out`),
  )
  .concat(["outlet"]);

export function circumferentialAverage(
  values: Float32Array,
  rows: number,
  cols: number,
): number[] {
  const out: number[] = [];
  for (let i = 0; i < rows; i++) {
    let s = 0;
    for (let j = 0; j < cols; j++) s += values[i * cols + j];
    out.push(s / cols);
  }
  return out;
}

export class DrilldownView {
  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private getBuild: () => BuildValues,
  ) {
    this.render();
  }

  private render(): void {
    this.root.innerHTML = "";
    const planeSel = document.createElement("select");
    planeSel.id = "plane-select";
    for (let p = 0; p < N_PLANES; p++) {
      const opt = document.createElement("option");
      opt.value = String(p);
      opt.textContent = `${p}: ${PLANE_NAMES[p]}`;
      planeSel.appendChild(opt);
    }
    const varSel = document.createElement("select");
    varSel.id = "variable-select";
    for (const v of VARIABLES) {
      const opt = document.createElement("option");
      opt.value = v;
      opt.textContent = v;
      varSel.appendChild(opt);
    }
    const go = document.createElement("button");
    go.id = "drilldown-fetch";
    go.textContent = "Fetch slice";
    go.addEventListener("click", () => void this.fetchSlice());
    const error = document.createElement("div");
    error.id = "drilldown-error";
    error.className = "error-banner";
    const plot = document.createElement("div");
    plot.id = "drilldown-plot";
    this.root.append(planeSel, varSel, go, error, plot);
  }

  async fetchSlice(): Promise<void> {
    const plane = Number(
      this.root.querySelector<HTMLSelectElement>("#plane-select")!.value,
    );
    const variable = this.root.querySelector<HTMLSelectElement>(
      "#variable-select",
    )!.value;
    const errorBox = this.root.querySelector<HTMLElement>("#drilldown-error")!;
    errorBox.textContent = "";
    try {
      const resp = await this.client.predict(this.getBuild(), {
        contours: true,
        planes: [plane],
      });
      const slice = (resp.contours ?? []).find(
        (c) => c.plane === plane && c.variable === variable,
      );
      if (!slice) throw new Error(`no ${variable} slice for plane ${plane}`);
      this.renderSlice(decodeContour(slice), slice.shape[0], slice.shape[1]);
    } catch (err) {
      errorBox.textContent = String(err);
    }
  }

  renderSlice(values: Float32Array, rows: number, cols: number): void {
    const plot = this.root.querySelector<HTMLElement>("#drilldown-plot")!;
    plot.innerHTML = "";
    plot.appendChild(heatmap(values, rows, cols));
    const profile = circumferentialAverage(values, rows, cols);
    const spans = Array.from({ length: rows }, (_, i) => (100 * (i + 0.5)) / rows);
    const chart = lineChart(profile, spans, {
      xLabel: "circumferential average",
      yLabel: "span %",
    });
    chart.id = "drilldown-profile";
    plot.appendChild(chart);
  }
}
