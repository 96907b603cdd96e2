/** Build entry: per-row clearance/roughness inputs with tolerance-band
 *  indicators, overall delta cards, and stage-wise charts. */

import { ApiClient, BaselineResponse, PredictResponse, ServiceError } from "../api.js";
import { barChart } from "../charts.js";
import {
  BuildFormState,
  isSubmittable,
  makeFormState,
  setField,
  toBuildValues,
} from "../state.js";

const ROW_NAMES = ["IGV"]
  .concat(...Array.from({ length: 10 }, (_, i) => [`R${i + 1}`, `S${i + 1}`]))
  .concat(["EGV"]);

export class BuildView {
  state: BuildFormState;
  lastResponse: PredictResponse | null = null;

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private baseline: BaselineResponse,
  ) {
    this.state = makeFormState(
      baseline.build.clearance.slice(),
      baseline.build.roughness.slice(),
    );
    this.render();
  }

  private render(): void {
    this.root.innerHTML = "";
    const form = document.createElement("table");
    form.className = "build-form";
    form.innerHTML =
      "<thead><tr><th>row</th><th>clearance [x design]</th>" +
      "<th>roughness Ra [um]</th></tr></thead>";
    const body = document.createElement("tbody");
    this.state.rows.forEach((row, i) => {
      const tr = document.createElement("tr");
      const name = document.createElement("td");
      name.textContent = ROW_NAMES[i];
      tr.appendChild(name);
      for (const kind of ["clearance", "roughness"] as const) {
        const td = document.createElement("td");
        const input = document.createElement("input");
        input.type = "text";
        input.value = row[kind].raw;
        input.dataset.row = String(i);
        input.dataset.kind = kind;
        input.addEventListener("input", () => {
          setField(this.state, i, kind, input.value, this.baseline.build.roughness);
          this.refreshIndicators();
        });
        td.appendChild(input);
        const flag = document.createElement("span");
        flag.className = "band-flag";
        flag.dataset.row = String(i);
        flag.dataset.kind = kind;
        td.appendChild(flag);
        tr.appendChild(td);
      }
      body.appendChild(tr);
    });
    form.appendChild(body);
    this.root.appendChild(form);

    const submit = document.createElement("button");
    submit.id = "predict-submit";
    submit.textContent = "Predict build";
    submit.addEventListener("click", () => void this.submit());
    this.root.appendChild(submit);

    const error = document.createElement("div");
    error.id = "predict-error";
    error.className = "error-banner";
    this.root.appendChild(error);

    const results = document.createElement("div");
    results.id = "predict-results";
    this.root.appendChild(results);
    this.refreshIndicators();
  }

  refreshIndicators(): void {
    const flags = this.root.querySelectorAll<HTMLElement>(".band-flag");
    flags.forEach((flag) => {
      const row = Number(flag.dataset.row);
      const kind = flag.dataset.kind as "clearance" | "roughness";
      const field = this.state.rows[row][kind];
      if (field.value === null) {
        flag.textContent = "invalid";
        flag.className = "band-flag invalid";
      } else if (!field.withinBand) {
        flag.textContent = "out of band";
        flag.className = "band-flag out";
      } else {
        flag.textContent = "";
        flag.className = "band-flag";
      }
    });
    const submit = this.root.querySelector<HTMLButtonElement>("#predict-submit");
    if (submit) submit.disabled = !isSubmittable(this.state);
  }

  async submit(): Promise<void> {
    const errorBox = this.root.querySelector<HTMLElement>("#predict-error")!;
    errorBox.textContent = "";
    this.root
      .querySelectorAll<HTMLElement>(".band-flag.server")
      .forEach((f) => (f.className = "band-flag"));
    try {
      const resp = await this.client.predict(toBuildValues(this.state));
      this.lastResponse = resp;
      this.renderResults(resp);
    } catch (err) {
      if (err instanceof ServiceError) {
        errorBox.textContent = `${err.status}: ${err.message}`;
        if (err.field) {
          const flag = this.root.querySelector<HTMLElement>(
            `.band-flag[data-kind="${err.field}"]`,
          );
          if (flag) flag.className = "band-flag out server";
        }
      } else {
        errorBox.textContent = String(err);
      }
    }
  }

  renderResults(resp: PredictResponse): void {
    const box = this.root.querySelector<HTMLElement>("#predict-results")!;
    box.innerHTML = "";
    const cards = document.createElement("div");
    cards.className = "delta-cards";
    const d = resp.overall.deltas;
    for (const [label, value, unit] of [
      ["d eta_p", d.eta_p_pts, "pts"],
      ["d mass flow", d.mdot_pct, "%"],
      ["d PR", d.pr_pct, "%"],
    ] as const) {
      const card = document.createElement("div");
      card.className = "delta-card";
      card.dataset.metric = label;
      card.dataset.value = String(value);
      card.textContent = `${label}: ${value.toFixed(4)} ${unit}`;
      cards.appendChild(card);
    }
    box.appendChild(cards);

    box.appendChild(
      barChart(
        [
          {
            label: "baseline",
            color: "#9ab",
            values: this.baseline.stages.map((s) => s.eta_p),
          },
          { label: "build", color: "#1666c0", values: resp.stages.map((s) => s.eta_p) },
        ],
        { title: "stage polytropic efficiency" },
      ),
    );
    box.appendChild(
      barChart(
        [
          {
            label: "baseline",
            color: "#9ab",
            values: this.baseline.stages.map((s) => s.pr),
          },
          { label: "build", color: "#d07716", values: resp.stages.map((s) => s.pr) },
        ],
        { title: "stage pressure ratio" },
      ),
    );
  }
}
