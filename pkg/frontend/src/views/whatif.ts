/** What-if comparison: named part-swap scenarios evaluated against a base
 *  build, shown as a sortable delta table. */

import { ApiClient, BuildValues, WhatIfResponse } from "../api.js";

export interface Scenario {
  name: string;
  build: BuildValues;
}

export class WhatIfView {
  scenarios: Scenario[] = [];
  lastResponse: WhatIfResponse | null = null;
  private sortKey: "delta_eta_p_pts" | "delta_mdot_pct" = "delta_eta_p_pts";

  constructor(
    private root: HTMLElement,
    private client: ApiClient,
    private getBase: () => BuildValues,
  ) {
    this.render();
  }

  private render(): void {
    this.root.innerHTML = "";
    const run = document.createElement("button");
    run.id = "whatif-run";
    run.textContent = "Evaluate scenarios";
    run.addEventListener("click", () => void this.evaluate());
    const error = document.createElement("div");
    error.id = "whatif-error";
    error.className = "error-banner";
    const table = document.createElement("table");
    table.id = "whatif-table";
    this.root.append(run, error, table);
  }

  addScenario(scenario: Scenario): void {
    this.scenarios.push(scenario);
  }

  removeScenario(name: string): void {
    this.scenarios = this.scenarios.filter((s) => s.name !== name);
    if (this.lastResponse) {
      this.lastResponse = {
        ...this.lastResponse,
        variants: this.lastResponse.variants.filter((v) => v.name !== name),
      };
      this.renderTable();
    }
  }

  setSortKey(key: "delta_eta_p_pts" | "delta_mdot_pct"): void {
    this.sortKey = key;
    this.renderTable();
  }

  async evaluate(): Promise<void> {
    const errorBox = this.root.querySelector<HTMLElement>("#whatif-error")!;
    errorBox.textContent = "";
    try {
      this.lastResponse = await this.client.whatIf(this.getBase(), this.scenarios);
      this.renderTable();
    } catch (err) {
      errorBox.textContent = String(err);
    }
  }

  renderTable(): void {
    const table = this.root.querySelector<HTMLTableElement>("#whatif-table")!;
    table.innerHTML = "";
    if (!this.lastResponse) return;
    const head = document.createElement("tr");
    for (const [label, key] of [
      ["scenario", null],
      ["d eta_p [pts]", "delta_eta_p_pts"],
      ["d mdot [%]", "delta_mdot_pct"],
      ["d PR [%]", null],
    ] as const) {
      const th = document.createElement("th");
      th.textContent = label;
      if (key) {
        th.dataset.sortKey = key;
        th.addEventListener("click", () => this.setSortKey(key));
      }
      head.appendChild(th);
    }
    table.appendChild(head);
    // stable sort on the chosen delta, best first
    const rows = this.lastResponse.variants
      .map((v, i) => ({ v, i }))
      .sort((a, b) => b.v[this.sortKey] - a.v[this.sortKey] || a.i - b.i);
    for (const { v } of rows) {
      const tr = document.createElement("tr");
      tr.dataset.scenario = v.name;
      for (const cell of [
        v.name,
        v.delta_eta_p_pts.toFixed(4),
        v.delta_mdot_pct.toFixed(4),
        v.delta_pr_pct.toFixed(4),
      ]) {
        const td = document.createElement("td");
        td.textContent = cell;
        tr.appendChild(td);
      }
      table.appendChild(tr);
    }
  }
}
