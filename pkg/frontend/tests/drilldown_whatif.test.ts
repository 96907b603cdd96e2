/** Drill-down and what-if views against a stubbed service. */

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { DrilldownView, circumferentialAverage } from "../src/views/drilldown.js";
import { WhatIfView } from "../src/views/whatif.js";
import {
  baselineResponse,
  designBuild,
  encodeContour,
  predictResponse,
  stubFetch,
} from "./helpers.js";

beforeEach(() => {
  document.body.innerHTML = "";
});

function makeDrilldown(sliceValues: number[], rows = 4, cols = 4) {
  stubFetch((url, body) => {
    if (url.endsWith("/baseline")) return { status: 200, json: baselineResponse() };
    const planes = (body as { planes: number[] }).planes;
    return {
      status: 200,
      json: predictResponse({
        contours: ["Pt", "Tt", "Vx", "Vt", "Vr", "rho"].map((v) => ({
          plane: planes[0],
          variable: v,
          shape: [rows, cols],
          dtype: "<f4",
          data_b64: encodeContour(sliceValues),
        })),
      }),
    };
  });
  const root = document.createElement("div");
  document.body.appendChild(root);
  const view = new DrilldownView(root, new ApiClient(""), designBuild);
  return { view, root };
}

describe("drill-down view", () => {
  it("lists all 24 planes", () => {
    const { root } = makeDrilldown([1, 2, 3, 4]);
    const options = root.querySelectorAll("#plane-select option");
    expect(options.length).toBe(24);
    expect(options[0].textContent).toContain("inlet");
    expect(options[23].textContent).toContain("outlet");
  });

  it("renders a uniform slice as a single-color map", async () => {
    const values = Array(16).fill(7.5);
    const { view, root } = makeDrilldown(values);
    await view.fetchSlice();
    const cells = root.querySelectorAll('svg[data-chart="heatmap"] rect');
    expect(cells.length).toBe(16);
    const fills = new Set(Array.from(cells, (c) => c.getAttribute("fill")));
    expect(fills.size).toBe(1);
  });

  it("profile endpoints match recomputed hub/casing slice averages", async () => {
    const values = Array.from({ length: 16 }, (_, i) => i * 1.5 + 1);
    const { view, root } = makeDrilldown(values);
    await view.fetchSlice();
    const poly = root.querySelector<SVGPolylineElement>(
      "#drilldown-profile polyline",
    )!;
    const pairs = poly.dataset.points!.split(";").map((p) => p.split(":").map(Number));
    const profile = circumferentialAverage(new Float32Array(values), 4, 4);
    expect(pairs[0][0]).toBeCloseTo(profile[0], 5); // hub
    expect(pairs[3][0]).toBeCloseTo(profile[3], 5); // casing
  });
});

function makeWhatIf(deltas: Record<string, number>) {
  const calls = stubFetch((url, body) => {
    if (url.endsWith("/baseline")) return { status: 200, json: baselineResponse() };
    const variants = (body as { variants: { name: string }[] }).variants;
    return {
      status: 200,
      json: {
        model_id: "stub-model",
        base: predictResponse().overall,
        variants: variants.map((v) => ({
          name: v.name,
          eta_p: 0.88,
          mdot: 60.0,
          pr: 11.0,
          delta_eta_p_pts: deltas[v.name] ?? 0,
          delta_mdot_pct: (deltas[v.name] ?? 0) / 2,
          delta_pr_pct: 0,
        })),
      },
    };
  });
  const root = document.createElement("div");
  document.body.appendChild(root);
  const view = new WhatIfView(root, new ApiClient(""), designBuild);
  return { view, root, calls };
}

describe("what-if view", () => {
  it("shows a zero row for a scenario identical to the base", async () => {
    const { view, root } = makeWhatIf({ same: 0 });
    view.addScenario({ name: "same", build: designBuild() });
    await view.evaluate();
    const row = root.querySelector<HTMLElement>('tr[data-scenario="same"]')!;
    const cells = row.querySelectorAll("td");
    expect(cells[1].textContent).toBe("0.0000");
    expect(cells[2].textContent).toBe("0.0000");
  });

  it("reproduces stubbed deltas exactly and sorts stably by d eta_p", async () => {
    const { view, root } = makeWhatIf({ a: -0.02, b: 0.01, c: 0.01 });
    for (const name of ["a", "b", "c"]) {
      view.addScenario({ name, build: designBuild() });
    }
    await view.evaluate();
    const names = Array.from(
      root.querySelectorAll<HTMLElement>("tr[data-scenario]"),
      (r) => r.dataset.scenario,
    );
    // b and c tie: input order preserved (stable), best first
    expect(names).toEqual(["b", "c", "a"]);
    const firstDelta = root
      .querySelector<HTMLElement>('tr[data-scenario="b"]')!
      .querySelectorAll("td")[1].textContent;
    expect(firstDelta).toBe("0.0100");
  });

  it("removing a scenario removes its row", async () => {
    const { view, root } = makeWhatIf({ a: -0.02, b: 0.01 });
    view.addScenario({ name: "a", build: designBuild() });
    view.addScenario({ name: "b", build: designBuild() });
    await view.evaluate();
    expect(root.querySelectorAll("tr[data-scenario]").length).toBe(2);
    view.removeScenario("a");
    expect(root.querySelectorAll("tr[data-scenario]").length).toBe(1);
    expect(root.querySelector('tr[data-scenario="a"]')).toBeNull();
  });
});
