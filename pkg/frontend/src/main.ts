/** App shell: base-URL configuration, tab switching, view wiring. */

import { ApiClient } from "./api.js";
import { BuildView } from "./views/build.js";
import { DrilldownView } from "./views/drilldown.js";
import { WhatIfView } from "./views/whatif.js";
import { toBuildValues } from "./state.js";

export async function startApp(root: HTMLElement, baseUrl = ""): Promise<{
  build: BuildView;
  drilldown: DrilldownView;
  whatif: WhatIfView;
}> {
  const client = new ApiClient(baseUrl);
  const baseline = await client.baseline();

  root.innerHTML = `
    <nav id="tabs">
      <button data-tab="build">Build entry</button>
      <button data-tab="drilldown">Drill-down</button>
      <button data-tab="whatif">What-if</button>
    </nav>
    <section id="tab-build"></section>
    <section id="tab-drilldown" hidden></section>
    <section id="tab-whatif" hidden></section>`;

  const build = new BuildView(
    root.querySelector<HTMLElement>("#tab-build")!,
    client,
    baseline,
  );
  const drilldown = new DrilldownView(
    root.querySelector<HTMLElement>("#tab-drilldown")!,
    client,
    () => toBuildValues(build.state),
  );
  const whatif = new WhatIfView(
    root.querySelector<HTMLElement>("#tab-whatif")!,
    client,
    () => toBuildValues(build.state),
  );

  root.querySelectorAll<HTMLButtonElement>("#tabs button").forEach((btn) => {
    btn.addEventListener("click", () => {
      for (const name of ["build", "drilldown", "whatif"]) {
        root.querySelector<HTMLElement>(`#tab-${name}`)!.hidden =
          name !== btn.dataset.tab;
      }
    });
  });

  return { build, drilldown, whatif };
}

declare global {
  interface Window {
    CNNFD_BASE_URL?: string;
  }
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  void startApp(document.getElementById("app")!, window.CNNFD_BASE_URL ?? "");
}
