/** DOM bootstrap: thin glue that pours pure render output into the page. */

import { ApiClient, resolveApiBase } from "./api";
import { App } from "./app";
import {
  renderErrorBanner,
  renderKeywordPanel,
  renderLegend,
  renderMap,
  renderCountryPanel,
} from "./render";
import { SENTIMENTS, type ViewState, type WorldGeo } from "./types";

const PANEL_TITLES: Record<string, string> = {
  POS: "positive keywords",
  NEU: "neutral keywords",
  NEG: "negative keywords",
};

async function boot(): Promise<void> {
  const el = (id: string) => document.getElementById(id)!;
  const world = (await (await fetch("world.geo.json")).json()) as WorldGeo;
  const names = new Map(world.features.map((f) => [f.id, f.properties.name]));

  const api = new ApiClient((url) => fetch(url), resolveApiBase());

  const render = (state: ViewState) => {
    el("banner").innerHTML = renderErrorBanner(state.error);
    el("map").innerHTML = renderMap(world, state.map, state.selectedCountry);
    el("legend").innerHTML = renderLegend();
    for (const s of SENTIMENTS) {
      el(`panel-${s.toLowerCase()}`).innerHTML = renderKeywordPanel(
        PANEL_TITLES[s],
        state.topics[s],
      );
    }
    const drill = el("country");
    if (state.countryPanel) {
      const { code, topics, series } = state.countryPanel;
      drill.innerHTML = renderCountryPanel(code, names.get(code) ?? code, topics, series);
    } else {
      drill.innerHTML = "";
    }
    const picker = el("date") as HTMLInputElement;
    if (state.summary) {
      picker.min = state.summary.date_min;
      picker.max = state.summary.date_max;
      el("stats").textContent =
        `${state.summary.records.toLocaleString()} records, ` +
        `${state.summary.date_min} to ${state.summary.date_max}`;
    }
    if (state.selectedDate && picker.value !== state.selectedDate) {
      picker.value = state.selectedDate;
    }
  };

  const app = new App(api, render);

  (el("date") as HTMLInputElement).addEventListener("change", (ev) => {
    const value = (ev.target as HTMLInputElement).value;
    if (value) {
      void app.onDateChange(value);
    }
  });

  el("map").addEventListener("click", (ev) => {
    const target = (ev.target as Element).closest("path[data-clickable]");
    if (target) {
      void app.onCountryClick(target.getAttribute("data-code")!);
    }
  });

  el("country").addEventListener("click", (ev) => {
    if ((ev.target as Element).matches("[data-action='close-country']")) {
      app.closeCountry();
    }
  });

  await app.init();
}

void boot();
