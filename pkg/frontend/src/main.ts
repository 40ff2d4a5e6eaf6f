// Console wiring: load a bundle, render the form, submit recommendations,
// and keep the budget-response curve in sync with the slider.

import { ApiError, ServiceClient } from "./api.js";
import type { BundleSummary, RecommendRequest } from "./api.js";
import { budgetGrid, debounce, initialState, readForm } from "./state.js";
import {
  clearBanner,
  markInvalidFields,
  renderBanner,
  renderCurve,
  renderForm,
  renderResult,
} from "./ui.js";

export interface ConsoleElements {
  banner: HTMLElement;
  form: HTMLElement;
  result: HTMLElement;
  chart: HTMLElement;
  budgetSlider: HTMLInputElement;
  budgetReadout: HTMLElement;
  recommendButton: HTMLButtonElement;
  bundleSelect: HTMLSelectElement;
}

export const SWEEP_DEBOUNCE_MS = 250;

export function setupConsole(els: ConsoleElements, client: ServiceClient) {
  const state = initialState();

  els.budgetSlider.min = "0";
  els.budgetSlider.max = "1";
  els.budgetSlider.step = "0.05";
  els.budgetSlider.value = String(state.budget);
  els.budgetReadout.textContent = state.budget.toFixed(2);

  async function loadBundles(): Promise<void> {
    try {
      const bundles = await client.listBundles();
      if (!bundles.length) {
        renderBanner(els.banner, "no model bundles registered on the service");
        return;
      }
      clearBanner(els.banner);
      els.bundleSelect.innerHTML = "";
      for (const b of bundles) {
        const opt = document.createElement("option");
        opt.value = b.id;
        opt.textContent = b.id;
        els.bundleSelect.appendChild(opt);
      }
      selectBundle(bundles[0].id, bundles);
      els.bundleSelect.addEventListener("change", () =>
        selectBundle(els.bundleSelect.value, bundles),
      );
    } catch {
      renderBanner(els.banner, "could not load model bundles", loadBundles);
    }
  }

  function selectBundle(id: string, bundles: BundleSummary[]): void {
    const bundle = bundles.find((b) => b.id === id) ?? null;
    state.bundle = bundle;
    if (bundle) renderForm(els.form, state, bundle);
  }

  function currentRequest(): RecommendRequest | null {
    const read = readForm(state);
    if (!read.ok || !read.blocks) {
      markInvalidFields(els.form, read.badFields);
      return null;
    }
    return { ...read.blocks, budget: state.budget };
  }

  async function submitRecommendation(): Promise<void> {
    if (!state.bundle) return;
    const req = currentRequest();
    if (req === null) return; // invalid form: no request leaves the client
    try {
      const result = await client.recommend(state.bundle.id, req);
      state.lastResult = result;
      clearBanner(els.banner);
      renderResult(els.result, result);
    } catch (err) {
      if (err instanceof ApiError) {
        if (err.field) markInvalidFields(els.form, [err.field]);
        renderBanner(els.banner, err.message);
      } else {
        renderBanner(els.banner, "network failure while requesting a recommendation", submitRecommendation);
      }
    }
  }

  async function refreshCurve(): Promise<void> {
    if (!state.bundle) return;
    const req = currentRequest();
    if (req === null) return;
    const seq = ++state.sweepSeq;
    try {
      const points = await client.sweep(state.bundle.id, budgetGrid(), req);
      if (seq !== state.sweepSeq) return; // stale response: a newer request is in flight
      state.curve = points;
      renderCurve(els.chart, points, state.budget);
    } catch {
      if (seq !== state.sweepSeq) return;
      state.curve = [];
      renderCurve(els.chart, [], state.budget);
      els.chart.querySelector(".chart-empty")!.textContent = "budget curve unavailable";
    }
  }

  const debouncedRefresh = debounce(refreshCurve, SWEEP_DEBOUNCE_MS);

  els.budgetSlider.addEventListener("input", () => {
    state.budget = Number(els.budgetSlider.value);
    els.budgetReadout.textContent = state.budget.toFixed(2);
    debouncedRefresh();
  });

  els.recommendButton.addEventListener("click", () => {
    void submitRecommendation();
  });

  void loadBundles();

  return { state, submitRecommendation, refreshCurve, loadBundles };
}

export function bootstrap(): void {
  const byId = (id: string) => {
    const node = document.getElementById(id);
    if (!node) throw new Error(`missing element #${id}`);
    return node;
  };
  setupConsole(
    {
      banner: byId("banner"),
      form: byId("patient-form"),
      result: byId("result"),
      chart: byId("chart"),
      budgetSlider: byId("budget") as HTMLInputElement,
      budgetReadout: byId("budget-readout"),
      recommendButton: byId("recommend") as HTMLButtonElement,
      bundleSelect: byId("bundle-select") as HTMLSelectElement,
    },
    new ServiceClient(),
  );
}

if (typeof document !== "undefined" && document.getElementById("patient-form")) {
  bootstrap();
}
