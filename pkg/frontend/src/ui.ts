// DOM rendering. All displayed numbers are verbatim service-response values;
// nothing here recomputes probabilities or deltas.

import type { BundleSummary, FeatureInfo, RecommendationResponse, SweepPoint } from "./api.js";
import type { ConsoleState } from "./state.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBanner(root: HTMLElement, message: string, retry?: () => void): void {
  root.innerHTML = "";
  const banner = el("div", { class: "banner error", role: "alert" }, message);
  if (retry) {
    const btn = el("button", { class: "retry", type: "button" }, "Retry");
    btn.addEventListener("click", retry);
    banner.appendChild(btn);
  }
  root.appendChild(banner);
}

export function clearBanner(root: HTMLElement): void {
  root.innerHTML = "";
}

const BLOCK_LABELS: Record<string, string> = {
  unchangeable: "Patient attributes",
  indirect: "Vitals and labs (observed)",
  direct: "Prescribed IV fluids",
};

function fieldInput(state: ConsoleState, f: FeatureInfo): HTMLElement {
  const wrap = el("label", { class: `field ${f.category}` });
  const unit = f.units ? ` (${f.units})` : "";
  wrap.appendChild(el("span", { class: "field-name" }, `${f.name}${unit}`));
  const input = el("input", {
    type: "text",
    inputmode: "decimal",
    "data-feature": f.name,
    title: `training range ${f.min} to ${f.max}${unit}`,
    placeholder: `${f.min} – ${f.max}`,
  });
  input.value = state.formValues.get(f.name) ?? "";
  input.addEventListener("input", () => {
    state.formValues.set(f.name, input.value);
    input.classList.remove("invalid");
    const note = wrap.querySelector(".field-error");
    if (note) note.remove();
  });
  wrap.appendChild(input);
  return wrap;
}

export function renderForm(root: HTMLElement, state: ConsoleState, bundle: BundleSummary): void {
  root.innerHTML = "";
  for (const category of ["unchangeable", "indirect", "direct"] as const) {
    const features = bundle.features.filter((f) => f.category === category);
    if (!features.length) continue;
    const section = el("fieldset", { class: `block ${category}` });
    section.appendChild(el("legend", {}, BLOCK_LABELS[category]));
    for (const f of features) section.appendChild(fieldInput(state, f));
    root.appendChild(section);
  }
}

export function markInvalidFields(root: HTMLElement, names: string[]): void {
  for (const name of names) {
    const input = root.querySelector<HTMLInputElement>(`input[data-feature="${name}"]`);
    if (!input) continue;
    input.classList.add("invalid");
    if (!input.parentElement?.querySelector(".field-error")) {
      input.parentElement?.appendChild(
        el("span", { class: "field-error" }, "enter a number"),
      );
    }
  }
}

function direction(delta: number): string {
  if (delta > 0) return "↑ increase";
  if (delta < 0) return "↓ decrease";
  return "— keep";
}

export function renderResult(root: HTMLElement, result: RecommendationResponse): void {
  root.innerHTML = "";
  const probs = el("div", { class: "probs" });
  probs.appendChild(el("div", { class: "prob before" }, `Mortality risk before: ${result.prob_before}`));
  probs.appendChild(el("div", { class: "prob after" }, `Mortality risk after: ${result.prob_after}`));
  root.appendChild(probs);

  const table = el("table", { class: "deltas" });
  const head = el("tr");
  for (const h of ["Fluid", "Prescribed", "Optimized", "Change", "Direction"]) {
    head.appendChild(el("th", {}, h));
  }
  table.appendChild(head);
  for (const f of result.fluids) {
    const row = el("tr", { "data-fluid": f.name });
    row.appendChild(el("td", {}, f.units ? `${f.name} (${f.units})` : f.name));
    row.appendChild(el("td", { class: "physician" }, String(f.physician)));
    row.appendChild(el("td", { class: "optimized" }, String(f.optimized)));
    row.appendChild(el("td", { class: "delta" }, String(f.delta)));
    row.appendChild(el("td", { class: "direction" }, direction(f.delta)));
    table.appendChild(row);
  }
  root.appendChild(table);
}

const W = 420;
const H = 180;
const PAD = 30;

/** Probability-vs-budget polyline with the current budget marked. */
export function renderCurve(root: HTMLElement, points: SweepPoint[], currentBudget: number): void {
  root.innerHTML = "";
  if (!points.length) {
    root.appendChild(el("div", { class: "chart-empty" }, "no curve data"));
    return;
  }
  const maxProb = Math.max(...points.map((p) => p.prob_after), 1e-9);
  const x = (b: number) => PAD + (b / 1.0) * (W - 2 * PAD);
  const y = (p: number) => H - PAD - (p / maxProb) * (H - 2 * PAD);
  const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
  svg.setAttribute("viewBox", `0 0 ${W} ${H}`);
  svg.setAttribute("class", "curve");
  const path = document.createElementNS("http://www.w3.org/2000/svg", "polyline");
  path.setAttribute("fill", "none");
  path.setAttribute("stroke", "#2563eb");
  path.setAttribute("stroke-width", "2");
  path.setAttribute(
    "points",
    points.map((p) => `${x(p.budget)},${y(p.prob_after)}`).join(" "),
  );
  svg.appendChild(path);
  for (const p of points) {
    const dot = document.createElementNS("http://www.w3.org/2000/svg", "circle");
    dot.setAttribute("cx", String(x(p.budget)));
    dot.setAttribute("cy", String(y(p.prob_after)));
    dot.setAttribute("r", "3");
    dot.setAttribute("class", "curve-point");
    dot.setAttribute("data-budget", String(p.budget));
    dot.setAttribute("data-prob", String(p.prob_after));
    svg.appendChild(dot);
  }
  const marker = document.createElementNS("http://www.w3.org/2000/svg", "line");
  marker.setAttribute("x1", String(x(currentBudget)));
  marker.setAttribute("x2", String(x(currentBudget)));
  marker.setAttribute("y1", String(PAD / 2));
  marker.setAttribute("y2", String(H - PAD));
  marker.setAttribute("stroke", "#dc2626");
  marker.setAttribute("stroke-dasharray", "4 3");
  marker.setAttribute("class", "budget-marker");
  svg.appendChild(marker);
  root.appendChild(svg);
}
