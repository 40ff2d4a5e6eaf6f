import type { BundleSummary, RecommendationResponse, SweepPoint } from "./api.js";

export interface ConsoleState {
  bundle: BundleSummary | null;
  // raw-unit form values keyed by feature name, exactly as typed
  formValues: Map<string, string>;
  budget: number;
  lastResult: RecommendationResponse | null;
  curve: SweepPoint[];
  // sequencing token: only the response matching the latest request renders
  sweepSeq: number;
}

export function initialState(): ConsoleState {
  return {
    bundle: null,
    formValues: new Map(),
    budget: 0.5,
    lastResult: null,
    curve: [],
    sweepSeq: 0,
  };
}

// the budget grid 0.1 .. 1.0 used for the response curve
export function budgetGrid(): number[] {
  return Array.from({ length: 10 }, (_, k) => (k + 1) / 10);
}

export function debounce<A extends unknown[]>(fn: (...args: A) => void, ms: number) {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}

export interface FormReadResult {
  ok: boolean;
  blocks?: { x_u: number[]; x_i_observed: number[]; x_d_physician: number[] };
  badFields: string[];
}

/** Assemble request blocks in bundle metadata order; flags non-numeric fields. */
export function readForm(state: ConsoleState): FormReadResult {
  const bundle = state.bundle;
  if (!bundle) return { ok: false, badFields: [] };
  const badFields: string[] = [];
  const valueOf = (name: string): number => {
    const raw = (state.formValues.get(name) ?? "").trim();
    const v = Number(raw);
    if (raw === "" || !Number.isFinite(v)) {
      badFields.push(name);
      return NaN;
    }
    return v;
  };
  const blocks = {
    x_u: bundle.blocks.u.map(valueOf),
    x_i_observed: bundle.blocks.i.map(valueOf),
    x_d_physician: bundle.blocks.d.map(valueOf),
  };
  return { ok: badFields.length === 0, blocks, badFields };
}
