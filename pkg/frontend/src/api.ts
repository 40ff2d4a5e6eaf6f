// Typed client for the recommendation service. Every number the console
// displays comes out of these responses; the client performs no model math.

export interface FeatureInfo {
  name: string;
  category: "unchangeable" | "indirect" | "direct";
  units: string;
  min: number;
  max: number;
}

export interface BundleSummary {
  id: string;
  features: FeatureInfo[];
  blocks: { u: string[]; i: string[]; d: string[] };
  metadata: Record<string, unknown>;
}

export interface FluidDelta {
  name: string;
  units: string;
  physician: number;
  optimized: number;
  delta: number;
  delta_normalized: number;
}

export interface RecommendationResponse {
  prob_before: number;
  prob_after: number;
  prob_start: number;
  converged: boolean;
  iters_used: number;
  fluids: FluidDelta[];
}

export interface SweepPoint {
  budget: number;
  prob_after: number;
  prob_start: number;
  prob_before: number;
}

export interface RecommendRequest {
  x_u: number[];
  x_i_observed: number[];
  x_d_physician: number[];
  budget: number;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
    public field?: string,
  ) {
    super(message);
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let message = `request failed (${resp.status})`;
  let field: string | undefined;
  try {
    const body = await resp.json();
    if (body && typeof body.error === "string") message = body.error;
    if (body && typeof body.field === "string") field = body.field;
  } catch {
    // non-JSON error body; keep the generic message
  }
  return new ApiError(resp.status, message, field);
}

export class ServiceClient {
  constructor(private base: string = "") {}

  async listBundles(): Promise<BundleSummary[]> {
    const resp = await fetch(`${this.base}/bundles`);
    if (!resp.ok) throw await parseError(resp);
    const body = await resp.json();
    return body.bundles as BundleSummary[];
  }

  async recommend(bundleId: string, req: RecommendRequest): Promise<RecommendationResponse> {
    const resp = await fetch(`${this.base}/bundles/${bundleId}/recommend`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as RecommendationResponse;
  }

  async sweep(bundleId: string, budgets: number[], req: RecommendRequest): Promise<SweepPoint[]> {
    const resp = await fetch(`${this.base}/bundles/${bundleId}/sweep`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ budgets, request: req }),
    });
    if (!resp.ok) throw await parseError(resp);
    const body = await resp.json();
    return body.points as SweepPoint[];
  }
}
