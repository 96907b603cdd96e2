/** Typed client for the prediction service. Every number shown in the UI
 *  comes from these validated responses; the client computes nothing but
 *  display preparation. */

import { z } from "zod";

export const N_ROWS = 22;
export const N_PLANES = 24;
export const VARIABLES = ["Pt", "Tt", "Vx", "Vt", "Vr", "rho"] as const;
export type VariableName = (typeof VARIABLES)[number];

const overallSchema = z.object({
  mdot: z.number(),
  pr: z.number(),
  eta_p: z.number(),
  deltas: z.object({
    mdot_pct: z.number(),
    pr_pct: z.number(),
    eta_p_pts: z.number(),
  }),
});

const stageSchema = z.object({
  stage: z.number().int(),
  pr: z.number(),
  eta_p: z.number(),
  delta_pr_pct: z.number(),
  delta_eta_p_pts: z.number(),
});

const contourSchema = z.object({
  plane: z.number().int(),
  variable: z.string(),
  shape: z.tuple([z.number().int(), z.number().int()]),
  dtype: z.literal("<f4"),
  data_b64: z.string(),
});

export const predictResponseSchema = z.object({
  model_id: z.string(),
  latency_ms: z.number(),
  overall: overallSchema,
  stages: z.array(stageSchema).length(10),
  profiles: z
    .object({
      span_pct: z.array(z.number()),
      planes: z.record(z.string(), z.record(z.string(), z.array(z.number()))),
    })
    .optional(),
  contours: z.array(contourSchema).optional(),
});

export const baselineResponseSchema = z.object({
  model_id: z.string(),
  build: z.object({
    clearance: z.array(z.number()).length(N_ROWS),
    roughness: z.array(z.number()).length(N_ROWS),
  }),
  overall: overallSchema,
  stages: z.array(stageSchema).length(10),
});

const whatIfVariantSchema = z.object({
  name: z.string(),
  eta_p: z.number(),
  mdot: z.number(),
  pr: z.number(),
  delta_eta_p_pts: z.number(),
  delta_mdot_pct: z.number(),
  delta_pr_pct: z.number(),
});

export const whatIfResponseSchema = z.object({
  model_id: z.string(),
  base: overallSchema,
  variants: z.array(whatIfVariantSchema),
});

export type PredictResponse = z.infer<typeof predictResponseSchema>;
export type BaselineResponse = z.infer<typeof baselineResponseSchema>;
export type WhatIfResponse = z.infer<typeof whatIfResponseSchema>;
export type ContourSlice = z.infer<typeof contourSchema>;

export interface BuildValues {
  clearance: number[];
  roughness: number[];
}

export class ServiceError extends Error {
  status: number;
  field?: string;

  constructor(status: number, message: string, field?: string) {
    super(message);
    this.status = status;
    this.field = field;
  }
}

async function parseError(res: Response): Promise<ServiceError> {
  let detail = res.statusText;
  let field: string | undefined;
  try {
    const body = (await res.json()) as {
      detail?: string;
      field?: string;
      errors?: { field: string; message: string }[];
    };
    if (body.detail) detail = body.detail;
    field = body.field ?? body.errors?.[0]?.field;
    if (body.errors?.length) {
      detail = `${detail}: ${body.errors[0].field} ${body.errors[0].message}`;
    }
  } catch {
    /* non-JSON error body */
  }
  return new ServiceError(res.status, detail, field);
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async post<T>(path: string, body: unknown, schema: z.ZodType<T>): Promise<T> {
    const res = await fetch(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!res.ok) throw await parseError(res);
    return schema.parse(await res.json());
  }

  async baseline(): Promise<BaselineResponse> {
    const res = await fetch(this.baseUrl + "/baseline");
    if (!res.ok) throw await parseError(res);
    return baselineResponseSchema.parse(await res.json());
  }

  predict(
    build: BuildValues,
    opts: { profiles?: boolean; contours?: boolean; planes?: number[] } = {},
  ): Promise<PredictResponse> {
    return this.post(
      "/predict",
      {
        clearance: build.clearance,
        roughness: build.roughness,
        include_profiles: opts.profiles ?? false,
        include_contours: opts.contours ?? false,
        planes: opts.planes ?? [],
      },
      predictResponseSchema,
    );
  }

  whatIf(base: BuildValues, variants: { name: string; build: BuildValues }[]): Promise<WhatIfResponse> {
    return this.post(
      "/whatif",
      {
        base,
        variants: variants.map((v) => ({ name: v.name, ...v.build })),
      },
      whatIfResponseSchema,
    );
  }
}

/** Decode a base64 little-endian float32 contour into a row-major matrix. */
export function decodeContour(slice: ContourSlice): Float32Array {
  const raw = atob(slice.data_b64);
  const bytes = new Uint8Array(raw.length);
  for (let i = 0; i < raw.length; i++) bytes[i] = raw.charCodeAt(i);
  return new Float32Array(bytes.buffer);
}
