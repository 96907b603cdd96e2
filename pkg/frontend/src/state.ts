/** Build-entry form state: 22 rows of clearance/roughness with validation
 *  and tolerance-band indicators. */

import { N_ROWS } from "./api.js";

export const ENVELOPE_BAND = { lo: 0.5, hi: 1.5 }; // +-50% of design

export interface FieldState {
  raw: string;
  value: number | null;
  withinBand: boolean;
}

export interface BuildFormState {
  rows: { clearance: FieldState; roughness: FieldState }[];
  dirty: boolean;
}

function parseField(raw: string): number | null {
  if (raw.trim() === "") return null;
  const v = Number(raw);
  return Number.isFinite(v) ? v : null;
}

export function makeFormState(
  clearance: number[],
  roughness: number[],
): BuildFormState {
  return {
    dirty: false,
    rows: Array.from({ length: N_ROWS }, (_, i) => ({
      clearance: fieldState(String(clearance[i]), 1.0),
      roughness: fieldState(String(roughness[i]), roughness[i]),
    })),
  };
}

export function fieldState(raw: string, design: number): FieldState {
  const value = parseField(raw);
  const ratio = value === null || design === 0 ? null : value / design;
  return {
    raw,
    value,
    withinBand:
      ratio !== null && ratio >= ENVELOPE_BAND.lo && ratio <= ENVELOPE_BAND.hi,
  };
}

export function setField(
  state: BuildFormState,
  row: number,
  kind: "clearance" | "roughness",
  raw: string,
  designRoughness: number[],
): void {
  const design = kind === "clearance" ? 1.0 : designRoughness[row];
  state.rows[row][kind] = fieldState(raw, design);
  state.dirty = true;
}

/** Submit is allowed only when all 44 fields parse as numbers. */
export function isSubmittable(state: BuildFormState): boolean {
  return state.rows.every(
    (r) => r.clearance.value !== null && r.roughness.value !== null,
  );
}

export function toBuildValues(state: BuildFormState): {
  clearance: number[];
  roughness: number[];
} {
  return {
    clearance: state.rows.map((r) => r.clearance.value ?? NaN),
    roughness: state.rows.map((r) => r.roughness.value ?? NaN),
  };
}
