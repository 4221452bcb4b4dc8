/** Wire types mirroring the service's JSON schemas (schema_version 1). */

export interface StrataRates {
  p_c1: number;
  p_c0: number;
  p_d1: number;
  p_d0: number;
}

export interface LegacyTrial {
  n1: number;
  k1: number;
  completion: number;
}

export interface DesignSpec {
  alpha: number;
  power: number;
  delta_margin: number;
  cr12: number;
  cr21: number;
  rates: StrataRates;
  k2: number;
  legacy: LegacyTrial | null;
  unit_cost: number | null;
  rounding?: string;
  direction?: 'increase' | 'decrease';
  z_alpha?: number | null;
  z_beta?: number | null;
}

export interface DesignResult {
  delta_effect: number;
  n2_real: number;
  n2: number;
  arm_treat: number;
  arm_control: number;
  n_c: number;
  n_d: number;
  reuse_treat: number;
  reuse_control: number;
  recruit_treat: number;
  recruit_control: number;
  n2_prime: number;
  n2_prime_real: number;
  savings: number | null;
  schema_version: string;
}

export interface ApiError {
  code: string;
  message: string;
  field: string | null;
}

export interface SweepPoint {
  value: number;
  n2: number;
  n2_prime: number;
  savings: number | null;
}

export type SweepField = 'cr12' | 'cr21' | 'completion' | 'unit_cost';
