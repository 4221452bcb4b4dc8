/** Calculator form state: validation, spec construction, and the shareable
 * URL codec.  The effect is entered as (control event rate, relative risk
 * reduction); the derived treated rate is display-only unless the advanced
 * raw-rate panel overrides it. */

import { DesignSpec, SweepField } from './types.js';

export interface FormState {
  alpha: number;
  power: number;
  deltaMargin: number;
  controlRate: number;       // shared control-arm event rate
  riskReduction: number;     // relative risk reduction with intervention
  cr12: number;
  cr21: number;
  k2: number;
  legacyN1: number;
  legacyK1: number;
  completion: number;
  unitCost: number;
  useLegacy: boolean;
  advancedRates: boolean;    // when true, the four raw stratum rates apply
  rawRates: { p_c1: number; p_c0: number; p_d1: number; p_d0: number };
  sweepField: SweepField;
}

/** The published 2%-incidence supplemental-MRI trial, 1:4 allocation. */
export function defaultState(): FormState {
  return {
    alpha: 0.025,
    power: 0.8,
    deltaMargin: 0,
    controlRate: 0.02,
    riskReduction: 0.3,
    cr12: 0.466,
    cr21: 0.466,
    k2: 0.25,
    legacyN1: 20392,
    legacyK1: 0.25,
    completion: 1,
    unitCost: 1500,
    useLegacy: true,
    advancedRates: false,
    rawRates: { p_c1: 0.014, p_c0: 0.02, p_d1: 0.014, p_d0: 0.02 },
    sweepField: 'cr12',
  };
}

export function treatedRate(state: FormState): number {
  // Trim binary float dust (0.02 * 0.7 -> 0.013999999999999999) so the spec
  // carries the rate a person would write down.
  return Math.round(state.controlRate * (1 - state.riskReduction) * 1e12) / 1e12;
}

const inUnit = (v: number) => Number.isFinite(v) && v >= 0 && v <= 1;

/** Field-keyed validation messages; empty map means the form may submit. */
export function validate(state: FormState): Map<string, string> {
  const errors = new Map<string, string>();
  if (!(state.alpha > 0 && state.alpha < 0.5)) {
    errors.set('alpha', 'one-sided alpha must lie in (0, 0.5)');
  }
  if (!(state.power > 0 && state.power < 1)) {
    errors.set('power', 'power must lie in (0, 1)');
  }
  if (!inUnit(state.cr12)) errors.set('cr12', 'concordance must lie in [0, 1]');
  if (!inUnit(state.cr21)) errors.set('cr21', 'concordance must lie in [0, 1]');
  if (!(state.k2 > 0)) errors.set('k2', 'allocation ratio must be positive');
  if (state.advancedRates) {
    for (const [name, v] of Object.entries(state.rawRates)) {
      if (!inUnit(v)) errors.set(name, 'event rates must lie in [0, 1]');
    }
    if (state.rawRates.p_c1 === state.rawRates.p_c0 &&
        state.rawRates.p_d1 === state.rawRates.p_d0) {
      errors.set('p_c1', 'treated and control rates are identical: no effect to detect');
    }
  } else {
    if (!(inUnit(state.controlRate) && state.controlRate > 0)) {
      errors.set('controlRate', 'control event rate must lie in (0, 1]');
    }
    if (!(state.riskReduction > 0 && state.riskReduction < 1)) {
      errors.set('riskReduction', 'relative risk reduction must lie in (0, 1)');
    }
  }
  if (state.useLegacy) {
    if (!(state.legacyN1 >= 0)) errors.set('legacyN1', 'legacy size must be >= 0');
    if (!(state.legacyK1 > 0)) errors.set('legacyK1', 'allocation ratio must be positive');
    if (!inUnit(state.completion)) errors.set('completion', 'completion must lie in [0, 1]');
  }
  if (!(state.unitCost >= 0)) errors.set('unitCost', 'unit cost must be >= 0');
  return errors;
}

/** The exact request body; z_alpha pinned to the published calculator's 1.96
 * convention so the reference numbers reproduce. */
export function specFromState(state: FormState): DesignSpec {
  const rates = state.advancedRates
    ? { ...state.rawRates }
    : {
        p_c1: treatedRate(state), p_c0: state.controlRate,
        p_d1: treatedRate(state), p_d0: state.controlRate,
      };
  return {
    alpha: state.alpha,
    power: state.power,
    delta_margin: state.deltaMargin,
    cr12: state.cr12,
    cr21: state.cr21,
    rates,
    k2: state.k2,
    legacy: state.useLegacy
      ? { n1: state.legacyN1, k1: state.legacyK1, completion: state.completion }
      : null,
    unit_cost: state.unitCost,
    direction: 'decrease',
    z_alpha: 1.96,
  };
}

const NUMERIC_KEYS = [
  'alpha', 'power', 'deltaMargin', 'controlRate', 'riskReduction', 'cr12',
  'cr21', 'k2', 'legacyN1', 'legacyK1', 'completion', 'unitCost',
] as const;

/** Query-string codec so designs are shareable by link; no client storage. */
export function encodeState(state: FormState): string {
  const params = new URLSearchParams();
  for (const key of NUMERIC_KEYS) params.set(key, String(state[key]));
  params.set('useLegacy', state.useLegacy ? '1' : '0');
  params.set('advancedRates', state.advancedRates ? '1' : '0');
  if (state.advancedRates) {
    for (const [name, v] of Object.entries(state.rawRates)) params.set(name, String(v));
  }
  params.set('sweepField', state.sweepField);
  return params.toString();
}

export function decodeState(query: string): FormState {
  const params = new URLSearchParams(query);
  const state = defaultState();
  for (const key of NUMERIC_KEYS) {
    const raw = params.get(key);
    if (raw !== null && raw !== '' && Number.isFinite(Number(raw))) {
      state[key] = Number(raw);
    }
  }
  if (params.get('useLegacy') !== null) state.useLegacy = params.get('useLegacy') === '1';
  if (params.get('advancedRates') !== null) {
    state.advancedRates = params.get('advancedRates') === '1';
  }
  for (const name of ['p_c1', 'p_c0', 'p_d1', 'p_d0'] as const) {
    const raw = params.get(name);
    if (raw !== null && Number.isFinite(Number(raw))) state.rawRates[name] = Number(raw);
  }
  const sweep = params.get('sweepField');
  if (sweep === 'cr12' || sweep === 'cr21' || sweep === 'completion' || sweep === 'unit_cost') {
    state.sweepField = sweep;
  }
  return state;
}
