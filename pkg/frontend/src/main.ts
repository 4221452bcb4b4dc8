/** DOM wiring for the calculator page. */

import { LatestWins, ServiceError, postDesign, postSensitivity } from './api.js';
import { isNonIncreasing, lineChartSvg } from './chart.js';
import { formatRate } from './format.js';
import { panelView } from './panel.js';
import {
  FormState,
  decodeState,
  defaultState,
  encodeState,
  specFromState,
  treatedRate,
  validate,
} from './state.js';
import { SweepField } from './types.js';

const $ = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const NUMBER_INPUTS: [keyof FormState & string, string][] = [
  ['alpha', 'alpha'], ['power', 'power'], ['deltaMargin', 'deltaMargin'],
  ['controlRate', 'controlRate'], ['riskReduction', 'riskReduction'],
  ['cr12', 'cr12'], ['cr21', 'cr21'], ['k2', 'k2'],
  ['legacyN1', 'legacyN1'], ['legacyK1', 'legacyK1'],
  ['completion', 'completion'], ['unitCost', 'unitCost'],
];
const RAW_RATE_IDS = ['p_c1', 'p_c0', 'p_d1', 'p_d0'] as const;

const requests = new LatestWins();
const sweepRequests = new LatestWins();

function readState(): FormState {
  const state = defaultState();
  for (const [key, id] of NUMBER_INPUTS) {
    const raw = ($(id) as HTMLInputElement).value;
    (state as unknown as Record<string, number>)[key] = raw === '' ? NaN : Number(raw);
  }
  state.useLegacy = ($('useLegacy') as HTMLInputElement).checked;
  state.advancedRates = ($('advancedRates') as HTMLInputElement).checked;
  for (const id of RAW_RATE_IDS) {
    state.rawRates[id] = Number(($(id) as HTMLInputElement).value);
  }
  state.sweepField = ($('sweepField') as HTMLSelectElement).value as SweepField;
  return state;
}

function writeState(state: FormState): void {
  for (const [key, id] of NUMBER_INPUTS) {
    ($(id) as HTMLInputElement).value = String(state[key]);
  }
  ($('useLegacy') as HTMLInputElement).checked = state.useLegacy;
  ($('advancedRates') as HTMLInputElement).checked = state.advancedRates;
  for (const id of RAW_RATE_IDS) {
    ($(id) as HTMLInputElement).value = String(state.rawRates[id]);
  }
  ($('sweepField') as HTMLSelectElement).value = state.sweepField;
}

function showErrors(errors: Map<string, string>): void {
  for (const node of document.querySelectorAll('.field-error')) node.textContent = '';
  for (const [field, message] of errors) {
    const slot = document.getElementById(`error-${field}`);
    if (slot) slot.textContent = message;
  }
  ($('submit') as HTMLButtonElement).disabled = errors.size > 0;
}

function banner(message: string, retriable: boolean): void {
  const node = $('banner');
  node.textContent = message;
  node.classList.toggle('hidden', message === '');
  $('retry').classList.toggle('hidden', !retriable);
}

function refreshDerived(state: FormState): void {
  $('treatedRate').textContent = Number.isFinite(treatedRate(state))
    ? formatRate(treatedRate(state))
    : '—';
  $('rawRatesPanel').classList.toggle('hidden', !state.advancedRates);
  $('legacyPanel').classList.toggle('hidden', !state.useLegacy);
}

async function submit(): Promise<void> {
  const state = readState();
  const errors = validate(state);
  showErrors(errors);
  if (errors.size > 0) return;
  history.replaceState(null, '', '?' + encodeState(state));
  banner('', false);
  try {
    const result = await requests.run((signal) => postDesign(specFromState(state), signal));
    const view = panelView(result);
    $('panel').classList.remove('hidden');
    $('out-total').textContent = view.total;
    $('out-arms').textContent = `${view.armTreat} intervention / ${view.armControl} control`;
    $('out-strata').textContent =
      `${view.concordantStratum} concordant / ${view.discordantStratum} discordant`;
    $('out-reused').textContent =
      `${view.reused} (${view.reuseTreat} intervention, ${view.reuseControl} control)`;
    $('out-recruit').textContent =
      `${view.recruitTreat} intervention, ${view.recruitControl} control`;
    $('out-prime').textContent = view.withReuse;
    $('out-savings').textContent = view.savings;
  } catch (error) {
    if ((error as Error).name === 'AbortError') return;
    if (error instanceof ServiceError) {
      if (error.api.field) {
        showErrors(new Map([[error.api.field, error.api.message]]));
      } else {
        banner(error.api.message, false);
      }
      return;
    }
    banner('The calculator service is unreachable.', true);
  }
}

function sweepValues(field: SweepField): number[] {
  if (field === 'unit_cost') {
    return Array.from({ length: 11 }, (_, i) => 500 * i);
  }
  return Array.from({ length: 21 }, (_, i) => +(i / 20).toFixed(2));
}

async function runSweep(): Promise<void> {
  const state = readState();
  if (validate(state).size > 0) return;
  const field = state.sweepField;
  try {
    const points = await sweepRequests.run((signal) =>
      postSensitivity(specFromState(state), field, sweepValues(field), signal));
    const series = points.map((p) => ({ x: p.value, y: p.n2_prime }));
    $('chart').innerHTML = lineChartSvg(series, field, 'enrollment with reuse');
    const monotone = isNonIncreasing(series.map((p) => p.y));
    const note = $('chart-note');
    if (field === 'unit_cost') {
      note.textContent = 'Unit cost changes savings only, not enrollment.';
    } else {
      note.textContent = monotone
        ? 'Enrollment with reuse never increases along this sweep.'
        : 'Unexpected non-monotone curve; please report this design.';
    }
    const savings = points.map((p) => ({ x: p.value, y: p.savings ?? 0 }));
    $('savings-chart').innerHTML = lineChartSvg(savings, field, 'savings ($)');
  } catch (error) {
    if ((error as Error).name === 'AbortError') return;
    banner('Sensitivity request failed.', true);
  }
}

function bind(): void {
  writeState(decodeState(location.search));
  refreshDerived(readState());
  showErrors(validate(readState()));
  document.querySelectorAll('input, select').forEach((node) => {
    node.addEventListener('input', () => {
      const state = readState();
      refreshDerived(state);
      showErrors(validate(state));
    });
  });
  $('form').addEventListener('submit', (event) => {
    event.preventDefault();
    void submit();
  });
  $('retry').addEventListener('click', () => void submit());
  $('sweep').addEventListener('click', () => void runSweep());
  void submit().then(() => runSweep());
}

document.addEventListener('DOMContentLoaded', bind);
