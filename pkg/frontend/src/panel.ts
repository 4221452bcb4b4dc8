/** Pure rendering of a design result into labeled display strings; the DOM
 * layer only places these.  Keeping this separate makes display parity
 * directly testable against recorded service responses. */

import { formatCount, formatMoney } from './format.js';
import { DesignResult } from './types.js';

export interface PanelView {
  total: string;
  armTreat: string;
  armControl: string;
  reused: string;
  reuseTreat: string;
  reuseControl: string;
  recruitTreat: string;
  recruitControl: string;
  withReuse: string;
  savings: string;
  concordantStratum: string;
  discordantStratum: string;
}

export function panelView(result: DesignResult): PanelView {
  return {
    total: formatCount(result.n2),
    armTreat: formatCount(result.arm_treat),
    armControl: formatCount(result.arm_control),
    reused: formatCount(result.reuse_treat + result.reuse_control),
    reuseTreat: formatCount(result.reuse_treat),
    reuseControl: formatCount(result.reuse_control),
    recruitTreat: formatCount(result.recruit_treat),
    recruitControl: formatCount(result.recruit_control),
    withReuse: formatCount(result.n2_prime),
    savings: formatMoney(result.savings),
    concordantStratum: formatCount(result.n_c),
    discordantStratum: formatCount(result.n_d),
  };
}
