import { describe, expect, it } from 'vitest';
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { panelView } from '../src/panel.js';
import { formatCount, formatMoney } from '../src/format.js';
import { DesignResult } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));
const fixture = (name: string) =>
  JSON.parse(readFileSync(join(here, 'fixtures', name), 'utf-8'));

describe('result panel parity with the recorded service response', () => {
  const recorded = fixture('design_breast_cancer.json') as DesignResult;

  it('shows the published enrollment, reuse, and savings figures', () => {
    const view = panelView(recorded);
    expect(view.total).toBe('20,392');
    expect(view.reused).toBe('9,503');
    expect(view.savings).toBe('$2,851,500');
  });

  it('every displayed figure is a formatting of a response field', () => {
    const view = panelView(recorded);
    expect(view.armTreat).toBe(formatCount(recorded.arm_treat));
    expect(view.armControl).toBe(formatCount(recorded.arm_control));
    expect(view.reuseTreat).toBe(formatCount(recorded.reuse_treat));
    expect(view.reuseControl).toBe(formatCount(recorded.reuse_control));
    expect(view.recruitTreat).toBe(formatCount(recorded.recruit_treat));
    expect(view.recruitControl).toBe(formatCount(recorded.recruit_control));
    expect(view.withReuse).toBe(formatCount(recorded.n2_prime));
    expect(view.savings).toBe(formatMoney(recorded.savings));
  });

  it('matches the recorded response byte-for-byte after parsing', () => {
    expect(recorded.n2).toBe(20392);
    expect(recorded.arm_treat).toBe(4079);
    expect(recorded.arm_control).toBe(16313);
    expect(recorded.reuse_treat).toBe(1901);
    expect(recorded.reuse_control).toBe(7602);
    expect(recorded.n2_prime).toBe(10889);
    expect(recorded.savings).toBe(2851500.0);
    expect(recorded.schema_version).toBe('1');
  });

  it('renders a missing cost as a dash, not zero', () => {
    const view = panelView({ ...recorded, savings: null });
    expect(view.savings).toBe('—');
  });
});
