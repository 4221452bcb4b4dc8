import { describe, expect, it } from 'vitest';
import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import { isNonIncreasing, lineChartSvg } from '../src/chart.js';
import { SweepPoint } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));
const fixture = (name: string) =>
  JSON.parse(readFileSync(join(here, 'fixtures', name), 'utf-8'));

describe('sensitivity sweeps', () => {
  const sweep = fixture('sensitivity_cr12.json') as SweepPoint[];

  it('recorded concordance sweep is non-increasing from N2 down to zero', () => {
    const values = sweep.map((p) => p.n2_prime);
    expect(isNonIncreasing(values)).toBe(true);
    expect(values[0]).toBe(20392);
    expect(values[values.length - 1]).toBe(0);
  });

  it('published midpoint appears on the curve', () => {
    const midpoint = sweep.find((p) => p.value === 0.466);
    expect(midpoint?.n2_prime).toBe(10889);
  });

  it('completion sweep spans zero to full savings', () => {
    const completion = fixture('sensitivity_completion.json') as SweepPoint[];
    expect(completion[0].savings).toBe(0.0);
    expect(completion[completion.length - 1].savings).toBe(2851500.0);
    expect(isNonIncreasing(completion.map((p) => p.n2_prime))).toBe(true);
  });

  it('chart renders markers plus a path for multi-point series', () => {
    const svg = lineChartSvg(sweep.map((p) => ({ x: p.value, y: p.n2_prime })),
      'cr12', 'enrollment');
    expect(svg).toContain('<path class="series"');
    expect((svg.match(/<circle/g) ?? []).length).toBe(sweep.length);
  });

  it('single-point sweep renders one marker and no path', () => {
    const svg = lineChartSvg([{ x: 0.5, y: 1000 }], 'cr12', 'enrollment');
    expect(svg).not.toContain('<path class="series"');
    expect((svg.match(/<circle/g) ?? []).length).toBe(1);
  });

  it('detects a non-monotone series', () => {
    expect(isNonIncreasing([3, 2, 2.5])).toBe(false);
    expect(isNonIncreasing([3, 3, 2])).toBe(true);
  });
});
