/** Dependency-free SVG line chart for sensitivity sweeps. */

export interface ChartPoint {
  x: number;
  y: number;
}

export function isNonIncreasing(values: number[], tolerance = 1e-9): boolean {
  return values.every((v, i) => i === 0 || v <= values[i - 1] + tolerance);
}

const WIDTH = 640;
const HEIGHT = 300;
const PAD = { left: 70, right: 16, top: 14, bottom: 40 };

function scale(value: number, lo: number, hi: number, a: number, b: number): number {
  if (hi === lo) return (a + b) / 2;
  return a + ((value - lo) / (hi - lo)) * (b - a);
}

function ticks(lo: number, hi: number, count = 5): number[] {
  if (hi === lo) return [lo];
  const step = (hi - lo) / (count - 1);
  return Array.from({ length: count }, (_, i) => lo + i * step);
}

/** Render points as an SVG string.  A single point renders as one marker
 * with no connecting path. */
export function lineChartSvg(points: ChartPoint[], xLabel: string, yLabel: string): string {
  if (points.length === 0) return '<svg role="img" aria-label="empty chart"></svg>';
  const xs = points.map((p) => p.x);
  const ys = points.map((p) => p.y);
  const xLo = Math.min(...xs);
  const xHi = Math.max(...xs);
  const yLo = Math.min(...ys, 0);
  const yHi = Math.max(...ys);
  const px = (x: number) => scale(x, xLo, xHi, PAD.left, WIDTH - PAD.right);
  const py = (y: number) => scale(y, yLo, yHi, HEIGHT - PAD.bottom, PAD.top);

  const parts: string[] = [];
  parts.push(`<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" aria-label="${yLabel} vs ${xLabel}">`);
  for (const t of ticks(yLo, yHi)) {
    const y = py(t).toFixed(1);
    parts.push(`<line class="grid" x1="${PAD.left}" y1="${y}" x2="${WIDTH - PAD.right}" y2="${y}"/>`);
    parts.push(`<text class="tick" x="${PAD.left - 8}" y="${y}" text-anchor="end">${Math.round(t).toLocaleString('en-US')}</text>`);
  }
  for (const t of ticks(xLo, xHi)) {
    const x = px(t).toFixed(1);
    parts.push(`<text class="tick" x="${x}" y="${HEIGHT - PAD.bottom + 18}" text-anchor="middle">${+t.toFixed(3)}</text>`);
  }
  if (points.length > 1) {
    const path = points
      .map((p, i) => `${i === 0 ? 'M' : 'L'}${px(p.x).toFixed(1)},${py(p.y).toFixed(1)}`)
      .join(' ');
    parts.push(`<path class="series" d="${path}" fill="none"/>`);
  }
  for (const p of points) {
    parts.push(`<circle class="marker" cx="${px(p.x).toFixed(1)}" cy="${py(p.y).toFixed(1)}" r="3.5"><title>${p.x}: ${p.y.toLocaleString('en-US')}</title></circle>`);
  }
  parts.push(`<text class="axis" x="${(PAD.left + WIDTH - PAD.right) / 2}" y="${HEIGHT - 6}" text-anchor="middle">${xLabel}</text>`);
  parts.push('</svg>');
  return parts.join('');
}
