/** Display formatting only — every number shown originates from the service
 * response verbatim; these functions add separators and units, never math. */

export function formatCount(value: number): string {
  return value.toLocaleString('en-US', { maximumFractionDigits: 0 });
}

export function formatMoney(value: number | null): string {
  if (value === null) return '—';
  return '$' + value.toLocaleString('en-US', { maximumFractionDigits: 0 });
}

export function formatRate(value: number): string {
  return (100 * value).toLocaleString('en-US', { maximumFractionDigits: 2 }) + '%';
}

export function formatSigned(value: number, digits = 4): string {
  const text = value.toFixed(digits);
  return value > 0 ? '+' + text : text;
}
