/** Typed client for the /api/v1 endpoints with latest-wins cancellation:
 * at most one design request is in flight per form. */

import { ApiError, DesignResult, DesignSpec, SweepField, SweepPoint } from './types.js';

export class ServiceError extends Error {
  readonly api: ApiError;
  readonly status: number;

  constructor(status: number, api: ApiError) {
    super(api.message);
    this.status = status;
    this.api = api;
  }
}

async function post<T>(path: string, body: unknown, signal?: AbortSignal): Promise<T> {
  const response = await fetch(path, {
    method: 'POST',
    headers: { 'content-type': 'application/json' },
    body: JSON.stringify(body),
    signal,
  });
  const payload = await response.json();
  if (!response.ok) {
    throw new ServiceError(response.status, payload as ApiError);
  }
  return payload as T;
}

export function postDesign(spec: DesignSpec, signal?: AbortSignal): Promise<DesignResult> {
  return post<DesignResult>('/api/v1/design', spec, signal);
}

export function postSensitivity(
  spec: DesignSpec, field: SweepField, values: number[], signal?: AbortSignal,
): Promise<SweepPoint[]> {
  return post<SweepPoint[]>('/api/v1/design/sensitivity',
    { spec, sweep: { field, values } }, signal);
}

/** Serializes requests so a stale response can never overwrite a newer one. */
export class LatestWins {
  private controller: AbortController | null = null;

  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      return await task(controller.signal);
    } finally {
      if (this.controller === controller) this.controller = null;
    }
  }
}
