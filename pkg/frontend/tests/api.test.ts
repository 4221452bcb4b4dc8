import { afterEach, describe, expect, it, vi } from 'vitest';

import { LatestWins, ServiceError, postDesign } from '../src/api.js';
import { defaultState, specFromState } from '../src/state.js';

afterEach(() => vi.unstubAllGlobals());

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

describe('service client', () => {
  it('returns the parsed result body on success', async () => {
    vi.stubGlobal('fetch', vi.fn(async () => jsonResponse(200, { n2: 20392 })));
    const result = await postDesign(specFromState(defaultState()));
    expect(result.n2).toBe(20392);
  });

  it('surfaces the error object with its field on 400', async () => {
    vi.stubGlobal('fetch', vi.fn(async () =>
      jsonResponse(400, { code: 'validation_error', message: 'k2 must be > 0', field: 'k2' })));
    await expect(postDesign(specFromState(defaultState())))
      .rejects.toMatchObject({ status: 400, api: { field: 'k2' } });
    try {
      await postDesign(specFromState(defaultState()));
    } catch (error) {
      expect(error).toBeInstanceOf(ServiceError);
    }
  });

  it('latest-wins aborts the in-flight request', async () => {
    const seen: AbortSignal[] = [];
    vi.stubGlobal('fetch', vi.fn(async (_url: string, init: RequestInit) => {
      seen.push(init.signal as AbortSignal);
      return jsonResponse(200, { ok: true });
    }));
    const serial = new LatestWins();
    const first = serial.run((signal) => postDesign(specFromState(defaultState()), signal));
    const second = serial.run((signal) => postDesign(specFromState(defaultState()), signal));
    await Promise.allSettled([first, second]);
    expect(seen).toHaveLength(2);
    expect(seen[0].aborted).toBe(true);
    expect(seen[1].aborted).toBe(false);
  });
});
