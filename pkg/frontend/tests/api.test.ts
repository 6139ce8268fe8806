import { afterEach, describe, expect, it, vi } from 'vitest';

import { AnnotationApi, ApiError } from '../src/api';

function stubFetch(status: number, body: unknown): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async () =>
    new Response(JSON.stringify(body), {
      status,
      headers: { 'content-type': 'application/json' },
    }),
  );
  vi.stubGlobal('fetch', mock);
  return mock;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('AnnotationApi', () => {
  it('posts segment requests with mode and params', async () => {
    const mock = stubFetch(200, { volumes_ml: { left: 1, right: 2, combined: 3 }, seeds: [], elapsed_ms: 5 });
    const api = new AnnotationApi('http://h');
    const result = await api.segment('abc', 'auto', {
      mean: -550,
      sigma: 150,
      theta: 0.5,
      adjacency: 6,
    });
    expect(result.volumes_ml.combined).toBe(3);
    const [url, init] = mock.mock.calls[0]!;
    expect(url).toBe('http://h/api/sessions/abc/segment');
    expect(JSON.parse((init as RequestInit).body as string)).toEqual({
      mode: 'auto',
      params: { mean: -550, sigma: 150, theta: 0.5, adjacency: 6 },
    });
  });

  it('builds slice URLs with every window parameter', () => {
    const api = new AnnotationApi();
    const url = api.sliceUrl('s1', 'coronal', 12, -500, 1400, true, 7);
    expect(url).toContain('/api/sessions/s1/slice?');
    const params = new URLSearchParams(url.split('?')[1]);
    expect(params.get('plane')).toBe('coronal');
    expect(params.get('index')).toBe('12');
    expect(params.get('wc')).toBe('-500');
    expect(params.get('ww')).toBe('1400');
    expect(params.get('overlay')).toBe('true');
    expect(params.get('rev')).toBe('7');
  });

  it('surfaces machine-readable error payloads', async () => {
    stubFetch(422, {
      error: { code: 'missing_side', message: 'no right seeds', side: 'right' },
    });
    const api = new AnnotationApi();
    const failure = await api.segment('abc', 'seeded').catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ApiError);
    const apiError = failure as ApiError;
    expect(apiError.status).toBe(422);
    expect(apiError.code).toBe('missing_side');
    expect(apiError.side).toBe('right');
  });

  it('falls back to a generic error for non-JSON bodies', async () => {
    vi.stubGlobal('fetch', vi.fn(async () => new Response('boom', { status: 500 })));
    const api = new AnnotationApi();
    const failure = await api.undo('abc').catch((err: unknown) => err);
    expect((failure as ApiError).code).toBe('http_error');
  });

  it('sends stroke payloads verbatim', async () => {
    const mock = stubFetch(200, { changed: 4, volume_ml: 1.5 });
    const api = new AnnotationApi();
    const stroke = {
      plane: 'axial' as const,
      slice_index: 9,
      points: [[1, 2]] as Array<[number, number]>,
      radius_px: 3,
      mode: 'delete' as const,
    };
    const result = await api.submitStroke('s', stroke);
    expect(result.changed).toBe(4);
    const [, init] = mock.mock.calls[0]!;
    expect(JSON.parse((init as RequestInit).body as string)).toEqual(stroke);
  });
});
