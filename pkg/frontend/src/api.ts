/** Typed client for the annotation service HTTP API. */

import type {
  ErrorPayload,
  Plane,
  SegmentParams,
  SegmentResponse,
  SessionDescriptor,
  StrokePayload,
  StrokeResponse,
  UndoResponse,
  VolumesMl,
} from './types';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: ErrorPayload,
  ) {
    super(`${payload.code}: ${payload.message}`);
  }

  get code(): string {
    return this.payload.code;
  }

  get side(): 'left' | 'right' | undefined {
    return this.payload.side;
  }
}

async function parseError(response: Response): Promise<never> {
  let payload: ErrorPayload = { code: 'http_error', message: `HTTP ${response.status}` };
  try {
    const body = (await response.json()) as { error?: ErrorPayload };
    if (body.error) {
      payload = body.error;
    }
  } catch {
    // non-JSON error body; keep the generic payload
  }
  throw new ApiError(response.status, payload);
}

export class AnnotationApi {
  constructor(readonly baseUrl: string = '') {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, init);
    if (!response.ok) {
      await parseError(response);
    }
    return (await response.json()) as T;
  }

  async createSessionFromFile(file: Blob, name: string): Promise<SessionDescriptor> {
    const form = new FormData();
    form.append('file', file, name);
    return this.json('/api/sessions', { method: 'POST', body: form });
  }

  async createSessionFromPath(path: string): Promise<SessionDescriptor> {
    return this.json('/api/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ path }),
    });
  }

  sliceUrl(
    sessionId: string,
    plane: Plane,
    index: number,
    windowCenter: number,
    windowWidth: number,
    overlay: boolean,
    revision = 0,
  ): string {
    const query = new URLSearchParams({
      plane,
      index: String(index),
      wc: String(windowCenter),
      ww: String(windowWidth),
      overlay: String(overlay),
      rev: String(revision),
    });
    return `${this.baseUrl}/api/sessions/${sessionId}/slice?${query}`;
  }

  async segment(
    sessionId: string,
    mode: 'auto' | 'seeded',
    params?: SegmentParams,
  ): Promise<SegmentResponse> {
    return this.json(`/api/sessions/${sessionId}/segment`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(params ? { mode, params } : { mode }),
    });
  }

  async submitStroke(sessionId: string, stroke: StrokePayload): Promise<StrokeResponse> {
    return this.json(`/api/sessions/${sessionId}/strokes`, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(stroke),
    });
  }

  async undo(sessionId: string): Promise<UndoResponse> {
    return this.json(`/api/sessions/${sessionId}/undo`, { method: 'POST' });
  }

  async metrics(sessionId: string): Promise<VolumesMl> {
    return this.json(`/api/sessions/${sessionId}/metrics`);
  }

  async exportMask(sessionId: string): Promise<ArrayBuffer> {
    const response = await fetch(`${this.baseUrl}/api/sessions/${sessionId}/mask`);
    if (!response.ok) {
      await parseError(response);
    }
    return response.arrayBuffer();
  }
}
