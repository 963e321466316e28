/**
 * Thin client for the review server endpoints:
 * GET /pairs, GET /contexts, POST /decisions, GET /stats, GET /export/reference.
 */

import type {
  ContextSentence,
  DecisionRecord,
  DecisionRequest,
  PairsPage,
  PairStatus,
  Stats,
} from './types.js';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** A response the server produced on purpose (4xx/5xx with a detail body). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

// FastAPI-style error bodies carry {detail: string | [{msg, loc}, ...]}.
function describeDetail(body: unknown, status: number): string {
  if (body && typeof body === 'object' && 'detail' in body) {
    const detail = (body as { detail: unknown }).detail;
    if (typeof detail === 'string') return detail;
    if (Array.isArray(detail)) {
      const parts = detail.map((item) =>
        item && typeof item === 'object' && 'msg' in item ? String((item as { msg: unknown }).msg) : String(item),
      );
      if (parts.length > 0) return parts.join('; ');
    }
  }
  return `server error (HTTP ${status})`;
}

export class ReviewApi {
  private readonly fetchImpl: FetchLike;

  constructor(
    private readonly baseUrl: string = '',
    fetchImpl?: FetchLike,
  ) {
    this.fetchImpl = fetchImpl ?? ((url, init) => globalThis.fetch(url, init));
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      const body = await response.json().catch(() => null);
      throw new ApiError(response.status, describeDetail(body, response.status));
    }
    return (await response.json()) as T;
  }

  getPairs(status: PairStatus, offset: number, limit: number): Promise<PairsPage> {
    const query = new URLSearchParams({
      status,
      offset: String(offset),
      limit: String(limit),
    });
    return this.requestJson<PairsPage>(`/pairs?${query}`);
  }

  getContexts(word: string, limit: number): Promise<ContextSentence[]> {
    const query = new URLSearchParams({ word, limit: String(limit) });
    return this.requestJson<ContextSentence[]>(`/contexts?${query}`);
  }

  postDecision(decision: DecisionRequest): Promise<DecisionRecord> {
    const body: Record<string, string> = {
      translit: decision.translit,
      canonical: decision.canonical,
      verdict: decision.verdict,
      reviewer: decision.reviewer,
    };
    if (decision.chosen_canonical !== undefined) {
      body.chosen_canonical = decision.chosen_canonical;
    }
    return this.requestJson<DecisionRecord>('/decisions', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getStats(): Promise<Stats> {
    return this.requestJson<Stats>('/stats');
  }

  async getExport(): Promise<string> {
    const response = await this.fetchImpl(`${this.baseUrl}/export/reference`);
    if (!response.ok) {
      throw new ApiError(response.status, `server error (HTTP ${response.status})`);
    }
    return response.text();
  }
}
