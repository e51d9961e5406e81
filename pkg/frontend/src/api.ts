// Thin fetch wrappers for the three service endpoints the client uses.

import type { AskResponse, HealthResponse, VoteRecord } from './types';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === 'string') {
      return body.detail;
    }
  } catch {
    // fall through to the status line
  }
  return `${response.status} ${response.statusText}`;
}

async function expectOk(response: Response): Promise<Response> {
  if (!response.ok) {
    throw new ApiError(response.status, await readDetail(response));
  }
  return response;
}

export async function fetchHealth(base: string): Promise<HealthResponse> {
  const response = await expectOk(await fetch(`${base}/health`));
  return (await response.json()) as HealthResponse;
}

export async function askQuestion(
  base: string,
  query: string,
  textOnly = false
): Promise<AskResponse> {
  const response = await expectOk(
    await fetch(`${base}/ask`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ query, text_only: textOnly }),
    })
  );
  return (await response.json()) as AskResponse;
}

export async function postVote(
  base: string,
  record: VoteRecord
): Promise<void> {
  await expectOk(
    await fetch(`${base}/vote`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(record),
    })
  );
}
