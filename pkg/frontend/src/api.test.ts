import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiError, askQuestion, fetchHealth, postVote } from './api';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('askQuestion', () => {
  it('posts the query and returns the parsed response', async () => {
    const payload = {
      query_id: 'q1',
      answer: { query_id: 'q1', blocks: [], provenance: [] },
      text_answer: 'Hi.',
      spans: [],
      timing_ms: {},
    };
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(payload));
    vi.stubGlobal('fetch', fetchMock);

    const response = await askQuestion('http://api.test', 'why?');
    expect(response).toEqual(payload);
    expect(fetchMock).toHaveBeenCalledWith('http://api.test/ask', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ query: 'why?', text_only: false }),
    });
  });

  it('surfaces the service detail message on errors', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(
        jsonResponse({ detail: 'query must not be empty' }, 400)
      )
    );
    const failure = askQuestion('http://api.test', '');
    await expect(failure).rejects.toThrow('query must not be empty');
    await expect(
      askQuestion('http://api.test', '')
    ).rejects.toMatchObject({ status: 400 });
  });
});

describe('fetchHealth', () => {
  it('parses the health payload', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(
        jsonResponse({ status: 'ok', index_size: 12, provider_mode: 'stub' })
      )
    );
    const health = await fetchHealth('http://api.test');
    expect(health.index_size).toBe(12);
  });
});

describe('postVote', () => {
  it('sends the record as JSON', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ status: 'recorded', item_id: 'q1' }));
    vi.stubGlobal('fetch', fetchMock);

    const record = {
      item_id: 'q1',
      model: 'gpt4',
      annotator_id: 0,
      preference: 'multimodal',
    } as const;
    await postVote('http://api.test', record);
    expect(fetchMock).toHaveBeenCalledWith('http://api.test/vote', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(record),
    });
  });

  it('maps duplicate votes to an ApiError with status 409', async () => {
    vi.stubGlobal(
      'fetch',
      vi.fn().mockResolvedValue(
        jsonResponse(
          { detail: 'this annotator already voted on this item' },
          409
        )
      )
    );
    const record = {
      item_id: 'q1',
      model: 'gpt4',
      annotator_id: 0,
      preference: 'same',
    } as const;
    try {
      await postVote('http://api.test', record);
      expect.unreachable('postVote should have thrown');
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
    }
  });
});
