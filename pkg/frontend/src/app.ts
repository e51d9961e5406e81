// DOM wiring for the chat page: one in-flight question at a time,
// answers rendered block by block, a side-by-side toggle against the
// text-only answer, and one preference vote per turn.

import { ApiError, askQuestion, fetchHealth, postVote } from './api';
import { renderAnswer, type BlockView } from './render';
import { submitVote, type VoterIdentity } from './votes';
import type { AskResponse, ChatTurn, ModelLabel, Preference } from './types';

const API_BASE =
  new URLSearchParams(window.location.search).get('api') ??
  'http://127.0.0.1:8000';

const turns: ChatTurn[] = [];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function must<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function blockToDom(view: BlockView): HTMLElement {
  switch (view.kind) {
    case 'paragraph':
      return el('p', 'block-text', view.text);
    case 'figure': {
      const figure = el('figure', 'block-image');
      const img = el('img');
      img.src = view.uri;
      img.alt = view.caption;
      img.loading = 'lazy';
      figure.append(img, el('figcaption', undefined, view.caption));
      return figure;
    }
    case 'player': {
      const figure = el('figure', 'block-video');
      const video = el('video');
      video.src = view.uri;
      video.controls = true;
      video.preload = 'none';
      figure.append(video, el('figcaption', undefined, view.summary));
      return figure;
    }
    case 'grid': {
      const wrap = el('div', 'block-table');
      const table = el('table');
      const head = el('thead');
      const headRow = el('tr');
      for (const column of view.columns) {
        headRow.append(el('th', undefined, column));
      }
      head.append(headRow);
      const body = el('tbody');
      for (const row of view.rows) {
        const tr = el('tr');
        for (const cell of row) {
          tr.append(el('td', undefined, cell));
        }
        body.append(tr);
      }
      table.append(head, body);
      wrap.append(table);
      return wrap;
    }
    case 'error':
      return el('div', 'block-error', `Could not render block: ${view.message}`);
  }
}

function identity(): VoterIdentity {
  const model = must<HTMLSelectElement>('model').value as ModelLabel;
  const annotatorId = Number(must<HTMLInputElement>('annotator').value);
  return { model, annotatorId };
}

function voteBar(turn: ChatTurn): HTMLElement {
  const bar = el('div', 'vote-bar');
  const note = el('span', 'vote-note', 'Which answer do you prefer?');
  const choices: [Preference, string][] = [
    ['multimodal', 'Multimodal'],
    ['text_only', 'Text only'],
    ['same', 'Same'],
  ];
  const buttons = choices.map(([value, label]) => {
    const button = el('button', 'vote-button', label);
    button.type = 'button';
    button.addEventListener('click', () => {
      void castVote(turn, value, buttons, note);
    });
    return button;
  });
  bar.append(note, ...buttons);
  return bar;
}

async function castVote(
  turn: ChatTurn,
  vote: Preference,
  buttons: HTMLButtonElement[],
  note: HTMLElement
): Promise<void> {
  let record;
  try {
    record = submitVote(turn, vote, identity());
  } catch (error) {
    note.textContent = (error as Error).message;
    return;
  }
  buttons.forEach((b) => (b.disabled = true));
  try {
    await postVote(API_BASE, record);
    note.textContent = `Vote recorded: ${vote}`;
  } catch (error) {
    if (error instanceof ApiError && error.status === 409) {
      note.textContent = 'This annotator already voted on this item.';
      return; // keep the turn locked; the server has a vote already
    }
    turn.vote = undefined; // not recorded; allow a retry
    buttons.forEach((b) => (b.disabled = false));
    note.textContent = `Vote failed: ${(error as Error).message}`;
  }
}

function answerMeta(response: AskResponse): string {
  const total = Object.values(response.timing_ms).reduce((a, b) => a + b, 0);
  const spans = response.spans.length;
  const assets = response.answer.provenance.length;
  return `${total} ms · ${spans} source span${spans === 1 ? '' : 's'} · ${assets} attached asset${assets === 1 ? '' : 's'}`;
}

function appendTurn(turn: ChatTurn): void {
  const log = must<HTMLElement>('log');
  const item = el('article', 'turn');
  item.append(el('div', 'bubble user', turn.query));

  const answer = el('div', 'bubble answer');
  const view = renderAnswer(turn.response.answer);
  const multimodal = el('div', 'answer-multimodal');
  for (const block of view.blocks) {
    multimodal.append(blockToDom(block));
  }
  const textOnly = el('div', 'answer-text-only');
  textOnly.append(
    el('h4', undefined, 'Text-only answer'),
    el('p', undefined, turn.response.text_answer)
  );
  textOnly.hidden = true;

  const toggle = el('button', 'compare-toggle', 'Compare with text-only');
  toggle.type = 'button';
  toggle.addEventListener('click', () => {
    textOnly.hidden = !textOnly.hidden;
    answer.classList.toggle('side-by-side', !textOnly.hidden);
    toggle.textContent = textOnly.hidden
      ? 'Compare with text-only'
      : 'Hide text-only answer';
  });

  answer.append(
    multimodal,
    textOnly,
    el('div', 'answer-meta', answerMeta(turn.response)),
    toggle,
    voteBar(turn)
  );
  item.append(answer);
  log.append(item);
  item.scrollIntoView({ block: 'end' });
}

function appendError(message: string): void {
  must<HTMLElement>('log').append(el('div', 'bubble error', message));
}

async function refreshHealth(): Promise<void> {
  const pill = must<HTMLElement>('status');
  try {
    const health = await fetchHealth(API_BASE);
    pill.textContent = `${health.status} · ${health.index_size} indexed · ${health.provider_mode}`;
    pill.dataset.state = health.status === 'ok' ? 'ok' : 'pending';
  } catch {
    pill.textContent = 'service unreachable';
    pill.dataset.state = 'down';
  }
}

function wireForm(): void {
  const form = must<HTMLFormElement>('ask-form');
  const input = must<HTMLInputElement>('query');
  const button = must<HTMLButtonElement>('send');
  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const query = input.value.trim();
    if (!query || button.disabled) return;
    button.disabled = true;
    input.disabled = true;
    askQuestion(API_BASE, query)
      .then((response) => {
        turns.push({ query, response, timestamp: Date.now() });
        appendTurn(turns[turns.length - 1]);
        input.value = '';
      })
      .catch((error) => {
        appendError(`Ask failed: ${(error as Error).message}`);
      })
      .finally(() => {
        button.disabled = false;
        input.disabled = false;
        input.focus();
      });
  });
}

export function start(): void {
  wireForm();
  void refreshHealth();
  window.setInterval(() => void refreshHealth(), 15000);
}

start();
