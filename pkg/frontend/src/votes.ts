// Preference voting: one vote per turn, locked once set, serialized in
// the evaluation CSV schema (Likert columns left empty).

import type { ChatTurn, ModelLabel, Preference, VoteRecord } from './types';

export const CSV_HEADER =
  'item_id,model,annotator_id,usefulness,readability,relevance,preference';

export interface VoterIdentity {
  model: ModelLabel;
  annotatorId: number;
}

/**
 * Record a preference vote on a turn. The turn is mutated to carry the
 * vote so later attempts are rejected; the returned record is what the
 * service appends to its CSV.
 */
export function submitVote(
  turn: ChatTurn,
  vote: Preference,
  identity: VoterIdentity
): VoteRecord {
  if (turn.vote !== undefined) {
    throw new Error('this turn already has a vote');
  }
  if (!Number.isInteger(identity.annotatorId) || identity.annotatorId < 0) {
    throw new Error('annotator id must be a non-negative integer');
  }
  turn.vote = vote;
  return {
    item_id: turn.response.query_id,
    model: identity.model,
    annotator_id: identity.annotatorId,
    preference: vote,
  };
}

function escapeField(value: string): string {
  if (/[",\n\r]/.test(value)) {
    return '"' + value.replace(/"/g, '""') + '"';
  }
  return value;
}

/** Serialize a vote as one evaluation-schema CSV row (no newline). */
export function toCsvRow(record: VoteRecord): string {
  return [
    escapeField(record.item_id),
    record.model,
    String(record.annotator_id),
    '',
    '',
    '',
    record.preference,
  ].join(',');
}

function splitCsv(line: string): string[] {
  const fields: string[] = [];
  let current = '';
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"' && line[i + 1] === '"') {
        current += '"';
        i++;
      } else if (ch === '"') {
        quoted = false;
      } else {
        current += ch;
      }
    } else if (ch === '"' && current === '') {
      quoted = true;
    } else if (ch === ',') {
      fields.push(current);
      current = '';
    } else {
      current += ch;
    }
  }
  fields.push(current);
  return fields;
}

/** Parse one evaluation-schema CSV row back into a vote record. */
export function parseCsvRow(line: string): VoteRecord {
  const fields = splitCsv(line);
  if (fields.length !== 7) {
    throw new Error(`expected 7 CSV fields, got ${fields.length}`);
  }
  const [itemId, model, annotator, usefulness, readability, relevance, pref] =
    fields;
  if (usefulness !== '' || readability !== '' || relevance !== '') {
    throw new Error('vote rows must leave the Likert columns empty');
  }
  if (model !== 'gpt35' && model !== 'gpt4') {
    throw new Error(`unknown model ${JSON.stringify(model)}`);
  }
  if (pref !== 'multimodal' && pref !== 'text_only' && pref !== 'same') {
    throw new Error(`unknown preference ${JSON.stringify(pref)}`);
  }
  const annotatorId = Number(annotator);
  if (!Number.isInteger(annotatorId) || annotatorId < 0) {
    throw new Error(`bad annotator id ${JSON.stringify(annotator)}`);
  }
  return {
    item_id: itemId,
    model,
    annotator_id: annotatorId,
    preference: pref,
  };
}
