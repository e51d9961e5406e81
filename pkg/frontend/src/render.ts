// Pure view-model layer: turns a MultimodalAnswer into a list of
// renderable block views, one per answer block, in answer order. A
// block that cannot be rendered becomes an error placeholder in its
// position; the rest of the answer still renders.

import type { MultimodalAnswer } from './types';

export type BlockView =
  | { kind: 'paragraph'; text: string }
  | { kind: 'figure'; uri: string; caption: string }
  | { kind: 'player'; uri: string; summary: string }
  | { kind: 'grid'; columns: string[]; rows: string[][] }
  | { kind: 'error'; message: string };

export interface AnswerView {
  queryId: string;
  blocks: BlockView[];
}

/**
 * Convert a table payload (JSON object of column name -> cell list)
 * into a column-ordered grid. Ragged columns are padded with empty
 * cells so every row has one cell per column.
 */
export function tableToGrid(payload: string): {
  columns: string[];
  rows: string[][];
} {
  let parsed: unknown;
  try {
    parsed = JSON.parse(payload);
  } catch {
    throw new Error('table payload is not valid JSON');
  }
  if (parsed === null || typeof parsed !== 'object' || Array.isArray(parsed)) {
    throw new Error('table payload must be a JSON object of columns');
  }
  const columns = Object.keys(parsed);
  if (columns.length === 0) {
    throw new Error('table payload has no columns');
  }
  const cells = columns.map((name) => {
    const value = (parsed as Record<string, unknown>)[name];
    if (!Array.isArray(value)) {
      throw new Error(`column ${JSON.stringify(name)} is not a list`);
    }
    return value.map((cell) => String(cell));
  });
  const height = Math.max(...cells.map((column) => column.length));
  const rows: string[][] = [];
  for (let i = 0; i < height; i++) {
    rows.push(cells.map((column) => column[i] ?? ''));
  }
  return { columns, rows };
}

function blockView(block: unknown): BlockView {
  if (block === null || typeof block !== 'object') {
    return { kind: 'error', message: 'malformed block' };
  }
  const record = block as Record<string, unknown>;
  switch (record.type) {
    case 'text':
      return { kind: 'paragraph', text: String(record.text ?? '') };
    case 'image':
      return {
        kind: 'figure',
        uri: String(record.uri ?? ''),
        caption: String(record.caption ?? ''),
      };
    case 'video':
      return {
        kind: 'player',
        uri: String(record.uri ?? ''),
        summary: String(record.summary ?? ''),
      };
    case 'table':
      try {
        return { kind: 'grid', ...tableToGrid(String(record.payload ?? '')) };
      } catch (error) {
        return { kind: 'error', message: (error as Error).message };
      }
    default:
      return {
        kind: 'error',
        message: `unsupported block type ${JSON.stringify(record.type)}`,
      };
  }
}

export function renderAnswer(answer: MultimodalAnswer): AnswerView {
  return {
    queryId: answer.query_id,
    blocks: answer.blocks.map((block) => blockView(block)),
  };
}
