// Wire types shared with the answer service. Field names match the
// JSON the service emits, so everything here is snake_case.

export type Preference = 'multimodal' | 'text_only' | 'same';

// The two answer arms the evaluation CSV schema distinguishes between;
// votes must carry one of these labels in the model column.
export const MODEL_LABELS = ['gpt35', 'gpt4'] as const;
export type ModelLabel = (typeof MODEL_LABELS)[number];

export interface TextBlock {
  type: 'text';
  text: string;
}

export interface ImageBlock {
  type: 'image';
  uri: string;
  caption: string;
}

export interface VideoBlock {
  type: 'video';
  uri: string;
  summary: string;
}

export interface TableBlock {
  type: 'table';
  /** JSON object: column name -> list of cell strings. */
  payload: string;
  text: string;
}

export type Block = TextBlock | ImageBlock | VideoBlock | TableBlock;

export interface Provenance {
  block: number;
  asset_id: string;
  span_id: string;
}

export interface MultimodalAnswer {
  query_id: string;
  blocks: Block[];
  provenance: Provenance[];
}

export interface AnswerSpan {
  span_id: string;
  start_sentence: number;
  end_sentence: number;
  source_snippet_id: string;
  score: number;
  section_id: string;
}

export interface AskResponse {
  query_id: string;
  answer: MultimodalAnswer;
  text_answer: string;
  spans: AnswerSpan[];
  timing_ms: Record<string, number>;
}

export interface HealthResponse {
  status: string;
  index_size: number;
  provider_mode: string;
}

/** One row of the evaluation CSV, preference column only. */
export interface VoteRecord {
  item_id: string;
  model: ModelLabel;
  annotator_id: number;
  preference: Preference;
}

export interface ChatTurn {
  query: string;
  response: AskResponse;
  vote?: Preference;
  timestamp: number;
}
