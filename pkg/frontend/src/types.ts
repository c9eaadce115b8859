// Mirrors the /api/ask response; the UI renders this payload verbatim.

export interface Candidate {
  kind: "instance_group" | "class_match" | "property_match";
  class: string;
  property: string;
  uris: string[];
  match_values: string[];
  string_sim: number;
  pagerank_norm: number;
  semantic_sim: number | null;
  score: number;
}

export interface TokenMatch {
  text: string;
  normalized: string;
  start: number;
  end: number;
  candidates: Candidate[];
}

export interface UiInterpretation {
  rank: number;
  score: number;
  sparql: string;
  explanation: Record<string, string>;
  empty: boolean;
  columns: [string, string][];
  rows: string[][];
}

export interface AskResponse {
  question: string;
  dataset: string;
  tokens: TokenMatch[];
  interpretations: UiInterpretation[];
}

export interface AskRejection {
  error: string;
  skipped?: string[];
}
