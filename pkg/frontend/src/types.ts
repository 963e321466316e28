/**
 * Shapes exchanged with the review server, plus the app configuration.
 * Field names mirror the server payloads exactly.
 */

export type PairStatus = 'pending' | 'accepted' | 'rejected' | 'remapped';

export type Verdict = 'accept' | 'reject' | 'remap';

export interface PairCard {
  translit: string;
  canonical: string;
  semantic_score: number;
  lexical_score: number;
  sources: string[];
  status: PairStatus;
  conflict_set: string[];
}

export interface PairsPage {
  pairs: PairCard[];
  total: number;
  offset: number;
  limit: number;
}

export interface ContextSentence {
  tokens: string[];
  highlight_index: number;
}

export interface DecisionRequest {
  translit: string;
  canonical: string;
  verdict: Verdict;
  reviewer: string;
  chosen_canonical?: string;
}

export interface DecisionRecord {
  translit: string;
  canonical: string;
  verdict: Verdict;
  reviewer: string;
  timestamp: string;
  chosen_canonical: string | null;
  status: PairStatus;
}

export interface Stats {
  total: number;
  pending: number;
  accepted: number;
  rejected: number;
  remapped: number;
  running_precision: number | null;
}

export interface AppConfig {
  baseUrl: string;
  reviewer: string;
  pageSize: number;
  contextLimit: number;
}

export const DEFAULT_CONFIG: AppConfig = {
  baseUrl: '',
  reviewer: 'reviewer',
  pageSize: 25,
  contextLimit: 5,
};
