/** JSON shapes of the session service API. */

export interface QuestionView {
  node: string;
  ordinal: number;
  live_count: number;
}

export interface TranscriptEntry {
  node: string;
  answer: boolean;
}

export type SessionStatus = "open" | "resolved" | "abandoned";

export interface SessionView {
  session_id: string;
  hierarchy_id: string;
  policy: string;
  mode: string;
  object_ref: string;
  status: SessionStatus;
  questions_asked: number;
  live_count: number | null;
  question: QuestionView | null;
  result: string | null;
  transcript?: TranscriptEntry[];
}

export interface HierarchyView {
  hierarchy_id: string;
  stats: Record<string, unknown>;
  labels: string[];
  has_weights: boolean;
  has_costs: boolean;
}

export interface HierarchyStats {
  hierarchy_id: string;
  n: number;
  labeled_total: number;
  distribution: Record<string, number>;
  top: [string, number][];
  rolling_mean_questions: number | null;
  sessions: { open: number; resolved: number; abandoned: number };
}

export interface NewSessionRequest {
  hierarchy_id: string;
  policy?: string;
  mode?: string;
  object_ref?: string;
}
