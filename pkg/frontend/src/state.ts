// UI state machine. One request is in flight at a time (phase "waiting");
// options are non-empty exactly in phase "needs_choice".

import type { Answer, AskOption, AskResponse, PipelineTrace } from "./api.js";

export type Phase = "idle" | "waiting" | "needs_choice" | "answered" | "error";

export interface UiState {
  phase: Phase;
  question: string;
  options: AskOption[];
  slot: string;
  answer: Answer | null;
  sessionId: string | null;
  trace: PipelineTrace | null;
  error: string;
  canRetry: boolean;
}

export const initialState: UiState = {
  phase: "idle",
  question: "",
  options: [],
  slot: "",
  answer: null,
  sessionId: null,
  trace: null,
  error: "",
  canRetry: false,
};

export function assertInvariant(state: UiState): void {
  const hasOptions = state.options.length > 0;
  if (hasOptions !== (state.phase === "needs_choice")) {
    throw new Error(
      `broken invariant: phase=${state.phase} with ${state.options.length} options`,
    );
  }
}

export function toWaiting(state: UiState, question: string): UiState {
  return {
    ...state,
    phase: "waiting",
    question,
    options: [],
    slot: "",
    error: "",
    canRetry: false,
  };
}

export function fromResponse(state: UiState, response: AskResponse): UiState {
  if (response.status === "answered" && response.answer) {
    return {
      ...state,
      phase: "answered",
      answer: response.answer,
      options: [],
      slot: "",
      sessionId: null,
      trace: response.trace ?? null,
      error: "",
    };
  }
  if (response.status === "needs_disambiguation" && response.disambiguation) {
    return {
      ...state,
      phase: "needs_choice",
      options: response.disambiguation.options,
      slot: response.disambiguation.slot,
      sessionId: response.session_id ?? null,
      trace: response.trace ?? null,
      answer: null,
    };
  }
  return toError(
    state,
    response.message
      ? `${response.failure_stage ?? "pipeline"}: ${response.message}`
      : "câu hỏi không xử lý được",
    false,
  );
}

export function toError(state: UiState, message: string, canRetry: boolean): UiState {
  return {
    ...state,
    phase: "error",
    options: [],
    slot: "",
    answer: null,
    sessionId: null,
    error: message,
    canRetry,
  };
}
