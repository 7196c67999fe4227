// Typed client for the qa-service JSON API. The fetch implementation is
// injectable so tests can run against canned responses.

export interface AskOption {
  id: string;
  kind: string;
  score: number;
}

export interface Disambiguation {
  slot: string;
  options: AskOption[];
}

export interface Answer {
  qclass: string;
  structure: string;
  payload_kind: string;
  rendered_text: string;
  count?: number;
  individuals?: string[];
  values?: string[];
  boolean?: boolean;
  description?: unknown;
  trace?: unknown[];
}

export interface PipelineTrace {
  tokens?: [string, string][];
  question_words?: [string, string][];
  noun_phrases?: { text: string; term: string; embedded: boolean }[];
  relations?: { text: string; pattern: string }[];
  ir?: unknown;
  onto_tuples?: unknown[];
}

export interface AskResponse {
  status: "answered" | "needs_disambiguation" | "error";
  answer?: Answer;
  disambiguation?: Disambiguation;
  session_id?: string;
  trace?: PipelineTrace;
  failure_stage?: string;
  message?: string;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class QaClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post(path: string, body: unknown): Promise<AskResponse> {
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `không kết nối được máy chủ (${String(err)})`);
    }
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const data = (await response.json()) as { detail?: string };
        if (data.detail) detail = data.detail;
      } catch {
        // keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as AskResponse;
  }

  ask(question: string): Promise<AskResponse> {
    return this.post("/api/ask", { question });
  }

  resolve(sessionId: string, choice: number): Promise<AskResponse> {
    return this.post("/api/resolve", { session_id: sessionId, choice });
  }
}
