// DOM wiring: one page mirroring the original VnQAS screens — question box,
// answer panel, disambiguation buttons, collapsible pipeline trace.
// The answer panel always shows the service's rendered_text verbatim.

import { ApiError, QaClient } from "./api.js";
import {
  UiState,
  assertInvariant,
  fromResponse,
  initialState,
  toError,
  toWaiting,
} from "./state.js";

export interface App {
  state: () => UiState;
  submitQuestion: (question: string) => Promise<void>;
  chooseOption: (index: number) => Promise<void>;
  lastRequest: Promise<void>;
}

export function createApp(root: HTMLElement, client: QaClient): App {
  root.innerHTML = `
    <header class="masthead">
      <h1>VnQAS</h1>
      <p class="subtitle">Vietnamese Question Answering System</p>
    </header>
    <form id="ask-form">
      <label for="question">Câu hỏi:</label>
      <input id="question" name="question" autocomplete="off"
             placeholder="có bao nhiêu sinh viên học lớp k50 khoa học máy tính?" />
      <button id="submit" type="submit" disabled>Trả lời</button>
    </form>
    <section id="status" class="status" hidden></section>
    <section id="choices" hidden>
      <p id="choices-slot"></p>
      <div id="choice-buttons"></div>
    </section>
    <section id="answer-section" hidden>
      <h2>Câu trả lời:</h2>
      <pre id="answer-panel"></pre>
    </section>
    <section id="error-section" hidden>
      <p id="error-message" class="error"></p>
      <button id="retry" type="button" hidden>Hỏi lại</button>
    </section>
    <details id="trace-section" hidden>
      <summary>Phân tích (trace)</summary>
      <pre id="trace-panel"></pre>
    </details>
  `;

  const input = root.querySelector<HTMLInputElement>("#question")!;
  const submit = root.querySelector<HTMLButtonElement>("#submit")!;
  const form = root.querySelector<HTMLFormElement>("#ask-form")!;
  const statusBox = root.querySelector<HTMLElement>("#status")!;
  const choices = root.querySelector<HTMLElement>("#choices")!;
  const choicesSlot = root.querySelector<HTMLElement>("#choices-slot")!;
  const choiceButtons = root.querySelector<HTMLElement>("#choice-buttons")!;
  const answerSection = root.querySelector<HTMLElement>("#answer-section")!;
  const answerPanel = root.querySelector<HTMLElement>("#answer-panel")!;
  const errorSection = root.querySelector<HTMLElement>("#error-section")!;
  const errorMessage = root.querySelector<HTMLElement>("#error-message")!;
  const retry = root.querySelector<HTMLButtonElement>("#retry")!;
  const traceSection = root.querySelector<HTMLElement>("#trace-section")!;
  const tracePanel = root.querySelector<HTMLElement>("#trace-panel")!;

  let state: UiState = initialState;

  function render(): void {
    assertInvariant(state);
    const busy = state.phase === "waiting";
    submit.disabled = busy || input.value.trim() === "";
    input.disabled = busy;

    statusBox.hidden = !busy;
    statusBox.textContent = busy ? "Đang xử lý…" : "";

    choices.hidden = state.phase !== "needs_choice";
    choiceButtons.textContent = "";
    if (state.phase === "needs_choice") {
      choicesSlot.textContent =
        `Hệ thống cần bạn chọn (${state.slot}):`;
      state.options.forEach((option, index) => {
        const button = document.createElement("button");
        button.type = "button";
        button.className = "choice";
        button.dataset.index = String(index);
        button.textContent = `${option.id} (${option.kind}, ${option.score.toFixed(3)})`;
        button.addEventListener("click", () => {
          app.lastRequest = app.chooseOption(index);
        });
        choiceButtons.appendChild(button);
      });
    }

    answerSection.hidden = state.phase !== "answered";
    answerPanel.textContent = state.answer ? state.answer.rendered_text : "";

    errorSection.hidden = state.phase !== "error";
    errorMessage.textContent = state.error;
    retry.hidden = !(state.phase === "error" && state.canRetry);

    traceSection.hidden = state.trace === null;
    tracePanel.textContent = state.trace
      ? JSON.stringify(state.trace, null, 2)
      : "";
  }

  function setState(next: UiState): void {
    state = next;
    render();
  }

  async function submitQuestion(question: string): Promise<void> {
    if (state.phase === "waiting" || question.trim() === "") {
      return;
    }
    setState(toWaiting(state, question));
    try {
      const response = await client.ask(question);
      setState(fromResponse(state, response));
    } catch (err) {
      setState(toError(state, describe(err), true));
    }
  }

  async function chooseOption(index: number): Promise<void> {
    if (state.phase !== "needs_choice" || state.sessionId === null) {
      return;
    }
    const sessionId = state.sessionId;
    setState(toWaiting(state, state.question));
    try {
      const response = await client.resolve(sessionId, index);
      setState(fromResponse(state, response));
    } catch (err) {
      const stale = err instanceof ApiError && err.status === 404;
      setState(toError(
        state,
        stale ? "phiên đã hết hạn, xin hỏi lại" : describe(err),
        true,
      ));
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    app.lastRequest = submitQuestion(input.value);
  });
  input.addEventListener("input", () => {
    if (state.phase !== "waiting") {
      submit.disabled = input.value.trim() === "";
    }
  });
  retry.addEventListener("click", () => {
    app.lastRequest = submitQuestion(state.question || input.value);
  });

  const app: App = {
    state: () => state,
    submitQuestion,
    chooseOption,
    lastRequest: Promise.resolve(),
  };
  render();
  return app;
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.status ? `lỗi máy chủ ${err.status}: ${err.message}` : err.message;
  }
  return String(err);
}
