// Scripted browser round-trips against canned service responses. The
// fixtures in fixtures.json were captured verbatim from a live qa-service,
// so the "panel shows rendered_text verbatim" assertions compare against
// real API output.

import { beforeEach, describe, expect, it } from "vitest";

import { QaClient, type AskResponse } from "../src/api.js";
import { createApp, type App } from "../src/ui.js";
import fixtures from "./fixtures.json";

const golden1 = fixtures.golden1 as AskResponse;
const ambiguous = fixtures.ambiguous as AskResponse;
const resolved = fixtures.resolved as AskResponse;

interface Route {
  status?: number;
  body: unknown;
}

function fakeFetch(routes: Record<string, Route[]>) {
  const calls: { url: string; body: unknown }[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, body: init?.body ? JSON.parse(String(init.body)) : null });
    const queue = routes[url];
    if (!queue || queue.length === 0) {
      throw new Error(`unexpected request to ${url}`);
    }
    const route = queue.length > 1 ? queue.shift()! : queue[0];
    return new Response(JSON.stringify(route.body), {
      status: route.status ?? 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

function mount(routes: Record<string, Route[]>) {
  document.body.innerHTML = '<main id="app"></main>';
  const root = document.getElementById("app")!;
  const { fetchFn, calls } = fakeFetch(routes);
  const app = createApp(root, new QaClient("", fetchFn));
  return { root, app, calls };
}

function panel(root: HTMLElement): HTMLElement {
  return root.querySelector<HTMLElement>("#answer-panel")!;
}

async function submitViaDom(root: HTMLElement, app: App, question: string) {
  const input = root.querySelector<HTMLInputElement>("#question")!;
  input.value = question;
  input.dispatchEvent(new Event("input", { bubbles: true }));
  root.querySelector<HTMLFormElement>("#ask-form")!
    .dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  await app.lastRequest;
}

describe("golden question round trip", () => {
  it("shows the API rendered_text verbatim in the answer panel", async () => {
    const { root, app } = mount({ "/api/ask": [{ body: golden1 }] });
    await submitViaDom(root, app,
      "có bao nhiêu sinh viên học lớp k50 khoa học máy tính?");
    expect(app.state().phase).toBe("answered");
    expect(panel(root).textContent).toBe(golden1.answer!.rendered_text);
    expect(root.querySelector<HTMLElement>("#answer-section")!.hidden).toBe(false);
  });

  it("touches only the documented endpoint", async () => {
    const { root, app, calls } = mount({ "/api/ask": [{ body: golden1 }] });
    await submitViaDom(root, app, "có bao nhiêu sinh viên?");
    expect(calls.map((c) => c.url)).toEqual(["/api/ask"]);
  });
});

describe("disambiguation round trip", () => {
  it("renders at least two option buttons and reaches answered after a pick", async () => {
    const { root, app, calls } = mount({
      "/api/ask": [{ body: ambiguous }],
      "/api/resolve": [{ body: resolved }],
    });
    await submitViaDom(root, app, "ai là sinh viên của lớp khoa học máy tính?");
    expect(app.state().phase).toBe("needs_choice");
    const buttons = root.querySelectorAll<HTMLButtonElement>("#choice-buttons .choice");
    expect(buttons.length).toBeGreaterThanOrEqual(2);
    expect(buttons[0].textContent).toContain("có_sinh_viên_là");

    buttons[2].click();
    await app.lastRequest;
    expect(app.state().phase).toBe("answered");
    expect(panel(root).textContent).toBe(resolved.answer!.rendered_text);
    expect(calls.map((c) => c.url)).toEqual(["/api/ask", "/api/resolve"]);
    expect(calls[1].body).toEqual({
      session_id: ambiguous.session_id,
      choice: 2,
    });
  });

  it("second ambiguity renders fresh options", async () => {
    const { root, app } = mount({
      "/api/ask": [{ body: ambiguous }],
      "/api/resolve": [{ body: ambiguous }, { body: resolved }],
    });
    await submitViaDom(root, app, "ai là sinh viên của lớp công nghệ phần mềm?");
    root.querySelectorAll<HTMLButtonElement>("#choice-buttons .choice")[0].click();
    await app.lastRequest;
    expect(app.state().phase).toBe("needs_choice");
    root.querySelectorAll<HTMLButtonElement>("#choice-buttons .choice")[0].click();
    await app.lastRequest;
    expect(app.state().phase).toBe("answered");
  });

  it("stale session becomes an error with a retry affordance", async () => {
    const { root, app } = mount({
      "/api/ask": [{ body: ambiguous }],
      "/api/resolve": [{ status: 404, body: { detail: "unknown or expired session" } }],
    });
    await submitViaDom(root, app, "ai là sinh viên của lớp khoa học máy tính?");
    root.querySelectorAll<HTMLButtonElement>("#choice-buttons .choice")[0].click();
    await app.lastRequest;
    expect(app.state().phase).toBe("error");
    expect(root.querySelector<HTMLElement>("#error-message")!.textContent)
      .toContain("hỏi lại");
    expect(root.querySelector<HTMLButtonElement>("#retry")!.hidden).toBe(false);
  });
});

describe("form behaviour", () => {
  it("submit is disabled for empty input", () => {
    const { root } = mount({});
    const submit = root.querySelector<HTMLButtonElement>("#submit")!;
    expect(submit.disabled).toBe(true);
    const input = root.querySelector<HTMLInputElement>("#question")!;
    input.value = "sinh viên là gì?";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(submit.disabled).toBe(false);
    input.value = "   ";
    input.dispatchEvent(new Event("input", { bubbles: true }));
    expect(submit.disabled).toBe(true);
  });

  it("only one request is in flight: submit disabled while waiting", async () => {
    let release: (value: Response) => void = () => {};
    const gate = new Promise<Response>((resolve) => (release = resolve));
    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    const app = createApp(root, new QaClient("", () => gate));
    const pending = app.submitQuestion("có bao nhiêu môn?");
    expect(app.state().phase).toBe("waiting");
    expect(root.querySelector<HTMLButtonElement>("#submit")!.disabled).toBe(true);
    release(new Response(JSON.stringify(golden1), {
      status: 200, headers: { "Content-Type": "application/json" },
    }));
    await pending;
    expect(app.state().phase).toBe("answered");
  });

  it("network failure reaches the error state with retry", async () => {
    document.body.innerHTML = '<main id="app"></main>';
    const root = document.getElementById("app")!;
    const app = createApp(root, new QaClient("", () => {
      return Promise.reject(new Error("connection refused"));
    }));
    await app.submitQuestion("sinh viên là gì?");
    expect(app.state().phase).toBe("error");
    expect(root.querySelector<HTMLButtonElement>("#retry")!.hidden).toBe(false);
  });

  it("pipeline error responses surface the failing stage", async () => {
    const { root, app } = mount({
      "/api/ask": [{
        body: {
          status: "error", failure_stage: "mapping",
          message: "tuple 1 term2 'Zanzibar' matches no ontology element",
          trace: {},
        },
      }],
    });
    await submitViaDom(root, app, "sinh viên nào có quê ở Zanzibar?");
    expect(app.state().phase).toBe("error");
    expect(root.querySelector<HTMLElement>("#error-message")!.textContent)
      .toContain("mapping");
  });

  it("trace panel shows the pipeline stages", async () => {
    const { root, app } = mount({ "/api/ask": [{ body: golden1 }] });
    await submitViaDom(root, app, "có bao nhiêu sinh viên?");
    const traceSection = root.querySelector<HTMLElement>("#trace-section")!;
    expect(traceSection.hidden).toBe(false);
    expect(root.querySelector<HTMLElement>("#trace-panel")!.textContent)
      .toContain("onto_tuples");
  });
});
