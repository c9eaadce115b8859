import { askQuestion, ServiceError, UnmatchedQuestionError } from "./api.js";
import type { AskResponse } from "./types.js";
import {
  renderInterpretationCard,
  renderTokenChips,
  setCardExpanded,
} from "./view.js";

export interface AppOptions {
  apiBase?: string;
  ask?: typeof askQuestion;
}

/** Wires the single-page flow: one question in flight at a time, results
 * rendered exactly as the service ranked them, selection purely local. */
export class App {
  readonly root: HTMLElement;
  private readonly form: HTMLFormElement;
  private readonly input: HTMLInputElement;
  private readonly submit: HTMLButtonElement;
  private readonly status: HTMLElement;
  private readonly tokensHost: HTMLElement;
  private readonly cardsHost: HTMLElement;
  private readonly ask: typeof askQuestion;
  private readonly apiBase: string;
  private inflight: AbortController | null = null;
  private lastQuestion = "";

  constructor(root: HTMLElement, options: AppOptions = {}) {
    this.root = root;
    this.ask = options.ask ?? askQuestion;
    this.apiBase = options.apiBase ?? "";
    root.innerHTML = "";

    this.form = document.createElement("form");
    this.form.className = "ask-form";
    this.input = document.createElement("input");
    this.input.type = "text";
    this.input.name = "question";
    this.input.placeholder = "Ask a question about the dataset…";
    this.input.setAttribute("aria-label", "question");
    this.submit = document.createElement("button");
    this.submit.type = "submit";
    this.submit.textContent = "Ask";
    this.submit.disabled = true;
    this.form.append(this.input, this.submit);

    this.status = document.createElement("div");
    this.status.className = "status";
    this.tokensHost = document.createElement("div");
    this.tokensHost.className = "tokens";
    this.cardsHost = document.createElement("div");
    this.cardsHost.className = "cards";
    root.append(this.form, this.status, this.tokensHost, this.cardsHost);

    this.input.addEventListener("input", () => {
      this.submit.disabled = this.input.value.trim() === "";
    });
    this.form.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.submitQuestion(this.input.value);
    });
  }

  async submitQuestion(question: string): Promise<void> {
    const text = question.trim();
    if (!text) return;
    this.lastQuestion = text;
    this.inflight?.abort();
    const controller = new AbortController();
    this.inflight = controller;
    this.setStatus("asking…");
    this.tokensHost.innerHTML = "";
    this.cardsHost.innerHTML = "";
    try {
      const payload = await this.ask(text, controller.signal, this.apiBase);
      if (controller !== this.inflight) return; // superseded
      this.renderResults(payload);
    } catch (error) {
      if (controller.signal.aborted) return;
      this.renderFailure(error);
    } finally {
      if (controller === this.inflight) this.inflight = null;
    }
  }

  private renderResults(payload: AskResponse): void {
    this.setStatus(
      `${payload.interpretations.length} interpretation(s) on ${payload.dataset}`,
    );
    this.tokensHost.appendChild(renderTokenChips(payload.tokens));
    for (const interpretation of payload.interpretations) {
      const card = renderInterpretationCard(interpretation, {
        onSelect: (rank) => this.selectInterpretation(rank),
        onCopy: (sparql) => void this.copySparql(sparql),
      });
      this.cardsHost.appendChild(card);
    }
    const first = payload.interpretations[0];
    if (first) this.selectInterpretation(first.rank);
  }

  private renderFailure(error: unknown): void {
    if (error instanceof UnmatchedQuestionError) {
      this.status.innerHTML = "";
      const message = document.createElement("p");
      message.className = "unmatched";
      message.textContent =
        "No dataset term matched the question. Skipped words: " +
        (error.skipped.length ? error.skipped.join(", ") : "(none)");
      const hint = document.createElement("p");
      hint.className = "hint";
      hint.textContent =
        "Try rephrasing with names that occur in the data, e.g. class or instance labels.";
      this.status.append(message, hint);
      return;
    }
    const detail =
      error instanceof ServiceError
        ? error.message
        : "network error while contacting the service";
    this.status.innerHTML = "";
    const banner = document.createElement("div");
    banner.className = "retry-banner";
    const text = document.createElement("span");
    text.textContent = detail + " ";
    const retry = document.createElement("button");
    retry.type = "button";
    retry.className = "retry";
    retry.textContent = "retry";
    retry.addEventListener("click", () => void this.submitQuestion(this.lastQuestion));
    banner.append(text, retry);
    this.status.appendChild(banner);
  }

  /** Expand one card, collapse the rest; answers were already delivered
   * with the ask response, so selection never touches the network. */
  selectInterpretation(rank: number): void {
    for (const card of this.cards()) {
      setCardExpanded(card, card.dataset.rank === String(rank));
    }
  }

  selectedCard(): HTMLElement | null {
    return this.cardsHost.querySelector<HTMLElement>(".card.selected");
  }

  cards(): HTMLElement[] {
    return Array.from(this.cardsHost.querySelectorAll<HTMLElement>(".card"));
  }

  private async copySparql(sparql: string): Promise<void> {
    try {
      await navigator.clipboard.writeText(sparql);
      this.setStatus("SPARQL copied to clipboard");
    } catch {
      this.setStatus("clipboard unavailable");
    }
  }

  private setStatus(text: string): void {
    this.status.innerHTML = "";
    this.status.textContent = text;
  }
}

export function mountApp(root: HTMLElement, options: AppOptions = {}): App {
  return new App(root, options);
}
