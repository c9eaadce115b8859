import { API_BASE } from "./config.js";
import type { AskRejection, AskResponse } from "./types.js";

export class UnmatchedQuestionError extends Error {
  skipped: string[];
  constructor(message: string, skipped: string[]) {
    super(message);
    this.skipped = skipped;
  }
}

export class ServiceError extends Error {
  status: number;
  constructor(message: string, status: number) {
    super(message);
    this.status = status;
  }
}

export async function askQuestion(
  question: string,
  signal?: AbortSignal,
  base: string = API_BASE,
): Promise<AskResponse> {
  const response = await fetch(`${base}/api/ask`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ question }),
    signal,
  });
  if (response.status === 422) {
    const body = (await response.json()) as AskRejection;
    throw new UnmatchedQuestionError(body.error, body.skipped ?? []);
  }
  if (!response.ok) {
    let detail = `service returned HTTP ${response.status}`;
    try {
      const body = (await response.json()) as AskRejection;
      if (body.error) detail = body.error;
    } catch {
      // keep the status-based message
    }
    throw new ServiceError(detail, response.status);
  }
  return (await response.json()) as AskResponse;
}
