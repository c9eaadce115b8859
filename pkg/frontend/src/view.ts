import type { TokenMatch, UiInterpretation } from "./types.js";

// Rendering is a pure projection of the API payload: no re-ranking, no
// filtering, no reformatting of query text.

const SPARQL_TOKEN = new RegExp(
  [
    String.raw`\?[A-Za-z_][A-Za-z0-9_]*`, // variable
    String.raw`<[^<>\s]*>`, // IRI
    String.raw`"(?:[^"\\]|\\.)*"`, // literal
    String.raw`\b(?:SELECT|DISTINCT|WHERE|FILTER|OPTIONAL|VALUES|LIMIT|OFFSET|regex)\b`,
  ].join("|"),
  "g",
);

const TOKEN_CLASS = (lexeme: string): string => {
  if (lexeme.startsWith("?")) return "tok-var";
  if (lexeme.startsWith("<")) return "tok-iri";
  if (lexeme.startsWith('"')) return "tok-str";
  return "tok-kw";
};

/** Syntax-colored <pre>; its textContent equals the input byte-for-byte. */
export function renderSparql(sparql: string): HTMLPreElement {
  const pre = document.createElement("pre");
  pre.className = "sparql";
  let cursor = 0;
  for (const match of sparql.matchAll(SPARQL_TOKEN)) {
    const start = match.index ?? 0;
    if (start > cursor) {
      pre.appendChild(document.createTextNode(sparql.slice(cursor, start)));
    }
    const span = document.createElement("span");
    span.className = TOKEN_CLASS(match[0]);
    span.textContent = match[0];
    pre.appendChild(span);
    cursor = start + match[0].length;
  }
  if (cursor < sparql.length) {
    pre.appendChild(document.createTextNode(sparql.slice(cursor)));
  }
  return pre;
}

function candidateSummary(token: TokenMatch): string {
  const top = token.candidates[0];
  if (!top) return "rewrite rule";
  const local = (iri: string) => iri.split(/[/#]/).pop() ?? iri;
  if (top.kind === "class_match") return `class ${local(top.class)}`;
  if (top.kind === "property_match") return `property ${local(top.property)}`;
  const names = top.uris.map(local).join(", ");
  return `${local(top.class)}: ${names}`;
}

export function renderTokenChips(tokens: TokenMatch[]): HTMLElement {
  const list = document.createElement("ul");
  list.className = "token-chips";
  for (const token of tokens) {
    const item = document.createElement("li");
    item.className = "chip";
    const text = document.createElement("strong");
    text.textContent = token.text;
    const arrow = document.createTextNode(" → ");
    const target = document.createElement("span");
    target.textContent = candidateSummary(token);
    item.title = token.candidates
      .map((c) => `${c.kind} ${c.class} (score ${c.score.toFixed(3)})`)
      .join("\n");
    item.append(text, arrow, target);
    list.appendChild(item);
  }
  return list;
}

function renderAnswerTable(interpretation: UiInterpretation): HTMLElement {
  if (interpretation.empty) {
    const notice = document.createElement("p");
    notice.className = "empty-notice";
    notice.textContent = "no results for this interpretation";
    return notice;
  }
  const table = document.createElement("table");
  table.className = "answers";
  const thead = document.createElement("thead");
  const headRow = document.createElement("tr");
  for (const [variable, cls] of interpretation.columns) {
    const th = document.createElement("th");
    th.textContent = variable;
    if (cls !== "literal") th.title = cls;
    headRow.appendChild(th);
  }
  thead.appendChild(headRow);
  const tbody = document.createElement("tbody");
  for (const row of interpretation.rows) {
    const tr = document.createElement("tr");
    for (const value of row) {
      const td = document.createElement("td");
      td.textContent = value;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  table.append(thead, tbody);
  return table;
}

export interface CardHandlers {
  onSelect: (rank: number) => void;
  onCopy: (sparql: string) => void;
}

export function renderInterpretationCard(
  interpretation: UiInterpretation,
  handlers: CardHandlers,
): HTMLElement {
  const card = document.createElement("section");
  card.className = "card";
  card.dataset.rank = String(interpretation.rank);
  card.dataset.sparql = interpretation.sparql;

  const header = document.createElement("button");
  header.type = "button";
  header.className = "card-header";
  header.setAttribute("aria-expanded", "false");
  const title = document.createElement("span");
  title.textContent = `#${interpretation.rank}  score ${interpretation.score.toFixed(3)}`;
  header.appendChild(title);
  if (interpretation.empty) {
    const badge = document.createElement("span");
    badge.className = "badge-empty";
    badge.textContent = "no results";
    header.appendChild(badge);
  }
  header.addEventListener("click", () => handlers.onSelect(interpretation.rank));

  const body = document.createElement("div");
  body.className = "card-body";
  body.hidden = true;

  const explanation = document.createElement("dl");
  explanation.className = "explanation";
  for (const [token, note] of Object.entries(interpretation.explanation)) {
    const dt = document.createElement("dt");
    dt.textContent = token;
    const dd = document.createElement("dd");
    dd.textContent = note;
    explanation.append(dt, dd);
  }

  const copy = document.createElement("button");
  copy.type = "button";
  copy.className = "copy-sparql";
  copy.textContent = "copy SPARQL";
  copy.addEventListener("click", (event) => {
    event.stopPropagation();
    handlers.onCopy(interpretation.sparql);
  });

  body.append(explanation, renderSparql(interpretation.sparql), copy, renderAnswerTable(interpretation));
  card.append(header, body);
  return card;
}

export function setCardExpanded(card: HTMLElement, expanded: boolean): void {
  const header = card.querySelector<HTMLButtonElement>(".card-header");
  const body = card.querySelector<HTMLElement>(".card-body");
  if (header) header.setAttribute("aria-expanded", String(expanded));
  if (body) body.hidden = !expanded;
  card.classList.toggle("selected", expanded);
}
