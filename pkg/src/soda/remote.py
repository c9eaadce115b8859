"""SPARQL-over-HTTP client for delegating queries to remote endpoints."""

from __future__ import annotations

import requests

from soda.errors import QueryTimeoutError, TransportError
from soda.rdf import Atom
from soda.sparql import BindingTable

RESULTS_JSON = "application/sparql-results+json"


def _term_atom(term: dict) -> Atom:
    kind = term.get("type")
    value = term.get("value")
    if value is None:
        raise KeyError("value")
    if kind == "uri":
        return Atom.iri(value)
    if kind == "bnode":
        return Atom.blank(value)
    if kind in ("literal", "typed-literal"):
        return Atom.literal(
            value, datatype=term.get("datatype"), lang=term.get("xml:lang")
        )
    raise KeyError(f"term type {kind!r}")


def remote_query(endpoint: str, sparql_text: str, timeout: float = 30.0) -> BindingTable:
    """POST a query and parse the SPARQL JSON results into a BindingTable."""
    try:
        response = requests.post(
            endpoint,
            data={"query": sparql_text},
            headers={"Accept": RESULTS_JSON},
            timeout=timeout,
        )
    except requests.Timeout as exc:
        raise QueryTimeoutError(
            f"endpoint {endpoint} timed out after {timeout}s", endpoint=endpoint
        ) from exc
    except requests.RequestException as exc:
        raise TransportError(f"endpoint {endpoint} unreachable: {exc}", endpoint=endpoint) from exc

    if response.status_code != 200:
        raise TransportError(
            f"endpoint {endpoint} returned HTTP {response.status_code}",
            endpoint=endpoint,
            status=response.status_code,
        )
    try:
        payload = response.json()
        header = list(payload["head"]["vars"])
        rows = []
        for binding in payload["results"]["bindings"]:
            rows.append({var: _term_atom(term) for var, term in binding.items()})
    except (ValueError, KeyError, TypeError) as exc:
        raise TransportError(
            f"endpoint {endpoint} returned malformed results: {exc}",
            endpoint=endpoint,
            status=response.status_code,
        ) from exc
    return BindingTable(header, rows)
