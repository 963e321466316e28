"""Paginated comment fetching.

One operation hides the network: everything else in the package works
from files. Pages are JSON objects {"items": [{"id", "text"}, ...],
"next_cursor": <string or null>}. A source is either an HTTP(S)
endpoint (cursor passed as a query parameter) or a local page file
whose next_cursor names the next file relative to it.
"""
from __future__ import annotations

import json
import time
from pathlib import Path

import httpx

from .ingest import RawComment


class FetchError(Exception):
    """Fetch failure. retryable=True means the caller may try again
    (network trouble); False means the payload itself is bad."""

    def __init__(self, message: str, retryable: bool = False, attempts: int = 1):
        super().__init__(message)
        self.retryable = retryable
        self.attempts = attempts


def _parse_page(payload: object, where: str) -> tuple[list[RawComment], str | None]:
    if not isinstance(payload, dict):
        raise FetchError(f"{where}: page is not a JSON object")
    if "items" not in payload:
        raise FetchError(f"{where}: page missing 'items' field")
    items = payload["items"]
    if not isinstance(items, list):
        raise FetchError(f"{where}: 'items' field is not a list")
    comments: list[RawComment] = []
    for pos, item in enumerate(items):
        if not isinstance(item, dict):
            raise FetchError(f"{where}: item {pos} in 'items' is not an object")
        for field in ("id", "text"):
            if field not in item:
                raise FetchError(f"{where}: item {pos} missing '{field}' field")
        comments.append(RawComment(id=str(item["id"]), text=str(item["text"]), source=where))
    cursor = payload.get("next_cursor")
    if cursor is not None and not isinstance(cursor, str):
        raise FetchError(f"{where}: 'next_cursor' field must be a string or null")
    return comments, cursor


def _fetch_file_pages(start: Path, max_items: int) -> list[RawComment]:
    comments: list[RawComment] = []
    page_path: Path | None = start
    seen: set[Path] = set()
    while page_path is not None and len(comments) < max_items:
        page_path = page_path.resolve()
        if page_path in seen:
            raise FetchError(f"{page_path}: 'next_cursor' chain loops back on itself")
        seen.add(page_path)
        try:
            payload = json.loads(page_path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise FetchError(f"{page_path}: page file not found", retryable=False) from exc
        except json.JSONDecodeError as exc:
            raise FetchError(f"{page_path}: invalid JSON: {exc}") from exc
        page_comments, cursor = _parse_page(payload, str(page_path))
        comments.extend(page_comments)
        page_path = page_path.parent / cursor if cursor else None
    return comments[:max_items]


def _get_with_retries(
    client: httpx.Client, url: str, params: dict[str, str], max_attempts: int, backoff: float
) -> httpx.Response:
    last: Exception | None = None
    for attempt in range(1, max_attempts + 1):
        try:
            response = client.get(url, params=params)
            response.raise_for_status()
            return response
        except (httpx.TransportError, httpx.HTTPStatusError) as exc:
            # 4xx responses are not going to improve on retry
            if isinstance(exc, httpx.HTTPStatusError) and exc.response.status_code < 500:
                raise FetchError(
                    f"{url}: server rejected the request ({exc.response.status_code})",
                    retryable=False,
                    attempts=attempt,
                ) from exc
            last = exc
            if attempt < max_attempts and backoff > 0:
                time.sleep(backoff * attempt)
    raise FetchError(
        f"{url}: unreachable after {max_attempts} attempts: {last}",
        retryable=True,
        attempts=max_attempts,
    ) from last


def _fetch_http_pages(
    url: str, max_items: int, client: httpx.Client | None, max_attempts: int, backoff: float
) -> list[RawComment]:
    owned = client is None
    client = client or httpx.Client(timeout=10.0)
    comments: list[RawComment] = []
    cursor: str | None = None
    seen: set[str] = set()
    try:
        while len(comments) < max_items:
            params = {"cursor": cursor} if cursor else {}
            response = _get_with_retries(client, url, params, max_attempts, backoff)
            try:
                payload = response.json()
            except json.JSONDecodeError as exc:
                raise FetchError(f"{url}: invalid JSON in response: {exc}") from exc
            page_comments, cursor = _parse_page(payload, url)
            comments.extend(page_comments)
            if cursor is None:
                break
            if cursor in seen:
                raise FetchError(f"{url}: 'next_cursor' chain loops back on itself")
            seen.add(cursor)
    finally:
        if owned:
            client.close()
    return comments[:max_items]


def fetch_comments(
    source: str,
    max_items: int,
    client: httpx.Client | None = None,
    max_attempts: int = 3,
    backoff: float = 0.5,
) -> list[RawComment]:
    """Follow pagination from `source` and return up to max_items comments.

    `source` starting with http:// or https:// goes over the network
    (pass `client` to control transport in tests); anything else is a
    local page file. Raises FetchError; .retryable distinguishes
    transient network failures from malformed payloads.
    """
    if max_items < 1:
        raise ValueError("max_items must be >= 1")
    if source.startswith(("http://", "https://")):
        return _fetch_http_pages(source, max_items, client, max_attempts, backoff)
    return _fetch_file_pages(Path(source), max_items)
