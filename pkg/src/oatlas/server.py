"""Read-only HTTP API over a published snapshot.

Four JSON endpoints: /api/summary, /api/map, /api/topics, /api/timeseries.
The snapshot is immutable and shared; request handling is fully concurrent
and a reload swaps the whole snapshot reference atomically, so two identical
requests against one snapshot always return byte-identical bodies.
"""

from __future__ import annotations

import json
import logging
import re
import threading
from datetime import date as date_t
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import parse_qs, urlsplit

from .labeling import Sentiment
from .partition import canonical_key
from .snapshot import Snapshot, load_snapshot
from .timeseries import ALL, UNRESOLVED

log = logging.getLogger(__name__)

_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}$")
_SENTIMENTS = {s.value for s in Sentiment}


def _bad(message: str) -> tuple[int, dict]:
    return 400, {"error": message}


def _parse_date(snapshot: Snapshot, raw: str) -> tuple[str, None] | tuple[None, tuple[int, dict]]:
    if not _DATE_RE.match(raw):
        return None, _bad(f"malformed date {raw!r}, expected YYYY-MM-DD")
    try:
        date_t.fromisoformat(raw)
    except ValueError:
        return None, _bad(f"malformed date {raw!r}, expected YYYY-MM-DD")
    if not snapshot.in_range(raw):
        return None, _bad(
            f"date {raw} outside corpus range {snapshot.date_min}..{snapshot.date_max}"
        )
    return raw, None


def route(snapshot: Snapshot | None, path: str, params: dict[str, str]) -> tuple[int, object]:
    """Dispatch one GET request to (status, JSON-serializable body)."""
    if snapshot is None:
        return 503, {"error": "snapshot not loaded"}

    if path == "/api/summary":
        return 200, snapshot.summary_payload()

    if path == "/api/map":
        raw = params.get("date", "")
        if not raw:
            return _bad("missing required parameter: date")
        day, err = _parse_date(snapshot, raw)
        if err:
            return err
        return 200, snapshot.map_payload(day)

    if path == "/api/topics":
        country = params.get("country")
        keyword = params.get("keyword")
        if country and keyword:
            return _bad("country and keyword filters are mutually exclusive")
        sentiment = params.get("sentiment")
        if sentiment and sentiment not in _SENTIMENTS:
            return _bad(f"unknown sentiment {sentiment!r}")
        day = None
        if params.get("date"):
            day, err = _parse_date(snapshot, params["date"])
            if err:
                return err
        key = canonical_key(
            date=day, sentiment=sentiment or None, country=country or None, keyword=keyword or None
        )
        return 200, snapshot.topics_payload(key)

    if path == "/api/timeseries":
        country = params.get("country") or None
        if country is not None and country not in (*snapshot.countries, ALL, UNRESOLVED):
            return _bad(f"unknown country code {country!r}")
        sentiment = params.get("sentiment") or None
        if sentiment is not None and sentiment not in _SENTIMENTS:
            return _bad(f"unknown sentiment {sentiment!r}")
        return 200, snapshot.series_payload(country, sentiment)

    return 404, {"error": f"no such endpoint {path!r}"}


def render_body(status_body: tuple[int, object]) -> tuple[int, bytes]:
    """Deterministic JSON bytes for a routed response."""
    status, body = status_body
    return status, json.dumps(
        body, ensure_ascii=False, sort_keys=True, separators=(",", ":")
    ).encode("utf-8")


class ApiServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address, snapshot: Snapshot | None, cors_origin: str | None = None):
        super().__init__(address, ApiHandler)
        self.snapshot = snapshot
        self.cors_origin = cors_origin
        self._reload_lock = threading.Lock()

    def reload_snapshot(self, path) -> None:
        """Swap in a freshly loaded snapshot; requests see old or new, never a mix."""
        with self._reload_lock:
            self.snapshot = load_snapshot(path)


class ApiHandler(BaseHTTPRequestHandler):
    server: ApiServer

    def do_GET(self):  # noqa: N802 - http.server API
        parts = urlsplit(self.path)
        params = {k: v[0] for k, v in parse_qs(parts.query).items()}
        status, payload = render_body(route(self.server.snapshot, parts.path, params))
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(payload)))
        if self.server.cors_origin:
            self.send_header("Access-Control-Allow-Origin", self.server.cors_origin)
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, fmt, *args):  # quiet by default
        log.debug("%s - %s", self.address_string(), fmt % args)


def make_server(
    snapshot: Snapshot | None,
    port: int = 8080,
    host: str = "127.0.0.1",
    cors_origin: str | None = None,
) -> ApiServer:
    return ApiServer((host, port), snapshot, cors_origin=cors_origin)
