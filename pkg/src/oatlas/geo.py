"""Free-text location resolution to ISO-3166 alpha-2 country codes.

Offline gazetteer first, optional remote geocoder second, with a persistent
cache (including negative entries) so reruns never repeat remote traffic.
"""

from __future__ import annotations

import json
import logging
import re
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from .labeling import LabeledRecord

log = logging.getLogger(__name__)

_CODE_RE = re.compile(r"^[A-Z]{2}$")
_KEY_JUNK_RE = re.compile(r"[^a-z0-9\s]+")


class GeoError(Exception):
    pass


class GeocodeLookupError(Exception):
    """A single remote lookup failed (network, HTTP status, bad payload)."""


def normalize_key(raw: str) -> str:
    """Lowercase, strip punctuation to spaces, collapse whitespace."""
    return " ".join(_KEY_JUNK_RE.sub(" ", raw.lower()).split())


# ---------------------------------------------------------------------------
# Gazetteer
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Gazetteer:
    exact_map: dict[str, str]

    @property
    def codes(self) -> frozenset[str]:
        return frozenset(self.exact_map.values())


def load_gazetteer(path: str | Path) -> Gazetteer:
    """Parse "key<TAB>CC" lines; keys are normalized, codes must be alpha-2."""
    exact: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            key, code = line.split("\t")
        except ValueError:
            raise GeoError(f"gazetteer line {line_no}: expected key<TAB>CC") from None
        code = code.strip().upper()
        if not _CODE_RE.match(code):
            raise GeoError(f"gazetteer line {line_no}: invalid country code {code!r}")
        exact[normalize_key(key)] = code
    return Gazetteer(exact_map=exact)


def resolve_local(raw: str, gz: Gazetteer) -> str | None:
    """Offline lookup: full string, then comma segments right-to-left, then tokens.

    The rightmost comma segment usually names the country ("Austin, TX, USA").
    """
    if not raw:
        return None
    full = normalize_key(raw)
    if not full:
        return None
    hit = gz.exact_map.get(full)
    if hit is not None:
        return hit
    if "," in raw:
        for segment in reversed(raw.split(",")):
            key = normalize_key(segment)
            if key:
                hit = gz.exact_map.get(key)
                if hit is not None:
                    return hit
    for token in full.split():
        hit = gz.exact_map.get(token)
        if hit is not None:
            return hit
    return None


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------


class GeoCache:
    """raw location string -> (country code | None), persisted as JSONL.

    Misses are cached too (negative caching); reloading reproduces the map
    exactly. Reads are lock-free on the underlying dict; writes serialize.
    """

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path is not None else None
        self._entries: dict[str, tuple[str | None, str]] = {}
        self._lock = threading.Lock()
        if self.path is not None and self.path.exists():
            self._load()

    def _load(self) -> None:
        for line in self.path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            row = json.loads(line)
            self._entries[row["q"]] = (row["cc"], row["ts"])

    def __contains__(self, raw: str) -> bool:
        return raw in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, raw: str) -> str | None:
        return self._entries[raw][0]

    def put(self, raw: str, code: str | None) -> None:
        ts = datetime.now(timezone.utc).isoformat()
        with self._lock:
            self._entries[raw] = (code, ts)

    def as_map(self) -> dict[str, str | None]:
        return {q: cc for q, (cc, _) in self._entries.items()}

    def save(self) -> None:
        """Atomic write (tmp + rename); failures warn but never raise."""
        if self.path is None:
            return
        lines = [
            json.dumps({"q": q, "cc": cc, "ts": ts}, ensure_ascii=False)
            for q, (cc, ts) in sorted(self._entries.items())
        ]
        try:
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            tmp.write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            tmp.replace(self.path)
        except OSError as exc:
            log.warning("could not persist geo cache to %s: %s", self.path, exc)


# ---------------------------------------------------------------------------
# Remote client
# ---------------------------------------------------------------------------


class RateLimiter:
    """Serializes callers to at most max_per_sec acquisitions per second."""

    def __init__(self, max_per_sec: float):
        if max_per_sec <= 0:
            raise ValueError("max_per_sec must be positive")
        self._interval = 1.0 / max_per_sec
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = time.monotonic()
            wait = self._next_at - now
            if wait > 0:
                time.sleep(wait)
                now = time.monotonic()
            self._next_at = max(self._next_at, now) + self._interval


class HttpGeocoderClient:
    """GET <endpoint>?q=<location> expecting JSON with a "country_code" field.

    Lookups are serialized through the rate limiter. Any transport or payload
    problem raises GeocodeLookupError; a well-formed null country_code is a
    legitimate miss.
    """

    def __init__(self, endpoint: str, max_per_sec: float = 1.0, timeout: float = 10.0):
        self.endpoint = endpoint.rstrip("?&")
        self.limiter = RateLimiter(max_per_sec)
        self.timeout = timeout

    def lookup(self, raw: str) -> str | None:
        self.limiter.acquire()
        url = f"{self.endpoint}?q={urllib.parse.quote(raw)}"
        try:
            with urllib.request.urlopen(url, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, ValueError) as exc:
            raise GeocodeLookupError(f"lookup failed for {raw!r}: {exc}") from exc
        code = payload.get("country_code") if isinstance(payload, dict) else None
        if code is None:
            return None
        code = str(code).upper()
        if not _CODE_RE.match(code):
            raise GeocodeLookupError(f"malformed country_code {code!r} for {raw!r}")
        return code


@dataclass
class GeocodeReport:
    cache_hits: int = 0
    local_hits: int = 0
    remote_calls: int = 0
    remote_errors: int = 0
    unresolved: int = 0
    skipped_empty: int = 0

    def summary(self) -> str:
        return (
            f"cache {self.cache_hits}, local {self.local_hits}, "
            f"remote {self.remote_calls} ({self.remote_errors} errors), "
            f"unresolved {self.unresolved}, no-location {self.skipped_empty}"
        )


def resolve_remote(
    raw: str,
    client,
    cache: GeoCache | None = None,
    report: GeocodeReport | None = None,
) -> str | None:
    """One remote lookup; results (including misses) are cached, errors are not."""
    report = report if report is not None else GeocodeReport()
    try:
        code = client.lookup(raw)
    except GeocodeLookupError as exc:
        report.remote_errors += 1
        log.warning("%s", exc)
        return None
    report.remote_calls += 1
    if cache is not None:
        cache.put(raw, code)
    return code


def geocode_corpus(
    labeled: list[LabeledRecord],
    gz: Gazetteer,
    cache: GeoCache,
    client=None,
    report: GeocodeReport | None = None,
) -> list[LabeledRecord]:
    """Fill the country field per record: cache, then gazetteer, then remote.

    The cache is persisted at the end; a failed persist is a warning, not an
    error. Strings already in the cache never reach the remote client.
    """
    report = report if report is not None else GeocodeReport()
    resolved: dict[str, str | None] = {}
    out: list[LabeledRecord] = []
    for lr in labeled:
        raw = lr.record.location
        if raw is None:
            report.skipped_empty += 1
            out.append(lr.with_country(None))
            continue
        if raw in resolved:
            code = resolved[raw]
        elif raw in cache:
            report.cache_hits += 1
            code = cache.get(raw)
        else:
            code = resolve_local(raw, gz)
            if code is not None:
                report.local_hits += 1
            elif client is not None:
                code = resolve_remote(raw, client, cache=cache, report=report)
        resolved[raw] = code
        if code is None:
            report.unresolved += 1
        out.append(lr.with_country(code))
    cache.save()
    return out
