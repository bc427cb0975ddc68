"""Text-generation backends: a deterministic mock and a completion-style HTTP client,
both behind a response cache and a bounded-parallelism batch call."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Mapping, Sequence

import httpx

from .exceptions import AuthError, BackendError, BadTable, ConfigError, RateLimited, TransportError
from .lang import Registry, default_registry
from .prompt import PIVOT, PromptText

log = logging.getLogger(__name__)

DEFAULT_MAX_TOKENS = 256
DEFAULT_SUM_MAX_TOKENS = 400
MAX_STOP = 4


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    max_tokens: int = DEFAULT_MAX_TOKENS
    temperature: float = 0.0
    stop: tuple = ("\n",)
    model_id: str = "mock"
    backend_id: str = "mock"

    def __post_init__(self):
        object.__setattr__(self, "stop", tuple(self.stop))
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if len(self.stop) > MAX_STOP:
            raise ValueError(f"at most {MAX_STOP} stop sequences are allowed")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    def to_dict(self):
        return {
            "backend_id": self.backend_id,
            "model_id": self.model_id,
            "prompt": self.prompt,
            "max_tokens": self.max_tokens,
            "temperature": float(self.temperature),
            "stop": list(self.stop),
        }

    def cache_key(self) -> str:
        """SHA-256 over the canonical JSON form of the request."""
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class GenerationResult:
    text: str
    finish_reason: str  # stop | length | error
    cached: bool = False
    latency_ms: int = 0
    error: str | None = None

    @property
    def ok(self):
        return self.finish_reason != "error"


def truncate_at_stop(text: str, stop: Sequence[str]) -> tuple[str, bool]:
    cut = -1
    for s in stop:
        if not s:
            continue
        i = text.find(s)
        if i != -1 and (cut == -1 or i < cut):
            cut = i
    if cut == -1:
        return text, False
    return text[:cut], True


class ResponseCache:
    """Content-addressed store: ``<root>/<first two hex>/<digest>.json``.

    Writes go through a temp file and ``os.replace`` so concurrent readers
    never observe a partial entry; writers to the same key are serialised.
    """

    def __init__(self, root):
        self.root = Path(root)
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def _lock(self, key):
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def get(self, key: str) -> dict | None:
        try:
            with open(self.path(key), encoding="utf-8") as f:
                return json.load(f)
        except FileNotFoundError:
            return None

    def put(self, req: GenerationRequest, text: str, finish_reason: str) -> str:
        key = req.cache_key()
        path = self.path(key)
        entry = {
            "request": req.to_dict(),
            "text": text,
            "finish_reason": finish_reason,
            "created_at": datetime.now(timezone.utc).isoformat(),
        }
        with self._lock(key):
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as f:
                    json.dump(entry, f, ensure_ascii=False, sort_keys=True)
                os.replace(tmp, path)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        return key


class Backend:
    """Base class. Subclasses implement ``_complete(req) -> (text, finish_reason)``."""

    def __init__(self, backend_id="mock", model_id="mock", cache: ResponseCache | None = None,
                 parallelism=1, max_tokens=DEFAULT_MAX_TOKENS):
        self.backend_id = backend_id
        self.model_id = model_id
        self.cache = cache
        self.parallelism = parallelism
        self.max_tokens = max_tokens

    def _complete(self, req: GenerationRequest) -> tuple[str, str]:
        raise NotImplementedError

    def request(self, prompt: PromptText | str, *, max_tokens=None, temperature=0.0, stop=None):
        """Build a request for this backend from a rendered prompt."""
        if isinstance(prompt, PromptText):
            text, default_stop = prompt.text, prompt.stop
        else:
            text, default_stop = prompt, ("\n",)
        return GenerationRequest(
            prompt=text,
            max_tokens=max_tokens or self.max_tokens,
            temperature=temperature,
            stop=tuple(stop) if stop is not None else default_stop,
            model_id=self.model_id,
            backend_id=self.backend_id,
        )

    def generate(self, req: GenerationRequest) -> GenerationResult:
        use_cache = self.cache is not None and req.temperature == 0
        if use_cache:
            hit = self.cache.get(req.cache_key())
            if hit is not None:
                return GenerationResult(hit["text"], hit["finish_reason"], cached=True)
        start = time.monotonic()
        raw, finish = self._complete(req)
        text, stopped = truncate_at_stop(raw, req.stop)
        if stopped:
            finish = "stop"
        latency = int((time.monotonic() - start) * 1000)
        if use_cache:
            self.cache.put(req, text, finish)
        return GenerationResult(text, finish, cached=False, latency_ms=latency)

    def generate_batch(self, reqs: Sequence[GenerationRequest], parallelism: int | None = None):
        """Generate for every request; failures land in their own slot as ``finish_reason='error'``."""
        reqs = list(reqs)
        parallelism = parallelism or self.parallelism
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not reqs:
            return []

        def one(req):
            try:
                return self.generate(req)
            except Exception as exc:  # per-item failure is data, not a batch abort
                log.warning("generation failed: %s", exc)
                return GenerationResult("", "error", error=f"{type(exc).__name__}: {exc}")

        if parallelism == 1:
            return [one(r) for r in reqs]
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            return list(pool.map(one, reqs))


class TranslationTables:
    """Bijective word tables per language pair, usable in both directions."""

    def __init__(self, tables: Mapping):
        self._tables: dict[tuple[str, str], dict[str, str]] = {}
        for key, table in tables.items():
            src, tgt = key.split("-", 1) if isinstance(key, str) else key
            table = dict(table)
            if len(set(table.values())) != len(table):
                raise BadTable(f"table {src}-{tgt} is not bijective")
            inverse = {v: k for k, v in table.items()}
            for pair, t in (((src, tgt), table), ((tgt, src), inverse)):
                existing = self._tables.get(pair)
                if existing is not None and existing != t:
                    raise BadTable(f"conflicting tables for {pair[0]}-{pair[1]}")
                self._tables[pair] = t
        self.vocab: dict[str, set] = {}
        for (src, _), t in self._tables.items():
            self.vocab.setdefault(src, set()).update(t)

    @property
    def languages(self):
        return set(self.vocab)

    def partners(self, lang):
        return sorted(t for s, t in self._tables if s == lang)

    def has(self, src, tgt):
        return (src, tgt) in self._tables

    def translate(self, text: str, src: str, tgt: str) -> str:
        """Word-wise mapping; unknown words pass through unchanged."""
        table = self._tables[(src, tgt)]
        return " ".join(table.get(w, w) for w in text.split())

    def guess(self, texts: Sequence[str]) -> str | None:
        """Language whose vocabulary covers the most tokens; None on ties or no coverage."""
        tokens = [w for t in texts for w in t.split()]
        scores = {lang: sum(w in vocab for w in tokens) for lang, vocab in self.vocab.items()}
        if not scores:
            return None
        best = max(scores.values())
        if best == 0:
            return None
        winners = [l for l, s in scores.items() if s == best]
        return winners[0] if len(winners) == 1 else None


def _split_label(line):
    label, sep, rest = line.partition(":")
    return label.strip(), rest.strip() if sep else None


class MockBackend(Backend):
    """Deterministic stand-in for a language model.

    Exactly one behaviour applies, checked in this order:

    * ``fn``: any callable ``prompt -> completion``
    * ``responses``: exact prompt -> completion, ``default`` otherwise
    * ``tables``: word tables applied to the last input line of a pair or
      pivot prompt. Languages come from the tag names when they resolve in
      the registry, otherwise from vocabulary coverage of the exemplars.
      With ``strict_targets`` the mock copies the input back unchanged
      (i.e. answers in the wrong language) unless every exemplar's target
      side is in the requested language.
    """

    def __init__(self, responses: Mapping[str, str] | None = None, default: str = "",
                 tables: Mapping | TranslationTables | None = None, fn: Callable | None = None,
                 strict_targets=False, registry: Registry | None = None, pivot=PIVOT, **kwargs):
        super().__init__(**kwargs)
        self.responses = dict(responses or {})
        self.default = default
        if tables is not None and not isinstance(tables, TranslationTables):
            tables = TranslationTables(tables)
        self.tables = tables
        self.fn = fn
        self.strict_targets = strict_targets
        self.registry = registry if registry is not None else default_registry()
        self.pivot = pivot

    def _complete(self, req):
        prompt = req.prompt
        if self.fn is not None:
            return self.fn(prompt), "stop"
        if prompt in self.responses:
            return self.responses[prompt], "stop"
        if self.tables is not None:
            out = self._table_completion(prompt)
            if out is not None:
                return out, "stop"
        return self.default, "stop"

    def _resolve(self, label):
        spec = self.registry.by_name(label)
        return spec.code if spec is not None else None

    def _table_completion(self, prompt):
        if "\n\n" in prompt:
            return self._pivot_completion(prompt)
        lines = prompt.split("\n")
        if len(lines) < 2 or len(lines) % 2 or not lines[-1].endswith(":"):
            return None
        src_label, text = _split_label(lines[-2])
        if text is None:
            return None
        tgt = self._resolve(lines[-1][:-1].strip())
        src = self._resolve(src_label)
        if src not in self.tables.languages:
            src = self.tables.guess([text])
        ex_targets = []
        for i in range(0, len(lines) - 2, 2):
            label, ex_tgt = _split_label(lines[i + 1])
            lang = self._resolve(label)
            if lang is None:
                lang = self.tables.guess([ex_tgt or ""])
            ex_targets.append(lang)
        if tgt is None:
            known = {t for t in ex_targets if t is not None}
            if len(known) == 1:
                tgt = known.pop()
            elif src is not None and len(self.tables.partners(src)) == 1:
                tgt = self.tables.partners(src)[0]
        if self.strict_targets and ex_targets and any(t != tgt for t in ex_targets):
            return " " + text
        if src is None or tgt is None or not self.tables.has(src, tgt):
            return " " + text
        return " " + self.tables.translate(text, src, tgt)

    def _pivot_completion(self, prompt):
        blocks = prompt.split("\n\n")
        last = blocks[-1].split("\n")
        if len(last) != 2 or not last[1].endswith(":") or len(blocks) < 2:
            return None
        shots = [b.split("\n") for b in blocks[:-1]]
        if any(len(b) != 3 for b in shots):
            return None
        src_label, text = _split_label(last[0])
        src = self._resolve(src_label)
        if src not in self.tables.languages:
            src = self.tables.guess([text])
        y_label, _ = _split_label(shots[0][2])
        y = self._resolve(y_label)
        if y not in self.tables.languages:
            y = self.tables.guess([_split_label(s[2])[1] or "" for s in shots])
        if src is None or y is None or not self.tables.has(src, self.pivot) or not self.tables.has(self.pivot, y):
            return " " + text
        en = self.tables.translate(text, src, self.pivot)
        return f" {en}\n{y_label}: {self.tables.translate(en, self.pivot, y)}"


_DEFAULT_FIELDS = {
    "prompt": "prompt",
    "max_tokens": "max_tokens",
    "temperature": "temperature",
    "stop": "stop",
    "model": "model",
}


def _dig(obj, path):
    for part in path.split("."):
        obj = obj[int(part)] if isinstance(obj, list) else obj[part]
    return obj


class HttpBackend(Backend):
    """Completion-style HTTP adapter (prompt in, text out).

    Field names, the response path and the credential variable come from
    config. The credential is read from the environment on every call and is
    never stored.
    """

    def __init__(self, base_url, credential_env=None, fields=None, text_path="choices.0.text",
                 finish_path="choices.0.finish_reason", max_retries=3, backoff=0.5, timeout=60.0,
                 auth_header="Authorization", auth_scheme="Bearer", transport=None,
                 sleep=time.sleep, **kwargs):
        super().__init__(**kwargs)
        self.base_url = base_url
        self.credential_env = credential_env
        self.fields = {**_DEFAULT_FIELDS, **(fields or {})}
        self.text_path = text_path
        self.finish_path = finish_path
        self.max_retries = max_retries
        self.backoff = backoff
        self.timeout = timeout
        self.auth_header = auth_header
        self.auth_scheme = auth_scheme
        self._transport = transport
        self._sleep = sleep

    def _headers(self):
        headers = {"Content-Type": "application/json"}
        if self.credential_env:
            token = os.environ.get(self.credential_env)
            if not token:
                raise AuthError(f"credential variable {self.credential_env} is not set")
            headers[self.auth_header] = f"{self.auth_scheme} {token}".strip()
        return headers

    def _payload(self, req):
        f = self.fields
        return {
            f["model"]: req.model_id,
            f["prompt"]: req.prompt,
            f["max_tokens"]: req.max_tokens,
            f["temperature"]: req.temperature,
            f["stop"]: list(req.stop),
        }

    def _complete(self, req):
        headers = self._headers()
        payload = self._payload(req)
        last_exc: Exception | None = None
        with httpx.Client(transport=self._transport, timeout=self.timeout) as client:
            for attempt in range(self.max_retries + 1):
                if attempt:
                    self._sleep(self.backoff * 2 ** (attempt - 1))
                try:
                    resp = client.post(self.base_url, json=payload, headers=headers)
                except httpx.TransportError as exc:
                    last_exc = TransportError(str(exc))
                    continue
                if resp.status_code in (401, 403):
                    raise AuthError(f"HTTP {resp.status_code} from {self.base_url}")
                if resp.status_code == 429:
                    last_exc = RateLimited(f"HTTP 429 from {self.base_url}")
                    continue
                if resp.status_code >= 500:
                    last_exc = TransportError(f"HTTP {resp.status_code} from {self.base_url}")
                    continue
                if resp.status_code >= 400:
                    raise BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}")
                body = resp.json()
                try:
                    text = _dig(body, self.text_path)
                except (KeyError, IndexError, TypeError) as exc:
                    raise BackendError(f"response has no {self.text_path!r}") from exc
                try:
                    finish = _dig(body, self.finish_path)
                except (KeyError, IndexError, TypeError):
                    finish = None
                return text, "length" if finish == "length" else "stop"
        raise last_exc


def load_backend(config: Mapping, cache_dir=None, registry: Registry | None = None, **overrides) -> Backend:
    """Instantiate a backend from its config record.

    Keys: ``backend_id, kind (live|mock), base_url, credential_env, model_id,
    max_retries, parallelism``; mock backends also take ``responses, default,
    tables, strict_targets``; live ones ``fields, text_path, finish_path,
    backoff, timeout``.
    """
    cfg = {**config, **overrides}
    kind = cfg.get("kind", "mock")
    cache = ResponseCache(cache_dir) if cache_dir else None
    common = dict(
        backend_id=cfg.get("backend_id", kind),
        model_id=cfg.get("model_id", kind),
        cache=cache,
        parallelism=int(cfg.get("parallelism", 1)),
        max_tokens=int(cfg.get("max_tokens", DEFAULT_MAX_TOKENS)),
    )
    if kind == "mock":
        return MockBackend(
            responses=cfg.get("responses"),
            default=cfg.get("default", ""),
            tables=cfg.get("tables"),
            strict_targets=bool(cfg.get("strict_targets", False)),
            registry=registry,
            **common,
        )
    if kind == "live":
        if not cfg.get("base_url"):
            raise ConfigError("live backend needs base_url")
        return HttpBackend(
            base_url=cfg["base_url"],
            credential_env=cfg.get("credential_env"),
            fields=cfg.get("fields"),
            text_path=cfg.get("text_path", "choices.0.text"),
            finish_path=cfg.get("finish_path", "choices.0.finish_reason"),
            max_retries=int(cfg.get("max_retries", 3)),
            backoff=float(cfg.get("backoff", 0.5)),
            timeout=float(cfg.get("timeout", 60.0)),
            transport=cfg.get("transport"),
            **common,
        )
    raise ConfigError(f"unknown backend kind {kind!r}")
