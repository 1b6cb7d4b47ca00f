"""Chat-completion backends: OpenAI-compatible HTTP, record/replay, and scripted."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence, TypeVar

import httpx

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

ENV_ENDPOINT = "CONFACT_ENDPOINT"
ENV_API_KEY = "CONFACT_API_KEY"
ENV_MODEL = "CONFACT_MODEL"

DEFAULT_MAX_PARALLEL = 4


class LLMError(RuntimeError):
    """Transport or protocol failure talking to a backend."""


class UnrecordedRequestError(LLMError):
    def __init__(self, digest: str):
        self.digest = digest
        super().__init__(f"unrecorded request {digest}")


class FinishReason(str, Enum):
    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    model_name: str
    messages: tuple[ChatMessage, ...]
    temperature: float = 0.0
    max_output_tokens: int = 1024

    def __post_init__(self):
        if not self.messages:
            raise ValueError("request needs at least one message")
        object.__setattr__(self, "messages", tuple(self.messages))

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "temperature": float(self.temperature),
            "max_tokens": int(self.max_output_tokens),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ChatRequest":
        return cls(
            model_name=obj["model"],
            messages=tuple(ChatMessage(m["role"], m["content"]) for m in obj["messages"]),
            temperature=float(obj["temperature"]),
            max_output_tokens=int(obj["max_tokens"]),
        )


@dataclass(frozen=True)
class ChatResponse:
    text: str
    finish_reason: FinishReason = FinishReason.STOP
    usage: dict | None = None

    def to_dict(self) -> dict:
        return {"text": self.text, "finish_reason": self.finish_reason.value, "usage": self.usage}

    @classmethod
    def from_dict(cls, obj: dict) -> "ChatResponse":
        return cls(obj["text"], FinishReason(obj.get("finish_reason", "stop")), obj.get("usage"))


def canonical_json(request: ChatRequest) -> str:
    return json.dumps(request.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def canonical_digest(request: ChatRequest) -> str:
    """SHA-256 over the canonical JSON form; message order and content are kept verbatim."""
    return hashlib.sha256(canonical_json(request).encode("utf-8")).hexdigest()


class Backend:
    """Base class. Subclasses implement :meth:`_complete`.

    At most ``max_parallel`` requests are in flight through one handle.
    """

    model_name: str = "default"
    context_window: int | None = None

    def __init__(self, model_name: str = "default", max_parallel: int = DEFAULT_MAX_PARALLEL,
                 context_window: int | None = None):
        self.model_name = model_name
        self.context_window = context_window
        self.max_parallel = max_parallel
        self._slots = threading.BoundedSemaphore(max_parallel)
        self.calls = 0
        self._count_lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._slots:
            with self._count_lock:
                self.calls += 1
            return self._complete(request)

    def _complete(self, request: ChatRequest) -> ChatResponse:  # pragma: no cover
        raise NotImplementedError


def complete(request: ChatRequest, backend: Backend) -> ChatResponse:
    return backend.complete(request)


class HTTPBackend(Backend):
    """Client for an OpenAI-compatible ``/chat/completions`` endpoint."""

    retry_statuses = frozenset({429, 500, 502, 503, 504})

    def __init__(self, base_url: str, api_key: str | None = None, model_name: str = "default",
                 attempts: int = 3, backoff: float = 1.0, timeout: float = 120.0,
                 max_parallel: int = DEFAULT_MAX_PARALLEL, context_window: int | None = None,
                 client: httpx.Client | None = None):
        super().__init__(model_name, max_parallel, context_window)
        self.url = base_url.rstrip("/")
        if not self.url.endswith("/chat/completions"):
            self.url += "/chat/completions"
        self.attempts = attempts
        self.backoff = backoff
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = client or httpx.Client(timeout=timeout, headers=headers)
        if client is not None and api_key:
            self._client.headers.update(headers)

    def _complete(self, request: ChatRequest) -> ChatResponse:
        payload = request.to_dict()
        last_error = "no attempts made"
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = self._client.post(self.url, json=payload)
            except httpx.TransportError as exc:
                last_error = f"transport error: {exc}"
                continue
            if resp.status_code in self.retry_statuses:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code >= 400:
                raise LLMError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            return self._parse(resp)
        raise LLMError(f"giving up after {self.attempts} attempts: {last_error}")

    @staticmethod
    def _parse(resp: httpx.Response) -> ChatResponse:
        try:
            body = resp.json()
            choice = body["choices"][0]
            text = choice["message"]["content"] or ""
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise LLMError(f"malformed completion payload: {exc}") from None
        reason = choice.get("finish_reason")
        finish = {"stop": FinishReason.STOP, "length": FinishReason.LENGTH}.get(reason, FinishReason.STOP)
        return ChatResponse(text, finish, body.get("usage"))


def _read_store(path: Path) -> dict[str, ChatResponse]:
    store: dict[str, ChatResponse] = {}
    if not path.exists():
        return store
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                store[entry["digest"]] = ChatResponse.from_dict(entry["response"])
            except (ValueError, KeyError) as exc:
                raise LLMError(f"{path}:{lineno}: bad replay entry ({exc})") from None
    return store


class ReplayBackend(Backend):
    """Serves responses recorded under their request digest. Never touches the network."""

    def __init__(self, path: str | Path, model_name: str = "default",
                 max_parallel: int = DEFAULT_MAX_PARALLEL, context_window: int | None = None):
        super().__init__(model_name, max_parallel, context_window)
        self.path = Path(path)
        if not self.path.exists():
            raise LLMError(f"replay store {self.path} does not exist")
        self._store = _read_store(self.path)

    def _complete(self, request: ChatRequest) -> ChatResponse:
        digest = canonical_digest(request)
        try:
            return self._store[digest]
        except KeyError:
            raise UnrecordedRequestError(digest) from None


class RecordBackend(Backend):
    """Wraps another backend and appends every new response to a replay store.

    Requests already present in the store are answered from it, so retried
    runs never duplicate entries.
    """

    def __init__(self, inner: Backend, path: str | Path):
        super().__init__(inner.model_name, inner.max_parallel, inner.context_window)
        self.inner = inner
        self.path = Path(path)
        self._store = _read_store(self.path)
        self._write_lock = threading.Lock()

    def _complete(self, request: ChatRequest) -> ChatResponse:
        digest = canonical_digest(request)
        cached = self._store.get(digest)
        if cached is not None:
            return cached
        response = self.inner.complete(request)
        with self._write_lock:
            if digest not in self._store:
                self._store[digest] = response
                entry = {"digest": digest, "request": request.to_dict(), "response": response.to_dict()}
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")
        return response


class ScriptedBackend(Backend):
    """Answers from a callable or a fixed list of replies (consumed in call order).

    Handy for tests and for producing offline replay stores.
    """

    def __init__(self, script: Callable[[ChatRequest], str] | Sequence[str],
                 model_name: str = "scripted", max_parallel: int = DEFAULT_MAX_PARALLEL,
                 context_window: int | None = None):
        super().__init__(model_name, max_parallel, context_window)
        self._script = script if callable(script) else list(script)
        self._lock = threading.Lock()
        self.requests: list[ChatRequest] = []

    def _complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self.requests.append(request)
            if callable(self._script):
                text = None
            elif not self._script:
                raise LLMError("scripted backend ran out of replies")
            else:
                text = self._script.pop(0)
        if text is None:
            text = self._script(request)
        return ChatResponse(text)


class FailingBackend(Backend):
    """Every call raises :class:`LLMError`."""

    def _complete(self, request: ChatRequest) -> ChatResponse:
        raise LLMError("backend unavailable")


def backend_from_spec(spec: str, model_name: str | None = None,
                      max_parallel: int = DEFAULT_MAX_PARALLEL) -> Backend:
    """Build a backend from ``https://...``, ``replay:<path>`` or ``record:<path>``.

    Live backends read the credential from ``CONFACT_API_KEY``; ``record:``
    also reads the endpoint from ``CONFACT_ENDPOINT``.
    """
    model = model_name or os.environ.get(ENV_MODEL, "default")
    if spec.startswith("replay:"):
        return ReplayBackend(spec[len("replay:"):], model, max_parallel)
    if spec.startswith("record:"):
        endpoint = os.environ.get(ENV_ENDPOINT)
        if not endpoint:
            raise LLMError(f"record mode needs {ENV_ENDPOINT} to be set")
        inner = HTTPBackend(endpoint, os.environ.get(ENV_API_KEY), model, max_parallel=max_parallel)
        return RecordBackend(inner, spec[len("record:"):])
    if spec.startswith(("http://", "https://")):
        return HTTPBackend(spec, os.environ.get(ENV_API_KEY), model, max_parallel=max_parallel)
    raise ValueError(f"unrecognised backend spec {spec!r}")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: int = DEFAULT_MAX_PARALLEL) -> list[R]:
    """Like ``map`` but concurrent; results keep input order."""
    items = list(items)
    if max_workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, items))
