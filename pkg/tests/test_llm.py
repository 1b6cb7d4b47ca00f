import hashlib
import json
import threading
import time

import httpx
import pytest
import respx

from confact.llm import (ChatMessage, ChatRequest, ChatResponse, FinishReason, HTTPBackend, LLMError,
                         RecordBackend, ReplayBackend, ScriptedBackend, UnrecordedRequestError,
                         backend_from_spec, canonical_digest, canonical_json, parallel_map)

URL = "http://llm.test/v1"


def req(text="hi", model="m", temperature=0, max_tokens=16):
    return ChatRequest(model, (ChatMessage("system", "s"), ChatMessage("user", text)), temperature, max_tokens)


def ok(text="Yes", reason="stop"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}, "finish_reason": reason}],
                                     "usage": {"prompt_tokens": 3, "completion_tokens": 1}})


def test_message_role_validated():
    with pytest.raises(ValueError):
        ChatMessage("tool", "x")


def test_canonical_form():
    text = canonical_json(req("héllo"))
    assert text == ('{"max_tokens":16,"messages":[{"content":"s","role":"system"},'
                    '{"content":"héllo","role":"user"}],"model":"m","temperature":0.0}')
    assert canonical_digest(req("héllo")) == hashlib.sha256(text.encode()).hexdigest()


def test_digest_sensitivity():
    base = canonical_digest(req())
    assert canonical_digest(req(temperature=0.0)) == base
    assert canonical_digest(req("hi ")) != base
    assert canonical_digest(req(model="other")) != base
    assert canonical_digest(req(max_tokens=17)) != base


def test_request_roundtrip():
    r = req()
    assert ChatRequest.from_dict(json.loads(json.dumps(r.to_dict()))) == r


@respx.mock
def test_http_success():
    route = respx.post(f"{URL}/chat/completions").mock(return_value=ok("Final Answer: yes", "length"))
    backend = HTTPBackend(URL, api_key="secret", model_name="m")
    resp = backend.complete(req())
    assert resp.text == "Final Answer: yes"
    assert resp.finish_reason is FinishReason.LENGTH
    assert resp.usage["prompt_tokens"] == 3
    sent = route.calls.last.request
    assert sent.headers["authorization"] == "Bearer secret"
    assert json.loads(sent.content) == req().to_dict()


@respx.mock
def test_http_retries_transient_errors():
    route = respx.post(f"{URL}/chat/completions").mock(
        side_effect=[httpx.Response(429), httpx.ConnectError("down"), ok("No")])
    backend = HTTPBackend(URL, attempts=3, backoff=0)
    assert backend.complete(req()).text == "No"
    assert route.call_count == 3


@respx.mock
def test_http_gives_up():
    route = respx.post(f"{URL}/chat/completions").mock(return_value=httpx.Response(503))
    with pytest.raises(LLMError, match="3 attempts"):
        HTTPBackend(URL, attempts=3, backoff=0).complete(req())
    assert route.call_count == 3


@respx.mock
def test_http_client_error_not_retried():
    route = respx.post(f"{URL}/chat/completions").mock(return_value=httpx.Response(400, text="bad"))
    with pytest.raises(LLMError, match="HTTP 400"):
        HTTPBackend(URL, attempts=3, backoff=0).complete(req())
    assert route.call_count == 1


@respx.mock
def test_http_malformed_payload():
    respx.post(f"{URL}/chat/completions").mock(return_value=httpx.Response(200, json={"oops": 1}))
    with pytest.raises(LLMError, match="malformed"):
        HTTPBackend(URL, backoff=0).complete(req())


def test_url_suffix_not_doubled():
    assert HTTPBackend(f"{URL}/chat/completions/").url == f"{URL}/chat/completions"


def test_record_then_replay(tmp_path):
    store = tmp_path / "store.jsonl"
    inner = ScriptedBackend(lambda r: r.messages[-1].content.upper(), model_name="m")
    rec = RecordBackend(inner, store)
    assert rec.complete(req("abc")).text == "ABC"
    assert rec.complete(req("abc")).text == "ABC"
    assert inner.calls == 1
    assert len(store.read_text().splitlines()) == 1
    entry = json.loads(store.read_text())
    assert entry["digest"] == canonical_digest(req("abc"))

    replay = ReplayBackend(store)
    assert replay.complete(req("abc")) == ChatResponse("ABC")
    with pytest.raises(UnrecordedRequestError) as info:
        replay.complete(req("other"))
    assert info.value.digest == canonical_digest(req("other"))


def test_record_resumes_existing_store(tmp_path):
    store = tmp_path / "store.jsonl"
    RecordBackend(ScriptedBackend(["first"]), store).complete(req())
    again = RecordBackend(ScriptedBackend([]), store)
    assert again.complete(req()).text == "first"


def test_replay_missing_store(tmp_path):
    with pytest.raises(LLMError, match="does not exist"):
        ReplayBackend(tmp_path / "nope.jsonl")


def test_replay_bad_entry(tmp_path):
    store = tmp_path / "s.jsonl"
    store.write_text('{"digest": "x"}\n')
    with pytest.raises(LLMError, match=":1:"):
        ReplayBackend(store)


def test_scripted_runs_out():
    backend = ScriptedBackend(["one"])
    backend.complete(req())
    with pytest.raises(LLMError):
        backend.complete(req())


def test_backend_from_spec(tmp_path, monkeypatch):
    store = tmp_path / "s.jsonl"
    store.write_text("")
    assert isinstance(backend_from_spec(f"replay:{store}", "m"), ReplayBackend)
    assert isinstance(backend_from_spec("https://x.test/v1"), HTTPBackend)
    monkeypatch.delenv("CONFACT_ENDPOINT", raising=False)
    with pytest.raises(LLMError):
        backend_from_spec(f"record:{store}")
    monkeypatch.setenv("CONFACT_ENDPOINT", "https://x.test/v1")
    assert isinstance(backend_from_spec(f"record:{store}"), RecordBackend)
    with pytest.raises(ValueError):
        backend_from_spec("carrier-pigeon")


def test_model_from_env(tmp_path, monkeypatch):
    store = tmp_path / "s.jsonl"
    store.write_text("")
    monkeypatch.setenv("CONFACT_MODEL", "env-model")
    assert backend_from_spec(f"replay:{store}").model_name == "env-model"


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(20), 8) == [x * x for x in range(20)]


def test_in_flight_bound():
    active, peak = 0, 0
    lock = threading.Lock()

    def slow(_):
        nonlocal active, peak
        with lock:
            active += 1
            peak = max(peak, active)
        time.sleep(0.02)
        with lock:
            active -= 1
        return "x"

    backend = ScriptedBackend(slow, max_parallel=2)
    parallel_map(lambda _: backend.complete(req()), range(10), 8)
    assert peak <= 2
    assert backend.calls == 10
