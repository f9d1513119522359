from __future__ import annotations

import json
import threading

import httpx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ideoscale.errors import (
    AuthError,
    MissingSidecar,
    ProviderError,
    ProviderMismatch,
    TransientExhausted,
    UnknownKind,
)
from ideoscale.gateway import (
    AnnotatorConfig,
    ChatMessage,
    ChatRequest,
    Gateway,
    LiveProvider,
    RateLimiter,
    ResponseCache,
    RetryPolicy,
    Sidecar,
    SyntheticAnnotator,
    cache_key,
    synthetic_complete,
)
from ideoscale.parsing import parse_cot_outcome, parse_name_scores, parse_tail_score


def _request(text="hello", seed=0, sidecar=None):
    return ChatRequest.single(text, model_id="m", temperature=0.2, sidecar=sidecar,
                              request_seed=seed)


def _ok_body(content="1.0"):
    return {"choices": [{"message": {"role": "assistant", "content": content}}]}


class FakeClock:
    def __init__(self):
        self.now = 0.0
        self.sleeps: list[float] = []

    def __call__(self):
        return self.now

    def sleep(self, seconds):
        self.sleeps.append(seconds)
        self.now += seconds


# -- request identity ---------------------------------------------------------


def test_cache_key_ignores_sidecar_but_not_seed():
    plain = _request()
    with_sidecar = _request(sidecar=Sidecar("binary", {"latent": 2.0}))
    assert cache_key(plain) == cache_key(with_sidecar)
    assert cache_key(plain) != cache_key(_request(seed=1))
    assert cache_key(plain) != cache_key(_request("hello!"))


@given(st.text(min_size=1), st.floats(0, 2), st.integers(0, 10))
def test_cache_key_is_a_pure_function(text, temperature, seed):
    if not text.strip():
        return
    a = ChatRequest.single(text, model_id="m", temperature=temperature, request_seed=seed)
    b = ChatRequest.single(text, model_id="m", temperature=temperature, request_seed=seed)
    assert cache_key(a) == cache_key(b)


def test_wire_payload_never_carries_sidecar():
    request = _request(sidecar=Sidecar("binary", {"latent": 1.23456}))
    wire = json.dumps(request.wire_payload())
    assert "latent" not in wire and "1.23456" not in wire and "sidecar" not in wire
    assert set(request.wire_payload()) == {"model", "temperature", "messages"}


def test_chat_message_requires_content():
    with pytest.raises(ValueError):
        ChatMessage.user("")


# -- cache --------------------------------------------------------------------


def test_cache_persists_and_reloads(tmp_path):
    cache = ResponseCache(tmp_path)
    request = _request()
    cache.put(request, "answer", "synthetic")
    fresh = ResponseCache(tmp_path)
    record = fresh.get(cache_key(request))
    assert record.text == "answer" and record.provider == "synthetic"
    assert record.request == request.identity()
    assert len(fresh) == 1
    assert not list(tmp_path.glob(".tmp-*"))


def test_cache_inspect_and_gc(tmp_path):
    cache = ResponseCache(tmp_path)
    cache.put(_request("a"), "x", "synthetic")
    cache.put(_request("b"), "y", "live")
    (tmp_path / "deadbeef.json").write_text("{not json")
    (tmp_path / ".tmp-stray.json").write_text("")
    info = cache.inspect()
    assert info["records"] == 2 and info["corrupt"] == 1
    assert info["providers"] == {"live": 1, "synthetic": 1}
    removed = ResponseCache(tmp_path).gc(provider="live")
    assert removed == 3
    assert ResponseCache(tmp_path).inspect()["providers"] == {"synthetic": 1}


def test_concurrent_puts_leave_complete_records(tmp_path):
    cache = ResponseCache(tmp_path)
    requests = [_request(f"q{i}") for i in range(40)]
    threads = [threading.Thread(target=cache.put, args=(r, f"a{i}", "synthetic"))
               for i, r in enumerate(requests)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    fresh = ResponseCache(tmp_path)
    assert all(fresh.get(cache_key(r)).text == f"a{i}" for i, r in enumerate(requests))


# -- gateway ------------------------------------------------------------------


class Scripted:
    name = "scripted"

    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.calls = 0

    def __call__(self, request):
        self.calls += 1
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def test_gateway_is_cache_first(tmp_path):
    backend = Scripted(["first"])
    gateway = Gateway(backend, cache=ResponseCache(tmp_path))
    assert gateway.complete(_request()).cache_hit is False
    again = gateway.complete(_request())
    assert again.text == "first" and again.cache_hit and backend.calls == 1
    assert gateway.stats.as_dict()["requests"] == 2
    assert gateway.stats.cache_hits + gateway.stats.cache_misses == gateway.stats.requests


def test_replay_mode_is_closed_world(tmp_path):
    cache = ResponseCache(tmp_path)
    cache.put(_request(), "stored", "live")
    replay = Gateway(None, cache=cache)
    assert replay.complete(_request()).text == "stored"
    with pytest.raises(ProviderMismatch):
        replay.complete(_request("unseen"))


def test_retry_backoff_schedule_and_exhaustion():
    from ideoscale.errors import TransientError

    clock = FakeClock()
    backend = Scripted([TransientError("503")] * 5)
    gateway = Gateway(backend, sleep=clock.sleep)
    with pytest.raises(TransientExhausted):
        gateway.complete(_request())
    assert backend.calls == 5
    assert clock.sleeps == [1.0, 2.0, 4.0, 8.0]


def test_retry_recovers_after_transient_failures():
    from ideoscale.errors import TransientError

    clock = FakeClock()
    backend = Scripted([TransientError("429"), TransientError("502"), "ok"])
    gateway = Gateway(backend, sleep=clock.sleep, retry=RetryPolicy(base_delay=0.5))
    assert gateway.complete(_request()).text == "ok"
    assert clock.sleeps == [0.5, 1.0]
    assert gateway.stats.retries == 2


# -- live provider over a mock transport ---------------------------------------


def _live(handler, key="sk-test"):
    return LiveProvider("https://example.invalid/v1", api_key=key,
                        transport=httpx.MockTransport(handler))


def test_live_provider_posts_wire_payload_only():
    seen = []

    def handler(request: httpx.Request):
        seen.append(request)
        return httpx.Response(200, json=_ok_body("Score: 1.5"))

    provider = _live(handler)
    text = provider(_request("rate this", sidecar=Sidecar("binary", {"latent": 9.87})))
    assert text == "Score: 1.5"
    sent = seen[0]
    assert sent.url.path == "/v1/chat/completions"
    assert sent.headers["Authorization"] == "Bearer sk-test"
    body = json.loads(sent.content)
    assert body == {"model": "m", "temperature": 0.2,
                    "messages": [{"role": "user", "content": "rate this"}]}
    assert b"9.87" not in sent.content and b"latent" not in sent.content


def test_live_provider_retries_server_errors_five_times():
    hits = []

    def handler(request):
        hits.append(1)
        return httpx.Response(503, text="busy")

    gateway = Gateway(_live(handler), sleep=lambda s: None)
    with pytest.raises(TransientExhausted):
        gateway.complete(_request())
    assert len(hits) == 5


def test_live_provider_auth_error_is_not_retried():
    hits = []

    def handler(request):
        hits.append(1)
        return httpx.Response(401, text="bad key")

    gateway = Gateway(_live(handler), sleep=lambda s: None)
    with pytest.raises(AuthError):
        gateway.complete(_request())
    assert len(hits) == 1


def test_live_provider_without_key_fails_before_network(monkeypatch):
    monkeypatch.delenv("IDEOSCALE_API_KEY", raising=False)
    hits = []
    provider = LiveProvider("https://example.invalid/v1",
                            transport=httpx.MockTransport(lambda r: hits.append(1)))
    with pytest.raises(AuthError):
        provider(_request())
    assert hits == []


def test_live_provider_reads_key_from_environment(monkeypatch):
    monkeypatch.setenv("IDEOSCALE_API_KEY", "sk-env")
    seen = []

    def handler(request):
        seen.append(request.headers["Authorization"])
        return httpx.Response(200, json=_ok_body())

    LiveProvider("https://example.invalid/v1", transport=httpx.MockTransport(handler))(_request())
    assert seen == ["Bearer sk-env"]


def test_live_provider_client_errors_and_malformed_bodies():
    provider = _live(lambda r: httpx.Response(400, text="bad"))
    with pytest.raises(ProviderError):
        provider(_request())
    provider = _live(lambda r: httpx.Response(200, json={"nope": 1}))
    with pytest.raises(ProviderError):
        provider(_request())


def test_live_provider_with_warm_cache_sends_nothing(tmp_path):
    cache = ResponseCache(tmp_path)
    cache.put(_request(), "cached", "synthetic")
    hits = []
    gateway = Gateway(_live(lambda r: hits.append(1)), cache=cache)
    assert gateway.complete(_request()).text == "cached"
    assert hits == []


# -- rate limiter ---------------------------------------------------------------


def test_rate_limiter_admits_limit_per_window():
    clock = FakeClock()
    limiter = RateLimiter(3, window=60, clock=clock, sleep=clock.sleep)
    admitted = []
    for _ in range(7):
        limiter.acquire()
        admitted.append(clock.now)
    assert admitted == [0, 0, 0, 60, 60, 60, 120]


@given(st.integers(1, 6), st.lists(st.integers(0, 30), min_size=1, max_size=40))
def test_rate_limiter_never_exceeds_limit_in_any_window(limit, gaps):
    clock = FakeClock()
    limiter = RateLimiter(limit, window=60, clock=clock, sleep=clock.sleep)
    times = []
    for gap in gaps:
        clock.now += gap
        limiter.acquire()
        times.append(clock.now)
    for i, start in enumerate(times):
        inside = [t for t in times[i:] if t - start < 60]
        assert len(inside) <= limit


# -- synthetic annotator ---------------------------------------------------------


def test_synthetic_list_is_exact_at_zero_noise():
    config = AnnotatorConfig(traits={"A": -1.25, "B": 3.0})
    request = _request("list", sidecar=Sidecar("ideal_point_list", {"names": ["B", "A"]}))
    text = synthetic_complete(request, config)
    assert text.splitlines() == ["B: 3.0", "A: -1.25"]
    assert parse_name_scores(text, ["A", "B"]).scores == {"A": -1.25, "B": 3.0}


def test_synthetic_noise_is_keyed_by_request():
    config = AnnotatorConfig(traits={"A": 0.0}, sigma=1.0, seed=4)
    sidecar = Sidecar("ideal_point_list", {"names": ["A"]})
    one = synthetic_complete(_request("x", sidecar=sidecar), config)
    assert one == synthetic_complete(_request("x", sidecar=sidecar), config)
    assert one != synthetic_complete(_request("x", seed=1, sidecar=sidecar), config)


def test_synthetic_omission_schedule_drives_retries():
    config = AnnotatorConfig(traits={"A": 1.0, "B": 2.0}, omit_names_until_seed={"B": 2})
    sidecar = Sidecar("ideal_point_list", {"names": ["A", "B"]})
    assert "B" not in synthetic_complete(_request(seed=1, sidecar=sidecar), config)
    assert "B: 2.0" in synthetic_complete(_request(seed=2, sidecar=sidecar), config)


def test_synthetic_binary_gate_and_cot():
    config = AnnotatorConfig()
    gate = synthetic_complete(_request(sidecar=Sidecar("binary", {"latent": None})), config)
    assert gate == "Not ideological."
    cot = synthetic_complete(_request(sidecar=Sidecar("binary", {"latent": -2.5, "cot": True})),
                             config)
    assert parse_cot_outcome(cot).score == -2.5


def test_synthetic_platform_round_trip_marker():
    config = AnnotatorConfig()
    generated = synthetic_complete(
        _request(sidecar=Sidecar("platform_gen", {"target": -3.75, "issue": "trade"})), config)
    scored = synthetic_complete(
        _request(f"Score this: {generated}", sidecar=Sidecar("platform_score", {})), config)
    assert parse_tail_score(scored) == -3.75
    refused = synthetic_complete(_request("no marker", sidecar=Sidecar("platform_score", {})),
                                 config)
    with pytest.raises(Exception):
        parse_tail_score(refused)


def test_synthetic_requires_known_sidecar():
    with pytest.raises(MissingSidecar):
        SyntheticAnnotator(AnnotatorConfig())(_request())
    with pytest.raises(UnknownKind):
        SyntheticAnnotator(AnnotatorConfig())(_request(sidecar=Sidecar("mystery")))
