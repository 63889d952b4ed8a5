"""Pluggable completion backends.

Deterministic test backends (echo, scripted) make chain runs fully
reproducible; the HTTP client speaks the de-facto completion wire format
for live use against a real model server. Every backend honors sampling
count, stop sequences, and the token limit the same way.
"""

from __future__ import annotations

import json
import os
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from typing import Protocol, Union

DEFAULT_LLM_URL_ENV = "CHAINWEAVER_LLM_URL"
DEFAULT_LLM_TOKEN_ENV = "CHAINWEAVER_LLM_TOKEN"


class BackendError(Exception):
    """Transport failure or an unanswerable request (e.g. no scripted rule)."""


class BackendTimeoutError(BackendError):
    """The HTTP backend did not answer within its timeout."""


@dataclass(frozen=True)
class LLMParams:
    """Sampling parameters attached to a generic LLM node."""

    temperature: float = 0.7
    max_tokens: int = 256
    stop_sequences: tuple[str, ...] = ()
    n_samples: int = 1


@dataclass(frozen=True)
class LLMRequest:
    prompt: str
    params: LLMParams = LLMParams()


@dataclass(frozen=True)
class LLMResponse:
    """Exactly ``params.n_samples`` completions, truncated per the params."""

    samples: tuple[str, ...]


class LLMBackend(Protocol):
    def complete(self, request: LLMRequest) -> LLMResponse: ...


_WORD_RE = re.compile(r"\S+")


def _truncate(sample: str, params: LLMParams) -> str:
    cut = len(sample)
    for stop in params.stop_sequences:
        if not stop:
            continue
        idx = sample.find(stop)
        if idx != -1:
            cut = min(cut, idx)
    sample = sample[:cut]
    words = list(_WORD_RE.finditer(sample))
    if len(words) > params.max_tokens:
        sample = sample[: words[params.max_tokens - 1].end()]
    return sample


def _finalize(samples: list[str], params: LLMParams) -> LLMResponse:
    if len(samples) != params.n_samples:
        raise BackendError(f"backend produced {len(samples)} samples, wanted {params.n_samples}")
    return LLMResponse(samples=tuple(_truncate(s, params) for s in samples))


# ---------------------------------------------------------------------------
# Echo backend

class EchoBackend:
    """Returns the prompt's final line; sample index appended when n > 1."""

    def complete(self, request: LLMRequest) -> LLMResponse:
        lines = request.prompt.splitlines()
        line = lines[-1] if lines else ""
        n = request.params.n_samples
        if n == 1:
            samples = [line]
        else:
            samples = [f"{line} #{i}" for i in range(1, n + 1)]
        return _finalize(samples, request.params)


# ---------------------------------------------------------------------------
# Scripted backend

@dataclass(frozen=True)
class ExactMatcher:
    prompt: str


@dataclass(frozen=True)
class RegexMatcher:
    pattern: str


@dataclass(frozen=True)
class PrefixMatcher:
    prefix: str


Matcher = Union[ExactMatcher, RegexMatcher, PrefixMatcher]


@dataclass(frozen=True)
class ScriptedRule:
    """Canned responses for prompts matching a pattern.

    Responses cycle by sample index, so a rule with two responses answers
    nSamples=3 with [r0, r1, r0] — stateless across requests.
    """

    matcher: Matcher
    responses: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.responses:
            raise ValueError("a scripted rule needs at least one response")

    def matches(self, prompt: str) -> bool:
        m = self.matcher
        if isinstance(m, ExactMatcher):
            return prompt == m.prompt
        if isinstance(m, RegexMatcher):
            return re.search(m.pattern, prompt) is not None
        return prompt.startswith(m.prefix)

    def to_json(self) -> dict:
        m = self.matcher
        if isinstance(m, ExactMatcher):
            matcher = {"type": "exact", "prompt": m.prompt}
        elif isinstance(m, RegexMatcher):
            matcher = {"type": "regex", "pattern": m.pattern}
        else:
            matcher = {"type": "prefix", "prefix": m.prefix}
        return {"matcher": matcher, "responses": list(self.responses)}

    @staticmethod
    def from_json(obj: dict) -> ScriptedRule:
        m = obj["matcher"]
        mtype = m["type"]
        if mtype == "exact":
            matcher: Matcher = ExactMatcher(m["prompt"])
        elif mtype == "regex":
            matcher = RegexMatcher(m["pattern"])
        elif mtype == "prefix":
            matcher = PrefixMatcher(m["prefix"])
        else:
            raise ValueError(f"unknown matcher type {mtype!r}")
        return ScriptedRule(matcher=matcher, responses=tuple(obj["responses"]))


class ScriptedBackend:
    """Deterministic test double: first matching rule wins, in declaration order."""

    def __init__(self, rules: list[ScriptedRule] | tuple[ScriptedRule, ...]) -> None:
        self.rules = tuple(rules)

    def complete(self, request: LLMRequest) -> LLMResponse:
        for rule in self.rules:
            if rule.matches(request.prompt):
                n = request.params.n_samples
                samples = [rule.responses[i % len(rule.responses)] for i in range(n)]
                return _finalize(samples, request.params)
        raise BackendError(f"no rule matches prompt: {request.prompt[:120]!r}")


# ---------------------------------------------------------------------------
# HTTP backend

class HttpBackend:
    """Client for a completion endpoint.

    Request body: {"prompt", "temperature", "max_tokens", "stop", "n"};
    response body: {"choices": [{"text": ...}, ...]} mapped positionally
    to samples. URL and bearer token fall back to the CHAINWEAVER_LLM_URL
    and CHAINWEAVER_LLM_TOKEN environment variables.
    """

    def __init__(self, url: str | None = None, token: str | None = None, timeout: float = 30.0) -> None:
        self.url = url or os.environ.get(DEFAULT_LLM_URL_ENV, "")
        self.token = token if token is not None else os.environ.get(DEFAULT_LLM_TOKEN_ENV)
        self.timeout = timeout
        if not self.url:
            raise BackendError(f"no completion URL configured (set {DEFAULT_LLM_URL_ENV})")

    def complete(self, request: LLMRequest) -> LLMResponse:
        body = json.dumps(
            {
                "prompt": request.prompt,
                "temperature": request.params.temperature,
                "max_tokens": request.params.max_tokens,
                "stop": list(request.params.stop_sequences),
                "n": request.params.n_samples,
            }
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        req = urllib.request.Request(self.url, data=body, headers=headers, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                payload = json.loads(resp.read().decode("utf-8"))
        except TimeoutError as exc:
            raise BackendTimeoutError(f"completion request timed out after {self.timeout}s") from exc
        except urllib.error.URLError as exc:
            if isinstance(exc.reason, TimeoutError):
                raise BackendTimeoutError(f"completion request timed out after {self.timeout}s") from exc
            raise BackendError(f"completion request failed: {exc}") from exc
        try:
            choices = payload["choices"]
            samples = [c["text"] for c in choices]
        except (KeyError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from exc
        if len(samples) < request.params.n_samples:
            raise BackendError(
                f"completion returned {len(samples)} choices, wanted {request.params.n_samples}"
            )
        return _finalize(samples[: request.params.n_samples], request.params)
