"""Shared test fixtures: deterministic chain generators and record helpers."""

from __future__ import annotations

import hashlib
import random
import re
import string

import pytest

from chainweaver.backends import LLMRequest, LLMResponse
from chainweaver.builtins import (
    BlocklistScorePredicate,
    BuiltinSpec,
    EvaluatorSpec,
    FilterMode,
    LengthBoundsPredicate,
    RankTopKMode,
    RegexMatchPredicate,
)
from chainweaver.executor import RunState, RunStatus, resume, run_chain
from chainweaver.model import (
    Chain,
    Edge,
    HttpMethod,
    Port,
    UserActionMode,
    api_call_node,
    classifier_node,
    data_input_node,
    evaluation_node,
    llm_node,
    processing_node,
    script_node,
    user_action_node,
)
from chainweaver.values import Value


def split_oracle(text: str) -> list[str]:
    """Reference oracle for numbered-list splitting: regex-split on markers,
    drop the preamble, trim, drop empties; no marker means the trimmed text
    itself (or nothing when blank)."""
    if not re.search(r"\d+[).]\s*", text):
        trimmed = text.strip()
        return [trimmed] if trimmed else []
    pieces = re.split(r"\d+[).]\s*", text)
    return [p.strip() for p in pieces[1:] if p.strip()]


def normalized_records(state: RunState) -> dict:
    """Record JSON with the wall-clock field removed, keyed by node id."""
    out = {}
    for node_id, record in state.records.items():
        doc = record.to_json()
        doc.pop("durationMs")
        out[node_id] = doc
    return out


def run_to_completion(chain, inputs, breakpoints, backend) -> RunState:
    """Run with breakpoints, resuming (without edits) until finished."""
    state = run_chain(chain, inputs, breakpoints, backend)
    while state.status is RunStatus.PAUSED_AT_BREAKPOINT:
        state = resume(state, backend)
    return state


class HashClassifierBackend:
    """Deterministic classifier double: label chosen by hashing the prompt.

    With ``miss_rate`` > 0 some prompts classify to a garbage label so
    unmatched handling gets exercised.
    """

    def __init__(self, labels: tuple[str, ...], miss_every: int = 0) -> None:
        self.labels = labels
        self.miss_every = miss_every

    def complete(self, request: LLMRequest) -> LLMResponse:
        digest = int.from_bytes(hashlib.md5(request.prompt.encode()).digest()[:4], "big")
        span = len(self.labels) + (1 if self.miss_every else 0)
        pick = digest % span if self.miss_every else digest % len(self.labels)
        if pick >= len(self.labels):
            sample = f"mystery-{digest % 7}"
        else:
            sample = self.labels[pick]
        return LLMResponse(samples=tuple([sample] * request.params.n_samples))


def random_chain(rng: random.Random, max_nodes: int = 12) -> Chain:
    """A random valid chain of data inputs, transforms, scripts, LLM and
    classifier nodes; every non-source input is edge-connected."""
    n_sources = rng.randint(1, 2)
    n_nodes = rng.randint(n_sources + 1, max_nodes)
    nodes = []
    edges = []

    for i in range(n_sources):
        if rng.random() < 0.3:
            default = Value.of_list([f"1) item-{i}-a 2) item-{i}-b"])
        else:
            default = Value.of_text(f"1) seed-{i}-x 2) seed-{i}-y")
        nodes.append(data_input_node(f"n{i:02d}", default))

    for i in range(n_sources, n_nodes):
        node_id = f"n{i:02d}"
        kind = rng.choice(["append", "trim", "split", "join", "llm", "script", "classifier"])
        if kind == "append":
            node = processing_node(node_id, BuiltinSpec(name="appendText", suffix=f"+{i}"))
        elif kind == "trim":
            node = processing_node(node_id, BuiltinSpec(name="trimWhitespace"))
        elif kind == "split":
            node = processing_node(node_id, BuiltinSpec(name="splitByNumber"))
        elif kind == "join":
            node = processing_node(node_id, BuiltinSpec(name="joinWithSeparator", separator=" / "))
        elif kind == "llm":
            node = llm_node(node_id, f"step {i} over [[x]]")
        elif kind == "script":
            node = script_node(node_id, f'concat("s{i}:", a)')
        else:
            node = classifier_node(
                node_id,
                f"bucket for [[x]] please\nLabel:",
                labels=("alpha", "beta"),
                payload_input="x",
                default_label="alpha" if rng.random() < 0.5 else None,
            )
        nodes.append(node)
        for handle in node.inputs:
            source = nodes[rng.randrange(0, len(nodes) - 1)]
            out = rng.choice(source.outputs)
            edges.append(Edge(source=Port(source.id, out.name), target=Port(node_id, handle.name)))

    return Chain(id=f"fuzz-{rng.randrange(1 << 30)}", name="fuzz", nodes=tuple(nodes), edges=tuple(edges))


def random_full_chain(rng: random.Random, max_nodes: int = 10) -> Chain:
    """Like random_chain but drawing from every node kind, for serialization
    fuzzing. Evaluation, user-action, and API-call nodes are included."""
    chain = random_chain(rng, max_nodes=max_nodes)
    nodes = list(chain.nodes)
    edges = list(chain.edges)
    extras = rng.randint(0, 3)
    for j in range(extras):
        node_id = f"x{j:02d}"
        pick = rng.choice(["eval", "user", "api"])
        if pick == "eval":
            predicate = rng.choice(
                [
                    RegexMatchPredicate(pattern="item"),
                    BlocklistScorePredicate(words=("bad", "awful"), threshold=0.5),
                    LengthBoundsPredicate(min_chars=1, max_chars=80),
                ]
            )
            mode = FilterMode() if rng.random() < 0.5 else RankTopKMode(k=rng.randint(1, 3))
            node = evaluation_node(node_id, EvaluatorSpec(predicate=predicate, mode=mode))
        elif pick == "user":
            node = user_action_node(
                node_id, rng.choice([UserActionMode.SELECT_ONE, UserActionMode.SELECT_MANY])
            )
        else:
            node = api_call_node(
                node_id,
                rng.choice([HttpMethod.GET, HttpMethod.POST]),
                f"http://stub.local/{j}?q=[[q]]",
                extract_path="data/0",
                headers={"X-Tag": f"t{j}"},
                body_template='{"q": "[[q]]"}' if rng.random() < 0.5 else None,
            )
        source = nodes[rng.randrange(0, len(nodes))]
        out = rng.choice(source.outputs)
        for handle in node.inputs:
            edges.append(Edge(source=Port(source.id, out.name), target=Port(node_id, handle.name)))
        nodes.append(node)
    return Chain(id=chain.id, name=chain.name, nodes=tuple(nodes), edges=tuple(edges))


def random_identifier(rng: random.Random) -> str:
    first = rng.choice(string.ascii_lowercase + "_")
    rest = "".join(rng.choice(string.ascii_lowercase + string.digits + "_") for _ in range(rng.randint(0, 6)))
    return first + rest


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20260808)
