"""Chain execution: end-to-end runs, unit runs, breakpoints, and edits.

The scheduler walks the chain in topological order, binding each node's
inputs from upstream records. List values arriving on text inputs fan the
node out per item (index-paired across inputs); classifier nodes
partition their items across label branches; per-node failures never
abort the run — descendants of a failed or empty branch are skipped and
independent branches continue.

A run pauses right after a breakpointed node produces output, and at
every user-action node. While paused, recorded outputs may be edited;
resuming re-executes only what an edit invalidated.
"""

from __future__ import annotations

import json
import string
import time
import urllib.error
import urllib.request
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Sequence

from . import builtins as builtin_ops
from . import scripting
from .backends import BackendError, LLMBackend, LLMParams, LLMRequest
from .model import (
    APICallConfig,
    Chain,
    DataInputConfig,
    EvaluationConfig,
    GenericLLMConfig,
    GenericScriptConfig,
    LLMClassifierConfig,
    Node,
    NodeKind,
    ProcessingConfig,
    UserActionMode,
    descendants,
    topo_order,
    validate_chain,
)
from .template import render
from .values import Value, ValueKind


class InputError(Exception):
    """Chain inputs do not cover the chain's unbound input handles."""


class InvalidChainError(Exception):
    """A chain with outstanding diagnostics was handed to the executor."""

    def __init__(self, diagnostics) -> None:
        lines = "; ".join(d.message for d in diagnostics)
        super().__init__(f"chain does not validate: {lines}")
        self.diagnostics = list(diagnostics)


class StateError(Exception):
    """An operation was applied to a run in the wrong status."""


class KindError(Exception):
    """A value of the wrong kind was supplied for a handle."""


class _NodeFailure(Exception):
    """Internal: a per-node failure recorded as an error status."""


class RunStatus(str, Enum):
    RUNNING = "running"
    PAUSED_AT_BREAKPOINT = "pausedAtBreakpoint"
    AWAITING_USER_ACTION = "awaitingUserAction"
    DONE = "done"
    FAILED = "failed"


class NodeStatus(str, Enum):
    PENDING = "pending"
    RUNNING = "running"
    SUCCESS = "success"
    ERROR = "error"
    SKIPPED = "skipped"

    @property
    def terminal(self) -> bool:
        return self in (NodeStatus.SUCCESS, NodeStatus.ERROR, NodeStatus.SKIPPED)


@dataclass(frozen=True)
class LineageEntry:
    """Which upstream item a fanned-out output item came from."""

    item_index: int
    source_node: str
    source_item: int

    def to_json(self) -> dict:
        return {
            "itemIndex": self.item_index,
            "sourceNodeId": self.source_node,
            "sourceItemIndex": self.source_item,
        }


@dataclass
class NodeRunRecord:
    node_id: str
    status: NodeStatus
    inputs: dict[str, Value] = field(default_factory=dict)
    output: dict[str, Value] = field(default_factory=dict)
    item_lineage: tuple[LineageEntry, ...] = ()
    edited: bool = False
    error_message: str | None = None
    duration_ms: float = 0.0

    def to_json(self) -> dict:
        return {
            "nodeId": self.node_id,
            "status": self.status.value,
            "inputs": {k: v.to_json() for k, v in sorted(self.inputs.items())},
            "output": {k: v.to_json() for k, v in sorted(self.output.items())},
            "itemLineage": [entry.to_json() for entry in self.item_lineage],
            "edited": self.edited,
            "errorMessage": self.error_message,
            "durationMs": self.duration_ms,
        }


@dataclass
class PendingInteraction:
    node_id: str
    mode: UserActionMode
    candidates: Value

    def to_json(self) -> dict:
        return {
            "nodeId": self.node_id,
            "mode": self.mode.value,
            "candidates": self.candidates.to_json(),
        }


@dataclass
class RunState:
    """The full trace of one run; owned and mutated by the scheduler."""

    run_id: str
    chain: Chain
    status: RunStatus
    chain_inputs: dict[str, Value]
    breakpoints: frozenset[str]
    records: dict[str, NodeRunRecord] = field(default_factory=dict)
    pending_interaction: PendingInteraction | None = None
    paused_node_id: str | None = None

    def to_json(self) -> dict:
        return {
            "runId": self.run_id,
            "chainId": self.chain.id,
            "status": self.status.value,
            "breakpoints": sorted(self.breakpoints),
            "records": {k: r.to_json() for k, r in sorted(self.records.items())},
            "pendingInteraction": (
                self.pending_interaction.to_json() if self.pending_interaction else None
            ),
            "pausedNodeId": self.paused_node_id,
            "finalOutputs": final_outputs_json(self),
        }


@dataclass(frozen=True)
class RunEvent:
    """One step of the run event stream (see the service layer)."""

    kind: str  # runStarted | nodeStarted | nodeFinished | pausedAtBreakpoint | awaitingUserAction | runFinished
    node_id: str | None = None
    record: NodeRunRecord | None = None
    status: RunStatus | None = None
    mode: UserActionMode | None = None
    candidates: Value | None = None

    def to_json(self) -> dict:
        payload: dict[str, Any] = {"type": self.kind}
        if self.node_id is not None:
            payload["nodeId"] = self.node_id
        if self.record is not None:
            payload["record"] = self.record.to_json()
        if self.status is not None:
            payload["status"] = self.status.value
        if self.mode is not None:
            payload["mode"] = self.mode.value
        if self.candidates is not None:
            payload["candidates"] = self.candidates.to_json()
        return payload


EventSink = Callable[[RunEvent], None]

# (method, url, headers, body or None) -> (status code, response text)
HttpTransport = Callable[[str, str, dict[str, str], str | None], tuple[int, str]]


def urllib_transport(method: str, url: str, headers: dict[str, str], body: str | None) -> tuple[int, str]:
    """Default API-call transport over urllib; fixtures replace it in tests."""
    req = urllib.request.Request(
        url, data=body.encode("utf-8") if body is not None else None, headers=headers, method=method
    )
    try:
        with urllib.request.urlopen(req, timeout=30.0) as resp:
            return resp.status, resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read().decode("utf-8", errors="replace")


def _emit(on_event: EventSink | None, event: RunEvent) -> None:
    if on_event is not None:
        on_event(event)


# ---------------------------------------------------------------------------
# Chain input resolution

def _lookup_chain_input(chain_inputs: dict[str, Value], node_id: str, handle: str) -> Value | None:
    v = chain_inputs.get(f"{node_id}.{handle}")
    if v is None:
        v = chain_inputs.get(handle)
    return v


def _coerce(value: Value, kind: ValueKind) -> Value | None:
    """Coerce a value to a declared handle kind; None when illegal."""
    if value.kind is kind:
        return value
    if value.kind is ValueKind.TEXT and kind is ValueKind.TEXT_LIST:
        return Value.of_list([value.text])
    return None


# ---------------------------------------------------------------------------
# Public operations

def run_chain(
    chain: Chain,
    chain_inputs: dict[str, Value] | None = None,
    breakpoints: Sequence[str] | frozenset[str] = (),
    backend: LLMBackend | None = None,
    *,
    on_event: EventSink | None = None,
    http_transport: HttpTransport | None = None,
    run_id: str | None = None,
) -> RunState:
    """Execute a chain until it finishes or pauses.

    ``chain_inputs`` binds unbound input handles (keys ``node.handle`` or
    bare handle name) and overrides data-input defaults (key = node id).

    Raises:
        InvalidChainError: the chain has validation diagnostics.
        InputError: an unbound input handle has no chain input, or a
            breakpoint names a missing node.
    """
    diagnostics = validate_chain(chain)
    if diagnostics:
        raise InvalidChainError(diagnostics)
    inputs = dict(chain_inputs or {})
    missing = [
        f"{p.node}.{p.handle}"
        for p in chain.unbound_input_ports()
        if _lookup_chain_input(inputs, p.node, p.handle) is None
    ]
    if missing:
        raise InputError(f"chain inputs missing for: {', '.join(sorted(missing))}")
    unknown = [b for b in breakpoints if chain.get_node(b) is None]
    if unknown:
        raise InputError(f"breakpoints reference missing nodes: {', '.join(sorted(unknown))}")
    state = RunState(
        run_id=run_id or uuid.uuid4().hex,
        chain=chain,
        status=RunStatus.RUNNING,
        chain_inputs=inputs,
        breakpoints=frozenset(breakpoints),
    )
    _emit(on_event, RunEvent(kind="runStarted"))
    return _advance(state, backend, on_event, http_transport)


def resume(
    state: RunState,
    backend: LLMBackend | None = None,
    *,
    on_event: EventSink | None = None,
    http_transport: HttpTransport | None = None,
) -> RunState:
    """Continue a paused run from its frontier; completed nodes never rerun.

    Raises:
        StateError: the run already finished, is not paused, or still has
            an unanswered user action.
    """
    if state.status in (RunStatus.DONE, RunStatus.FAILED):
        raise StateError(f"run {state.run_id} already finished ({state.status.value})")
    if state.status is RunStatus.RUNNING:
        raise StateError("run is not paused")
    if state.pending_interaction is not None:
        raise StateError(
            f"user action at node {state.pending_interaction.node_id!r} must be answered before resuming"
        )
    state.status = RunStatus.RUNNING
    state.paused_node_id = None
    return _advance(state, backend, on_event, http_transport)


def edit_node_output(
    state: RunState,
    node_id: str,
    handle: str,
    value: Value,
    *,
    on_event: EventSink | None = None,
) -> RunState:
    """Replace a completed node's recorded output while the run is paused.

    Descendant records are invalidated back to pending so the next resume
    re-executes them against the edited value.

    Raises:
        StateError: run not paused, or the node has not completed.
        KindError: the value's kind does not fit the handle.
        KeyError: no such node or output handle.
    """
    if state.status not in (RunStatus.PAUSED_AT_BREAKPOINT, RunStatus.AWAITING_USER_ACTION):
        raise StateError("outputs can only be edited while the run is paused")
    node = state.chain.node(node_id)
    declared = node.find_output(handle)
    if declared is None:
        raise KeyError(f"node {node_id!r} has no output handle {handle!r}")
    record = state.records.get(node_id)
    if record is None or record.status not in (NodeStatus.SUCCESS, NodeStatus.ERROR):
        raise StateError(f"node {node_id!r} has not completed; nothing to edit")
    # Fan-out lifts a Text handle to a TextList at run time, so check the
    # effective kind: what the handle actually carries, else its declaration.
    current = record.output.get(handle)
    effective = current.kind if current is not None else declared.kind
    if value.kind is not effective:
        raise KindError(
            f"handle {node_id}.{handle} carries {effective.value}, cannot edit with {value.kind.value}"
        )
    record.output[handle] = value
    record.edited = True
    record.status = NodeStatus.SUCCESS
    invalidated = descendants(state.chain, node_id)
    for d in invalidated:
        state.records.pop(d, None)
    if state.pending_interaction is not None and state.pending_interaction.node_id in invalidated:
        state.pending_interaction = None
    _emit(on_event, RunEvent(kind="nodeFinished", node_id=node_id, record=record))
    return state


def answer_user_action(
    state: RunState,
    node_id: str,
    answer: Value | int | Sequence[int] | str,
    *,
    on_event: EventSink | None = None,
) -> RunState:
    """Answer the pending user action so the run can be resumed.

    selectOne takes an index, selectMany a list of indices (output keeps
    input order), editText the replacement text.

    Raises:
        StateError: no pending interaction at that node.
        IndexError: a selection index is out of range.
        KindError: editText answered with a list value.
    """
    pending = state.pending_interaction
    if state.status is not RunStatus.AWAITING_USER_ACTION or pending is None or pending.node_id != node_id:
        raise StateError(f"no pending user action at node {node_id!r}")
    node = state.chain.node(node_id)
    record = state.records[node_id]
    out_name = node.outputs[0].name
    mode = pending.mode
    items = pending.candidates.as_items()

    if mode is UserActionMode.SELECT_ONE:
        index = _single_index(answer)
        if not 0 <= index < len(items):
            raise IndexError(f"selection index {index} out of range for {len(items)} candidates")
        out = Value.of_text(items[index])
    elif mode is UserActionMode.SELECT_MANY:
        indices = _many_indices(answer)
        for i in indices:
            if not 0 <= i < len(items):
                raise IndexError(f"selection index {i} out of range for {len(items)} candidates")
        chosen = sorted(set(indices))
        out = Value.of_list([items[i] for i in chosen])
    else:  # EDIT_TEXT
        if isinstance(answer, Value):
            if answer.kind is not ValueKind.TEXT:
                raise KindError("editText answers must be Text")
            out = answer
        elif isinstance(answer, str):
            out = Value.of_text(answer)
        else:
            raise KindError("editText answers must be text")

    record.output = {out_name: out}
    record.status = NodeStatus.SUCCESS
    state.pending_interaction = None
    _emit(on_event, RunEvent(kind="nodeFinished", node_id=node_id, record=record))
    return state


def _single_index(answer: Any) -> int:
    if isinstance(answer, bool):
        raise KindError("selectOne takes an integer index")
    if isinstance(answer, int):
        return answer
    if isinstance(answer, Sequence) and not isinstance(answer, (str, bytes)) and len(answer) == 1:
        return _single_index(answer[0])
    raise KindError("selectOne takes an integer index")


def _many_indices(answer: Any) -> list[int]:
    if isinstance(answer, bool):
        raise KindError("selectMany takes a list of integer indices")
    if isinstance(answer, int):
        return [answer]
    if isinstance(answer, Sequence) and not isinstance(answer, (str, bytes)):
        out = []
        for a in answer:
            if isinstance(a, bool) or not isinstance(a, int):
                raise KindError("selectMany takes a list of integer indices")
            out.append(a)
        return out
    raise KindError("selectMany takes a list of integer indices")


def run_node_unit(
    node: Node,
    bindings: dict[str, Value] | None = None,
    backend: LLMBackend | None = None,
    *,
    http_transport: HttpTransport | None = None,
) -> NodeRunRecord:
    """Run one node with manual bindings, outside any chain.

    Fan-out applies exactly as in a chain run (a TextList bound to a Text
    input runs the node per item). Per-node failures land in the record.

    Raises:
        InputError: bindings do not cover the node's inputs.
    """
    bindings = dict(bindings or {})
    missing = sorted(h.name for h in node.inputs if h.name not in bindings)
    if missing:
        raise InputError(f"bindings missing for: {', '.join(missing)}")
    if node.kind is NodeKind.USER_ACTION:
        return NodeRunRecord(
            node_id=node.id,
            status=NodeStatus.ERROR,
            inputs=bindings,
            error_message="user-action nodes need an interactive answer; unit runs cannot provide one",
        )
    return _execute_node(node, bindings, backend, http_transport, fan_source=node.id)


def final_outputs_json(state: RunState) -> dict:
    """Outputs of the chain's terminal nodes, JSON-shaped, for CLI/service parity."""
    has_downstream = {e.source.node for e in state.chain.edges}
    outputs: dict[str, dict] = {}
    for n in state.chain.nodes:
        if n.id in has_downstream:
            continue
        record = state.records.get(n.id)
        if record is None or record.status is not NodeStatus.SUCCESS:
            continue
        outputs[n.id] = {h: v.to_json() for h, v in sorted(record.output.items())}
    return outputs


# ---------------------------------------------------------------------------
# Scheduler internals

def _advance(
    state: RunState,
    backend: LLMBackend | None,
    on_event: EventSink | None,
    http_transport: HttpTransport | None,
) -> RunState:
    order = topo_order(state.chain)
    for node_id in order:
        existing = state.records.get(node_id)
        if existing is not None and existing.status.terminal:
            continue
        node = state.chain.node(node_id)
        bindings = _gather_bindings(state, node)
        if bindings is None:
            record = NodeRunRecord(node_id=node_id, status=NodeStatus.SKIPPED)
            state.records[node_id] = record
            _emit(on_event, RunEvent(kind="nodeFinished", node_id=node_id, record=record))
            continue

        if node.kind is NodeKind.USER_ACTION:
            _emit(on_event, RunEvent(kind="nodeStarted", node_id=node_id))
            mode = node.config.mode  # type: ignore[union-attr]
            coerced = _coerce(bindings[node.inputs[0].name], node.inputs[0].kind)
            if coerced is None:
                record = NodeRunRecord(
                    node_id=node_id,
                    status=NodeStatus.ERROR,
                    inputs=dict(bindings),
                    error_message=f"{mode.value} cannot accept a {bindings[node.inputs[0].name].kind.value} input",
                )
                state.records[node_id] = record
                _emit(on_event, RunEvent(kind="nodeFinished", node_id=node_id, record=record))
                continue
            record = NodeRunRecord(node_id=node_id, status=NodeStatus.PENDING, inputs=dict(bindings))
            state.records[node_id] = record
            state.status = RunStatus.AWAITING_USER_ACTION
            state.paused_node_id = node_id
            state.pending_interaction = PendingInteraction(node_id=node_id, mode=mode, candidates=coerced)
            _emit(
                on_event,
                RunEvent(kind="awaitingUserAction", node_id=node_id, mode=mode, candidates=coerced),
            )
            return state

        _emit(on_event, RunEvent(kind="nodeStarted", node_id=node_id))
        if node.kind is NodeKind.DATA_INPUT:
            record = _run_data_input(state, node)
        else:
            record = _execute_node(node, bindings, backend, http_transport, fan_source=_fan_source(state, node))
        state.records[node_id] = record
        _emit(on_event, RunEvent(kind="nodeFinished", node_id=node_id, record=record))

        if node_id in state.breakpoints and record.status in (NodeStatus.SUCCESS, NodeStatus.ERROR):
            state.status = RunStatus.PAUSED_AT_BREAKPOINT
            state.paused_node_id = node_id
            _emit(on_event, RunEvent(kind="pausedAtBreakpoint", node_id=node_id))
            return state

    failed = any(r.status is NodeStatus.ERROR for r in state.records.values())
    state.status = RunStatus.FAILED if failed else RunStatus.DONE
    state.paused_node_id = None
    _emit(on_event, RunEvent(kind="runFinished", status=state.status))
    return state


def _run_data_input(state: RunState, node: Node) -> NodeRunRecord:
    """Emit the data-input's default, or the chain input keyed by node id."""
    cfg = node.config
    assert isinstance(cfg, DataInputConfig)
    out = node.outputs[0]
    override = state.chain_inputs.get(node.id)
    if override is None:
        value = cfg.default_value
    else:
        coerced = _coerce(override, out.kind)
        if coerced is None:
            return NodeRunRecord(
                node_id=node.id,
                status=NodeStatus.ERROR,
                error_message=(
                    f"chain input for {node.id!r} is {override.kind.value}, "
                    f"but the data input emits {out.kind.value}"
                ),
            )
        value = coerced
    return NodeRunRecord(node_id=node.id, status=NodeStatus.SUCCESS, output={out.name: value})


def _gather_bindings(state: RunState, node: Node) -> dict[str, Value] | None:
    """Bind a node's inputs from upstream records; None means skip it."""
    bindings: dict[str, Value] = {}
    for h in node.inputs:
        edge = state.chain.edge_into(node.id, h.name)
        if edge is None:
            v = _lookup_chain_input(state.chain_inputs, node.id, h.name)
            if v is None:
                return None
        else:
            source = state.records.get(edge.source.node)
            if source is None or source.status is not NodeStatus.SUCCESS:
                return None
            v = source.output.get(edge.source.handle)
            if v is None:
                # the upstream branch routed nothing here
                return None
        bindings[h.name] = v
    return bindings


def _fan_source(state: RunState, node: Node) -> str:
    """Node id lineage entries point at: first list-feeding upstream node."""
    for h in node.inputs:
        if h.kind is not ValueKind.TEXT:
            continue
        edge = state.chain.edge_into(node.id, h.name)
        if edge is not None:
            source = state.records.get(edge.source.node)
            if source is not None:
                v = source.output.get(edge.source.handle)
                if v is not None and v.kind is ValueKind.TEXT_LIST:
                    return edge.source.node
    return node.id


def _execute_node(
    node: Node,
    bindings: dict[str, Value],
    backend: LLMBackend | None,
    http_transport: HttpTransport | None,
    *,
    fan_source: str,
) -> NodeRunRecord:
    start = time.perf_counter()
    snapshot = dict(bindings)
    try:
        output, lineage, warning = _run_with_fanout(node, bindings, backend, http_transport, fan_source)
        status, message = NodeStatus.SUCCESS, warning
    except _NodeFailure as exc:
        output, lineage = {}, ()
        status, message = NodeStatus.ERROR, str(exc)
    duration = (time.perf_counter() - start) * 1000.0
    return NodeRunRecord(
        node_id=node.id,
        status=status,
        inputs=snapshot,
        output=output,
        item_lineage=lineage,
        error_message=message,
        duration_ms=duration,
    )


def _run_with_fanout(
    node: Node,
    bindings: dict[str, Value],
    backend: LLMBackend | None,
    http_transport: HttpTransport | None,
    fan_source: str,
) -> tuple[dict[str, Value], tuple[LineageEntry, ...], str | None]:
    fanned: dict[str, tuple[str, ...]] = {}
    fixed: dict[str, Value] = {}
    for h in node.inputs:
        v = bindings[h.name]
        if h.kind is ValueKind.TEXT and v.kind is ValueKind.TEXT_LIST:
            fanned[h.name] = v.items
        else:
            coerced = _coerce(v, h.kind)
            if coerced is None:
                raise _NodeFailure(
                    f"input {h.name!r} declares {h.kind.value} but received {v.kind.value}"
                )
            fixed[h.name] = coerced

    if node.kind is NodeKind.LLM_CLASSIFIER:
        return _run_classifier(node, fanned, fixed, backend, fan_source)

    if not fanned:
        output = _run_single(node, fixed, backend, http_transport)
        return output, (), None

    lengths = {name: len(items) for name, items in fanned.items()}
    if len(set(lengths.values())) > 1:
        pretty = ", ".join(f"{k}={v}" for k, v in sorted(lengths.items()))
        raise _NodeFailure(f"fan-out inputs must have matching lengths, got {pretty}")
    count = next(iter(lengths.values()))

    out_name = node.outputs[0].name
    collected: list[str] = []
    lineage: list[LineageEntry] = []
    for i in range(count):
        per_item = dict(fixed)
        for name, items in fanned.items():
            per_item[name] = Value.of_text(items[i])
        output = _run_single(node, per_item, backend, http_transport)
        value = output[out_name]
        for text in value.as_items():
            lineage.append(LineageEntry(item_index=len(collected), source_node=fan_source, source_item=i))
            collected.append(text)
    return {out_name: Value.of_list(collected)}, tuple(lineage), None


_LABEL_STRIP = "".join(c for c in string.punctuation if c != "_") + string.whitespace


def normalize_label(raw: str) -> str:
    """Trim, lowercase, and strip trailing punctuation off a model's label."""
    return raw.strip().lower().rstrip(_LABEL_STRIP)


def _classify_one(
    node: Node, text_bindings: dict[str, Value], backend: LLMBackend | None
) -> tuple[str | None, str]:
    """Returns (matched label or None, raw sample)."""
    cfg = node.config
    assert isinstance(cfg, LLMClassifierConfig)
    prompt = render(cfg.template, {k: _render_text(v) for k, v in text_bindings.items()})
    raw = _complete(backend, prompt, LLMParams()).samples[0]
    normalized = normalize_label(raw)
    for label in cfg.labels:
        if normalized == normalize_label(label):
            return label, raw
    if cfg.default_label is not None:
        return cfg.default_label, raw
    return None, raw


def _run_classifier(
    node: Node,
    fanned: dict[str, tuple[str, ...]],
    fixed: dict[str, Value],
    backend: LLMBackend | None,
    fan_source: str,
) -> tuple[dict[str, Value], tuple[LineageEntry, ...], str | None]:
    cfg = node.config
    assert isinstance(cfg, LLMClassifierConfig)

    if not fanned:
        label, raw = _classify_one(node, fixed, backend)
        payload = fixed[cfg.payload_input]
        if label is None:
            return {}, (), f"unmatched: {raw}"
        return {label: payload}, (), None

    lengths = {len(items) for items in fanned.values()}
    if len(lengths) > 1:
        raise _NodeFailure("fan-out inputs must have matching lengths")
    count = lengths.pop()

    branch_items: dict[str, list[str]] = {label: [] for label in cfg.labels}
    lineage: list[LineageEntry] = []
    unmatched: list[str] = []
    for i in range(count):
        per_item = dict(fixed)
        for name, items in fanned.items():
            per_item[name] = Value.of_text(items[i])
        label, raw = _classify_one(node, per_item, backend)
        payload = per_item[cfg.payload_input]
        if label is None:
            unmatched.append(raw)
            continue
        branch = branch_items[label]
        lineage.append(LineageEntry(item_index=len(branch), source_node=fan_source, source_item=i))
        branch.append(_render_text(payload))

    output = {
        label: Value.of_list(items) for label, items in branch_items.items() if items
    }
    warning = "; ".join(f"unmatched: {raw}" for raw in unmatched) or None
    return output, tuple(lineage), warning


def _render_text(v: Value) -> str:
    # Placeholders normally carry Text; a list-valued binding renders as lines.
    return v.text if v.kind is ValueKind.TEXT else "\n".join(v.items)


def _complete(backend: LLMBackend | None, prompt: str, params: LLMParams):
    if backend is None:
        raise _NodeFailure("no completion backend configured for this run")
    try:
        return backend.complete(LLMRequest(prompt=prompt, params=params))
    except BackendError as exc:
        raise _NodeFailure(f"backend error: {exc}") from exc


def _run_single(
    node: Node,
    bindings: dict[str, Value],
    backend: LLMBackend | None,
    http_transport: HttpTransport | None,
) -> dict[str, Value]:
    """Execute one node once; every binding already fits its declared kind."""
    cfg = node.config

    if isinstance(cfg, DataInputConfig):
        return {node.outputs[0].name: cfg.default_value}

    if isinstance(cfg, GenericLLMConfig):
        prompt = render(cfg.template, {k: _render_text(v) for k, v in bindings.items()})
        response = _complete(backend, prompt, cfg.params)
        if cfg.params.n_samples == 1:
            value = Value.of_text(response.samples[0])
        else:
            value = Value.of_list(response.samples)
        return {node.outputs[0].name: value}

    if isinstance(cfg, EvaluationConfig):
        items = bindings[node.inputs[0].name].items
        evaluator = cfg.evaluator
        if isinstance(evaluator.mode, builtin_ops.FilterMode):
            passed, rejected = builtin_ops.evaluate_filter(list(items), evaluator)
            return {"passed": Value.of_list(passed), "rejected": Value.of_list(rejected)}
        ranked = builtin_ops.evaluate_rank(list(items), evaluator)
        return {node.outputs[0].name: Value.of_list(ranked)}

    if isinstance(cfg, ProcessingConfig):
        value = bindings[node.inputs[0].name]
        try:
            result = builtin_ops.apply_builtin(cfg.builtin, value)
        except ValueError as exc:
            raise _NodeFailure(str(exc)) from exc
        return {node.outputs[0].name: result}

    if isinstance(cfg, GenericScriptConfig):
        try:
            program = scripting.parse_script(cfg.source)
            result = scripting.eval_script(program, bindings)
        except scripting.ScriptError as exc:
            raise _NodeFailure(f"script error: {exc}") from exc
        declared = node.outputs[0]
        coerced = _coerce(result, declared.kind)
        if coerced is None:
            raise _NodeFailure(
                f"script produced {result.kind.value} but output declares {declared.kind.value}"
            )
        return {declared.name: coerced}

    if isinstance(cfg, APICallConfig):
        return {node.outputs[0].name: _run_api_call(cfg, bindings, http_transport)}

    raise _NodeFailure(f"node kind {node.kind.value} cannot run here")


def _run_api_call(
    cfg: APICallConfig, bindings: dict[str, Value], http_transport: HttpTransport | None
) -> Value:
    text_bindings = {k: _render_text(v) for k, v in bindings.items()}
    url = render(cfg.url_template, text_bindings)
    body = render(cfg.body_template, text_bindings) if cfg.body_template is not None else None
    transport = http_transport or urllib_transport
    try:
        status, text = transport(cfg.method.value, url, dict(cfg.headers), body)
    except Exception as exc:  # transport failures are node-local errors
        raise _NodeFailure(f"API call failed: {exc}") from exc
    if not 200 <= status < 300:
        raise _NodeFailure(f"API call returned status {status}")
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _NodeFailure(f"API response is not JSON: {exc}") from exc
    return _extract_path(payload, cfg.extract_path)


def _extract_path(payload: Any, path: str) -> Value:
    current = payload
    for segment in (s for s in path.split("/") if s):
        if isinstance(current, dict):
            if segment not in current:
                raise _NodeFailure(f"extract path segment {segment!r} missing from response")
            current = current[segment]
        elif isinstance(current, list):
            try:
                current = current[int(segment)]
            except (ValueError, IndexError):
                raise _NodeFailure(f"extract path segment {segment!r} invalid for a list") from None
        else:
            raise _NodeFailure(f"extract path segment {segment!r} cannot index a scalar")
    if isinstance(current, str):
        return Value.of_text(current)
    if isinstance(current, list):
        return Value.of_list([i if isinstance(i, str) else json.dumps(i) for i in current])
    return Value.of_text(json.dumps(current))
