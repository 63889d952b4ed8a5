"""The chain graph data model: node kinds, handles, edges, validation.

A chain is an immutable directed acyclic graph of typed nodes. Every
mutating operation returns a new chain, so values can be shared freely
across concurrent executors.

Structural problems are never raised from validation — they come back as
a deterministic list of :class:`Diagnostic` values so callers (editor,
service, CLI) can render them.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Union

from . import builtins as builtin_ops
from . import scripting
from .backends import LLMParams
from .builtins import BuiltinSpec, EvaluatorSpec, FilterMode
from .template import PromptTemplate, parse_placeholders
from .values import Value, ValueKind

HANDLE_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class CycleError(Exception):
    """Raised by topo_order when the chain graph contains a cycle."""


class HandleDirection(str, Enum):
    INPUT = "input"
    OUTPUT = "output"


@dataclass(frozen=True)
class Handle:
    """A named, typed port on a node."""

    name: str
    kind: ValueKind
    direction: HandleDirection


def in_handle(name: str, kind: ValueKind = ValueKind.TEXT) -> Handle:
    return Handle(name=name, kind=kind, direction=HandleDirection.INPUT)


def out_handle(name: str, kind: ValueKind = ValueKind.TEXT) -> Handle:
    return Handle(name=name, kind=kind, direction=HandleDirection.OUTPUT)


class NodeKind(str, Enum):
    DATA_INPUT = "DataInput"
    GENERIC_LLM = "GenericLLM"
    LLM_CLASSIFIER = "LLMClassifier"
    EVALUATION = "Evaluation"
    PROCESSING = "Processing"
    GENERIC_SCRIPT = "GenericScript"
    USER_ACTION = "UserAction"
    API_CALL = "APICall"


class UserActionMode(str, Enum):
    SELECT_ONE = "selectOne"
    SELECT_MANY = "selectMany"
    EDIT_TEXT = "editText"


class HttpMethod(str, Enum):
    GET = "GET"
    POST = "POST"


# ---------------------------------------------------------------------------
# Node configs, one variant per kind

@dataclass(frozen=True)
class DataInputConfig:
    default_value: Value


@dataclass(frozen=True)
class GenericLLMConfig:
    template: PromptTemplate
    params: LLMParams = LLMParams()


@dataclass(frozen=True)
class LLMClassifierConfig:
    template: PromptTemplate
    labels: tuple[str, ...]
    payload_input: str
    default_label: str | None = None


@dataclass(frozen=True)
class EvaluationConfig:
    evaluator: EvaluatorSpec


@dataclass(frozen=True)
class ProcessingConfig:
    builtin: BuiltinSpec


@dataclass(frozen=True)
class GenericScriptConfig:
    source: str


@dataclass(frozen=True)
class UserActionConfig:
    mode: UserActionMode


@dataclass(frozen=True)
class APICallConfig:
    method: HttpMethod
    url_template: PromptTemplate
    extract_path: str
    headers: tuple[tuple[str, str], ...] = ()
    body_template: PromptTemplate | None = None


NodeConfig = Union[
    DataInputConfig,
    GenericLLMConfig,
    LLMClassifierConfig,
    EvaluationConfig,
    ProcessingConfig,
    GenericScriptConfig,
    UserActionConfig,
    APICallConfig,
]


@dataclass(frozen=True)
class Node:
    """One chain step: a kind, kind-specific config, and named ports."""

    id: str
    kind: NodeKind
    label: str
    config: NodeConfig
    inputs: tuple[Handle, ...] = ()
    outputs: tuple[Handle, ...] = ()
    position: tuple[float, float] = (0.0, 0.0)

    def input_names(self) -> tuple[str, ...]:
        return tuple(h.name for h in self.inputs)

    def output_names(self) -> tuple[str, ...]:
        return tuple(h.name for h in self.outputs)

    def find_input(self, name: str) -> Handle | None:
        return next((h for h in self.inputs if h.name == name), None)

    def find_output(self, name: str) -> Handle | None:
        return next((h for h in self.outputs if h.name == name), None)


@dataclass(frozen=True)
class Port:
    node: str
    handle: str


@dataclass(frozen=True)
class Edge:
    """A connection from one node's output handle to another's input handle."""

    source: Port
    target: Port


@dataclass(frozen=True)
class Chain:
    id: str
    name: str
    description: str = ""
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    format_version: int = 1

    def node(self, node_id: str) -> Node:
        n = self.get_node(node_id)
        if n is None:
            raise KeyError(f"no node with id {node_id!r}")
        return n

    def get_node(self, node_id: str) -> Node | None:
        return next((n for n in self.nodes if n.id == node_id), None)

    def edge_into(self, node_id: str, handle: str) -> Edge | None:
        return next(
            (e for e in self.edges if e.target.node == node_id and e.target.handle == handle),
            None,
        )

    def edges_from(self, node_id: str) -> list[Edge]:
        return [e for e in self.edges if e.source.node == node_id]

    def unbound_input_ports(self) -> list[Port]:
        """Input handles with no incoming edge: the chain's external inputs."""
        connected = {(e.target.node, e.target.handle) for e in self.edges}
        return [
            Port(n.id, h.name)
            for n in self.nodes
            for h in n.inputs
            if (n.id, h.name) not in connected
        ]

    def with_node(self, node: Node) -> Chain:
        """Replace the node with the same id."""
        nodes = tuple(node if n.id == node.id else n for n in self.nodes)
        return replace(self, nodes=nodes)


# ---------------------------------------------------------------------------
# Diagnostics

CYCLE = "CYCLE"
DUPLICATE_NODE_ID = "DUPLICATE_NODE_ID"
DANGLING_EDGE = "DANGLING_EDGE"
FAN_IN = "FAN_IN"
BAD_HANDLE_NAME = "BAD_HANDLE_NAME"
DUPLICATE_HANDLE = "DUPLICATE_HANDLE"
HANDLE_DESYNC = "HANDLE_DESYNC"
KIND_MISMATCH = "KIND_MISMATCH"
EMPTY_LABELS = "EMPTY_LABELS"
DUPLICATE_LABELS = "DUPLICATE_LABELS"
BAD_PAYLOAD_INPUT = "BAD_PAYLOAD_INPUT"
BAD_SHAPE = "BAD_SHAPE"
BAD_CONFIG = "BAD_CONFIG"


@dataclass(frozen=True)
class Diagnostic:
    """One structural problem; ``node_id`` is None for chain-scope issues."""

    code: str
    message: str
    node_id: str | None = None

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "nodeId": self.node_id}


def _diag(code: str, message: str, node_id: str | None = None) -> Diagnostic:
    return Diagnostic(code=code, message=message, node_id=node_id)


# ---------------------------------------------------------------------------
# Node factories (handles derived from config so nodes start in sync)

def data_input_node(
    node_id: str,
    default: Value,
    *,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    return Node(
        id=node_id,
        kind=NodeKind.DATA_INPUT,
        label=label or node_id,
        config=DataInputConfig(default_value=default),
        outputs=(out_handle("output", default.kind),),
        position=position,
    )


def llm_node(
    node_id: str,
    prompt: str,
    *,
    params: LLMParams = LLMParams(),
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    template = parse_placeholders(prompt)
    out_kind = ValueKind.TEXT if params.n_samples == 1 else ValueKind.TEXT_LIST
    return Node(
        id=node_id,
        kind=NodeKind.GENERIC_LLM,
        label=label or node_id,
        config=GenericLLMConfig(template=template, params=params),
        inputs=tuple(in_handle(n) for n in template.placeholder_names()),
        outputs=(out_handle("output", out_kind),),
        position=position,
    )


def classifier_node(
    node_id: str,
    prompt: str,
    labels: Iterable[str],
    payload_input: str,
    *,
    default_label: str | None = None,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    template = parse_placeholders(prompt)
    labels_t = tuple(labels)
    return Node(
        id=node_id,
        kind=NodeKind.LLM_CLASSIFIER,
        label=label or node_id,
        config=LLMClassifierConfig(
            template=template,
            labels=labels_t,
            payload_input=payload_input,
            default_label=default_label,
        ),
        inputs=tuple(in_handle(n) for n in template.placeholder_names()),
        outputs=tuple(out_handle(lbl, ValueKind.TEXT) for lbl in labels_t),
        position=position,
    )


def processing_node(
    node_id: str,
    builtin: BuiltinSpec,
    *,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    in_kind, out_kind = builtin_ops.BUILTIN_SIGNATURES[builtin.name]
    return Node(
        id=node_id,
        kind=NodeKind.PROCESSING,
        label=label or node_id,
        config=ProcessingConfig(builtin=builtin),
        inputs=(in_handle("input", in_kind),),
        outputs=(out_handle("output", out_kind),),
        position=position,
    )


def evaluation_node(
    node_id: str,
    evaluator: EvaluatorSpec,
    *,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    if isinstance(evaluator.mode, FilterMode):
        outputs = (
            out_handle("passed", ValueKind.TEXT_LIST),
            out_handle("rejected", ValueKind.TEXT_LIST),
        )
    else:
        outputs = (out_handle("output", ValueKind.TEXT_LIST),)
    return Node(
        id=node_id,
        kind=NodeKind.EVALUATION,
        label=label or node_id,
        config=EvaluationConfig(evaluator=evaluator),
        inputs=(in_handle("items", ValueKind.TEXT_LIST),),
        outputs=outputs,
        position=position,
    )


def script_node(
    node_id: str,
    source: str,
    *,
    input_kinds: dict[str, ValueKind] | None = None,
    output_kind: ValueKind = ValueKind.TEXT,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    """Script node whose input handles are the program's free variables.

    Inputs default to Text; pass ``input_kinds`` to declare list inputs.
    """
    program = scripting.parse_script(source)
    kinds = input_kinds or {}
    names = sorted(scripting.free_vars(program))
    return Node(
        id=node_id,
        kind=NodeKind.GENERIC_SCRIPT,
        label=label or node_id,
        config=GenericScriptConfig(source=source),
        inputs=tuple(in_handle(n, kinds.get(n, ValueKind.TEXT)) for n in names),
        outputs=(out_handle("output", output_kind),),
        position=position,
    )


def user_action_node(
    node_id: str,
    mode: UserActionMode,
    *,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    in_kind, out_kind = _USER_ACTION_KINDS[mode]
    return Node(
        id=node_id,
        kind=NodeKind.USER_ACTION,
        label=label or node_id,
        config=UserActionConfig(mode=mode),
        inputs=(in_handle("input", in_kind),),
        outputs=(out_handle("output", out_kind),),
        position=position,
    )


def api_call_node(
    node_id: str,
    method: HttpMethod,
    url_template: str,
    extract_path: str,
    *,
    headers: dict[str, str] | None = None,
    body_template: str | None = None,
    label: str | None = None,
    position: tuple[float, float] = (0.0, 0.0),
) -> Node:
    url_t = parse_placeholders(url_template)
    body_t = parse_placeholders(body_template) if body_template is not None else None
    names = _api_placeholder_names(url_t, body_t)
    return Node(
        id=node_id,
        kind=NodeKind.API_CALL,
        label=label or node_id,
        config=APICallConfig(
            method=method,
            url_template=url_t,
            extract_path=extract_path,
            headers=tuple(sorted((headers or {}).items())),
            body_template=body_t,
        ),
        inputs=tuple(in_handle(n) for n in names),
        outputs=(out_handle("output", ValueKind.TEXT),),
        position=position,
    )


_USER_ACTION_KINDS: dict[UserActionMode, tuple[ValueKind, ValueKind]] = {
    UserActionMode.SELECT_ONE: (ValueKind.TEXT_LIST, ValueKind.TEXT),
    UserActionMode.SELECT_MANY: (ValueKind.TEXT_LIST, ValueKind.TEXT_LIST),
    UserActionMode.EDIT_TEXT: (ValueKind.TEXT, ValueKind.TEXT),
}


def _api_placeholder_names(url_t: PromptTemplate, body_t: PromptTemplate | None) -> list[str]:
    names = list(url_t.placeholder_names())
    if body_t is not None:
        names.extend(n for n in body_t.placeholder_names() if n not in names)
    return names


# ---------------------------------------------------------------------------
# Handle synchronization

def _node_placeholder_names(node: Node) -> list[str] | None:
    """Placeholder names a synced node's inputs must equal, or None."""
    cfg = node.config
    if isinstance(cfg, (GenericLLMConfig, LLMClassifierConfig)):
        return list(cfg.template.placeholder_names())
    if isinstance(cfg, APICallConfig):
        return _api_placeholder_names(cfg.url_template, cfg.body_template)
    return None


def _synced_inputs(node: Node) -> tuple[tuple[Handle, ...], tuple[str, str] | None]:
    """New input handles plus a (old, new) rename when exactly one changed."""
    wanted = _node_placeholder_names(node)
    if wanted is None:
        return node.inputs, None
    old_names = node.input_names()
    added = [n for n in wanted if n not in old_names]
    removed = [n for n in old_names if n not in wanted]
    if len(added) == 1 and len(removed) == 1:
        rename = (removed[0], added[0])
        new_inputs = tuple(
            replace(h, name=added[0]) if h.name == removed[0] else h for h in node.inputs
        )
        return new_inputs, rename
    survivors = [h for h in node.inputs if h.name in wanted]
    new_inputs = tuple(survivors) + tuple(in_handle(n) for n in added)
    return new_inputs, None


def sync_handles(node: Node) -> Node:
    """Make a templated node's input handles equal its placeholders.

    Surviving names keep their kind; a single-name swap is treated as a
    rename in place (mirroring a placeholder edit); anything else is
    remove-plus-add. Non-templated node kinds come back unchanged.
    """
    new_inputs, rename = _synced_inputs(node)
    node = replace(node, inputs=new_inputs)
    if rename is not None and isinstance(node.config, LLMClassifierConfig):
        cfg = node.config
        if cfg.payload_input == rename[0]:
            node = replace(node, config=replace(cfg, payload_input=rename[1]))
    return node


def apply_template_edit(chain: Chain, node_id: str, new_text: str, *, part: str = "template") -> Chain:
    """Edit a node's prompt (or APICall url/body) and re-sync the chain.

    Edges into handles that survive (including a renamed handle) are
    preserved; edges into removed handles are dropped.

    ``part`` is "template" for LLM/classifier nodes, "url" or "body" for
    API-call nodes.
    """
    node = chain.node(node_id)
    template = parse_placeholders(new_text)
    cfg = node.config
    if isinstance(cfg, GenericLLMConfig) and part == "template":
        node = replace(node, config=replace(cfg, template=template))
    elif isinstance(cfg, LLMClassifierConfig) and part == "template":
        node = replace(node, config=replace(cfg, template=template))
    elif isinstance(cfg, APICallConfig) and part == "url":
        node = replace(node, config=replace(cfg, url_template=template))
    elif isinstance(cfg, APICallConfig) and part == "body":
        node = replace(node, config=replace(cfg, body_template=template))
    else:
        raise ValueError(f"node {node_id!r} ({node.kind.value}) has no editable {part!r}")

    _, rename = _synced_inputs(node)
    synced = sync_handles(node)
    surviving = set(synced.input_names())
    new_edges = []
    for e in chain.edges:
        if e.target.node != node_id:
            new_edges.append(e)
        elif rename is not None and e.target.handle == rename[0]:
            new_edges.append(replace(e, target=Port(node_id, rename[1])))
        elif e.target.handle in surviving:
            new_edges.append(e)
        # else: the handle is gone, the edge goes with it
    return replace(chain.with_node(synced), edges=tuple(new_edges))


# ---------------------------------------------------------------------------
# Graph queries

def topo_order(chain: Chain) -> list[str]:
    """Node ids in execution order; ties break by ascending id.

    Raises:
        CycleError: the graph has a cycle.
    """
    ids = {n.id for n in chain.nodes}
    successors: dict[str, set[str]] = {i: set() for i in ids}
    indegree: dict[str, int] = {i: 0 for i in ids}
    for e in chain.edges:
        if e.source.node not in ids or e.target.node not in ids:
            continue
        if e.target.node not in successors[e.source.node]:
            successors[e.source.node].add(e.target.node)
            indegree[e.target.node] += 1
    ready = [i for i in sorted(ids) if indegree[i] == 0]
    heapq.heapify(ready)
    order: list[str] = []
    while ready:
        current = heapq.heappop(ready)
        order.append(current)
        for nxt in successors[current]:
            indegree[nxt] -= 1
            if indegree[nxt] == 0:
                heapq.heappush(ready, nxt)
    if len(order) != len(ids):
        stuck = sorted(i for i in ids if indegree[i] > 0)
        raise CycleError(f"chain contains a cycle through: {', '.join(stuck)}")
    return order


def descendants(chain: Chain, node_id: str) -> set[str]:
    """All nodes strictly downstream of ``node_id``."""
    successors: dict[str, set[str]] = {}
    for e in chain.edges:
        successors.setdefault(e.source.node, set()).add(e.target.node)
    seen: set[str] = set()
    frontier = [node_id]
    while frontier:
        current = frontier.pop()
        for nxt in successors.get(current, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    return seen


def _reachable(chain: Chain, start: str, goal: str) -> bool:
    return goal == start or goal in descendants(chain, start)


# ---------------------------------------------------------------------------
# Connect / disconnect

def connect(chain: Chain, source: Port, target: Port) -> Chain | Diagnostic:
    """Add an edge, replacing any existing edge into the target handle.

    Returns a Diagnostic (and leaves the chain untouched) when an endpoint
    is missing, the connection would create a cycle, or the value kinds
    cannot legally flow.
    """
    src_node = chain.get_node(source.node)
    dst_node = chain.get_node(target.node)
    if src_node is None or src_node.find_output(source.handle) is None:
        return _diag(DANGLING_EDGE, f"no output handle {source.node}.{source.handle}", source.node)
    if dst_node is None or dst_node.find_input(target.handle) is None:
        return _diag(DANGLING_EDGE, f"no input handle {target.node}.{target.handle}", target.node)
    if _reachable(chain, target.node, source.node):
        return _diag(
            CYCLE,
            f"connecting {source.node}.{source.handle} to {target.node}.{target.handle} would create a cycle",
        )
    src_handle = src_node.find_output(source.handle)
    dst_handle = dst_node.find_input(target.handle)
    problem = _edge_kind_problem(src_handle, dst_node, dst_handle)
    if problem is not None:
        return _diag(KIND_MISMATCH, problem, target.node)
    kept = tuple(
        e for e in chain.edges if not (e.target.node == target.node and e.target.handle == target.handle)
    )
    return replace(chain, edges=kept + (Edge(source=source, target=target),))


def disconnect(chain: Chain, source: Port, target: Port) -> Chain:
    """Remove the matching edge; a chain without it comes back unchanged."""
    kept = tuple(e for e in chain.edges if not (e.source == source and e.target == target))
    return replace(chain, edges=kept)


def _edge_kind_problem(src: Handle, dst_node: Node, dst: Handle) -> str | None:
    # Every coercion is legal except list-into-text where per-item fan-out
    # is impossible: a user action cannot be answered once per item.
    if (
        src.kind is ValueKind.TEXT_LIST
        and dst.kind is ValueKind.TEXT
        and dst_node.kind is NodeKind.USER_ACTION
    ):
        return (
            f"a TextList cannot fan out into user-action input {dst_node.id}.{dst.name}; "
            "interactive nodes run exactly once"
        )
    return None


# ---------------------------------------------------------------------------
# Validation

def validate_chain(chain: Chain) -> list[Diagnostic]:
    """Every structural violation in the chain, in deterministic order.

    Never raises: arbitrary chain data is accepted and reported on.
    """
    diagnostics: list[Diagnostic] = []

    seen_ids: set[str] = set()
    for n in chain.nodes:
        if n.id in seen_ids:
            diagnostics.append(_diag(DUPLICATE_NODE_ID, f"duplicate node id {n.id!r}", n.id))
        seen_ids.add(n.id)

    node_map: dict[str, Node] = {}
    for n in chain.nodes:
        node_map.setdefault(n.id, n)

    for n in node_map.values():
        diagnostics.extend(_validate_node(n))

    # edges: dangling endpoints, fan-in, kind legality
    fan_in: dict[tuple[str, str], int] = {}
    valid_edges: list[Edge] = []
    for e in chain.edges:
        src_node = node_map.get(e.source.node)
        dst_node = node_map.get(e.target.node)
        src = src_node.find_output(e.source.handle) if src_node else None
        dst = dst_node.find_input(e.target.handle) if dst_node else None
        if src is None:
            diagnostics.append(
                _diag(
                    DANGLING_EDGE,
                    f"edge source {e.source.node}.{e.source.handle} does not exist",
                    e.source.node if src_node else None,
                )
            )
        if dst is None:
            diagnostics.append(
                _diag(
                    DANGLING_EDGE,
                    f"edge target {e.target.node}.{e.target.handle} does not exist",
                    e.target.node if dst_node else None,
                )
            )
        if src is None or dst is None:
            continue
        valid_edges.append(e)
        key = (e.target.node, e.target.handle)
        fan_in[key] = fan_in.get(key, 0) + 1
        problem = _edge_kind_problem(src, dst_node, dst)  # type: ignore[arg-type]
        if problem is not None:
            diagnostics.append(_diag(KIND_MISMATCH, problem, e.target.node))

    for (node_id, handle), count in sorted(fan_in.items()):
        if count > 1:
            diagnostics.append(
                _diag(FAN_IN, f"{count} edges feed input {node_id}.{handle}; at most one is allowed", node_id)
            )

    # cycle detection over structurally valid edges
    probe = replace(chain, nodes=tuple(node_map.values()), edges=tuple(valid_edges))
    try:
        topo_order(probe)
    except CycleError as exc:
        diagnostics.append(_diag(CYCLE, str(exc)))

    return sorted(diagnostics, key=lambda d: (d.node_id or "", d.code, d.message))


def _validate_node(n: Node) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    for handles, direction in ((n.inputs, "input"), (n.outputs, "output")):
        names: set[str] = set()
        for h in handles:
            if not HANDLE_NAME_RE.match(h.name):
                out.append(_diag(BAD_HANDLE_NAME, f"{direction} handle name {h.name!r} is not an identifier", n.id))
            if h.name in names:
                out.append(_diag(DUPLICATE_HANDLE, f"duplicate {direction} handle {h.name!r}", n.id))
            names.add(h.name)

    cfg = n.config
    expected_kind = _CONFIG_KINDS.get(type(cfg))
    if expected_kind is not n.kind:
        out.append(_diag(BAD_CONFIG, f"config {type(cfg).__name__} does not match kind {n.kind.value}", n.id))
        return out

    if isinstance(cfg, DataInputConfig):
        if n.inputs or len(n.outputs) != 1:
            out.append(_diag(BAD_SHAPE, "data-input nodes take no inputs and exactly one output", n.id))
        elif n.outputs[0].kind is not cfg.default_value.kind:
            out.append(_diag(BAD_SHAPE, "data-input output kind must match its default value", n.id))

    elif isinstance(cfg, GenericLLMConfig):
        out.extend(_check_desync(n, set(cfg.template.placeholder_names())))
        want = ValueKind.TEXT if cfg.params.n_samples == 1 else ValueKind.TEXT_LIST
        if len(n.outputs) != 1 or n.outputs[0].name != "output" or n.outputs[0].kind is not want:
            out.append(
                _diag(BAD_SHAPE, f'LLM nodes have exactly one "output" handle of kind {want.value}', n.id)
            )
        out.extend(_check_params(n, cfg.params))

    elif isinstance(cfg, LLMClassifierConfig):
        out.extend(_check_desync(n, set(cfg.template.placeholder_names())))
        if not cfg.labels:
            out.append(_diag(EMPTY_LABELS, "classifier needs at least one label", n.id))
        if len(set(cfg.labels)) != len(cfg.labels):
            out.append(_diag(DUPLICATE_LABELS, "classifier labels must be pairwise distinct", n.id))
        if cfg.payload_input not in n.input_names():
            out.append(
                _diag(BAD_PAYLOAD_INPUT, f"payload input {cfg.payload_input!r} is not an input handle", n.id)
            )
        if set(n.output_names()) != set(cfg.labels) or any(
            h.kind is not ValueKind.TEXT for h in n.outputs
        ):
            out.append(_diag(BAD_SHAPE, "classifier outputs must be exactly its labels, each Text", n.id))
        out.extend(_check_params(n, LLMParams()))

    elif isinstance(cfg, EvaluationConfig):
        for problem in builtin_ops.validate_evaluator(cfg.evaluator):
            out.append(_diag(BAD_CONFIG, problem, n.id))
        if len(n.inputs) != 1 or n.inputs[0].kind is not ValueKind.TEXT_LIST:
            out.append(_diag(BAD_SHAPE, "evaluation nodes take one TextList input", n.id))
        if isinstance(cfg.evaluator.mode, FilterMode):
            if set(n.output_names()) != {"passed", "rejected"} or any(
                h.kind is not ValueKind.TEXT_LIST for h in n.outputs
            ):
                out.append(
                    _diag(BAD_SHAPE, 'filtering evaluators output TextLists "passed" and "rejected"', n.id)
                )
        elif len(n.outputs) != 1 or n.outputs[0].kind is not ValueKind.TEXT_LIST:
            out.append(_diag(BAD_SHAPE, "ranking evaluators output one TextList", n.id))

    elif isinstance(cfg, ProcessingConfig):
        problems = builtin_ops.validate_builtin(cfg.builtin)
        for problem in problems:
            out.append(_diag(BAD_CONFIG, problem, n.id))
        if not problems:
            in_kind, out_kind = builtin_ops.BUILTIN_SIGNATURES[cfg.builtin.name]
            if (
                len(n.inputs) != 1
                or len(n.outputs) != 1
                or n.inputs[0].kind is not in_kind
                or n.outputs[0].kind is not out_kind
            ):
                out.append(
                    _diag(
                        BAD_SHAPE,
                        f"{cfg.builtin.name} takes one {in_kind.value} input and one {out_kind.value} output",
                        n.id,
                    )
                )

    elif isinstance(cfg, GenericScriptConfig):
        try:
            program = scripting.parse_script(cfg.source)
        except scripting.ParseError as exc:
            out.append(_diag(BAD_CONFIG, f"script does not parse: {exc}", n.id))
        else:
            unbound = sorted(scripting.free_vars(program) - set(n.input_names()))
            if unbound:
                out.append(
                    _diag(BAD_CONFIG, f"script reads undeclared input(s): {', '.join(unbound)}", n.id)
                )
        if len(n.outputs) != 1:
            out.append(_diag(BAD_SHAPE, "script nodes have exactly one output handle", n.id))

    elif isinstance(cfg, UserActionConfig):
        in_kind, out_kind = _USER_ACTION_KINDS[cfg.mode]
        if (
            len(n.inputs) != 1
            or len(n.outputs) != 1
            or n.inputs[0].kind is not in_kind
            or n.outputs[0].kind is not out_kind
        ):
            out.append(
                _diag(
                    BAD_SHAPE,
                    f"{cfg.mode.value} takes one {in_kind.value} input and one {out_kind.value} output",
                    n.id,
                )
            )

    elif isinstance(cfg, APICallConfig):
        if not cfg.extract_path:
            out.append(_diag(BAD_CONFIG, "API-call nodes need a non-empty extract path", n.id))
        out.extend(_check_desync(n, set(_api_placeholder_names(cfg.url_template, cfg.body_template))))
        if len(n.outputs) != 1 or n.outputs[0].kind is not ValueKind.TEXT:
            out.append(_diag(BAD_SHAPE, "API-call nodes have exactly one Text output", n.id))

    return out


def _check_desync(n: Node, placeholders: set[str]) -> list[Diagnostic]:
    handles = set(n.input_names())
    if handles == placeholders:
        return []
    missing = sorted(placeholders - handles)
    extra = sorted(handles - placeholders)
    parts = []
    if missing:
        parts.append(f"placeholders without handles: {', '.join(missing)}")
    if extra:
        parts.append(f"handles without placeholders: {', '.join(extra)}")
    return [_diag(HANDLE_DESYNC, "; ".join(parts), n.id)]


def _check_params(n: Node, params: LLMParams) -> list[Diagnostic]:
    out = []
    if params.n_samples < 1:
        out.append(_diag(BAD_CONFIG, f"nSamples must be >= 1, got {params.n_samples}", n.id))
    if params.max_tokens < 1:
        out.append(_diag(BAD_CONFIG, f"maxTokens must be >= 1, got {params.max_tokens}", n.id))
    if params.temperature < 0:
        out.append(_diag(BAD_CONFIG, f"temperature must be >= 0, got {params.temperature}", n.id))
    return out


_CONFIG_KINDS: dict[type, NodeKind] = {
    DataInputConfig: NodeKind.DATA_INPUT,
    GenericLLMConfig: NodeKind.GENERIC_LLM,
    LLMClassifierConfig: NodeKind.LLM_CLASSIFIER,
    EvaluationConfig: NodeKind.EVALUATION,
    ProcessingConfig: NodeKind.PROCESSING,
    GenericScriptConfig: NodeKind.GENERIC_SCRIPT,
    UserActionConfig: NodeKind.USER_ACTION,
    APICallConfig: NodeKind.API_CALL,
}
