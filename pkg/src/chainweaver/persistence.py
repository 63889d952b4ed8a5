"""Chain file serialization: canonical JSON in, strict schema out.

The on-disk form is a ``.chain.json`` document holding the chain plus
optional fixtures (scripted completions, sample inputs, canned user-action
answers, API stubs) that make a chain run deterministically.

Serialization is canonical — object keys sorted, two-space indent, UTF-8,
newline-terminated — so files diff cleanly and round-trip byte-exactly.
Loading is strict: the first schema violation raises :class:`FormatError`
carrying the JSON path of the offending element.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any

from .backends import LLMParams, ScriptedRule
from .builtins import (
    BUILTIN_SIGNATURES,
    BlocklistScorePredicate,
    BuiltinSpec,
    EvaluatorSpec,
    FilterMode,
    LengthBoundsPredicate,
    Predicate,
    RankTopKMode,
    RegexMatchPredicate,
)
from .model import (
    APICallConfig,
    Chain,
    DataInputConfig,
    Edge,
    EvaluationConfig,
    GenericLLMConfig,
    GenericScriptConfig,
    Handle,
    HandleDirection,
    HttpMethod,
    LLMClassifierConfig,
    Node,
    NodeConfig,
    NodeKind,
    Port,
    ProcessingConfig,
    UserActionConfig,
    UserActionMode,
)
from .template import parse_placeholders
from .values import Value, ValueKind

CURRENT_FORMAT_VERSION = 1
CHAIN_FILE_SUFFIX = ".chain.json"


class FormatError(Exception):
    """A chain file violates the schema; ``path`` points at the violation."""

    def __init__(self, path: str, message: str) -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class ApiStub:
    """Canned API response for fixture runs; matched by URL regex."""

    url_pattern: str
    response: Any
    status: int = 200


@dataclass(frozen=True)
class Fixtures:
    """Everything needed to run a chain deterministically."""

    scripted_rules: tuple[ScriptedRule, ...] = ()
    sample_inputs: dict[str, Value] = field(default_factory=dict)
    user_action_answers: dict[str, Any] = field(default_factory=dict)
    api_stubs: tuple[ApiStub, ...] = ()


@dataclass(frozen=True)
class ChainFile:
    chain: Chain
    fixtures: Fixtures | None = None
    format_version: int = CURRENT_FORMAT_VERSION


def stub_transport(stubs: tuple[ApiStub, ...]):
    """An executor HTTP transport answering from canned stubs only."""

    def transport(method: str, url: str, headers: dict[str, str], body: str | None) -> tuple[int, str]:
        for stub in stubs:
            if re.search(stub.url_pattern, url):
                return stub.status, json.dumps(stub.response)
        return 404, json.dumps({"error": f"no stub matches {url}"})

    return transport


# ---------------------------------------------------------------------------
# Serialization

def canonical_json(doc: Any) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n"


def _canon_num(x: float) -> int | float:
    # integral numbers always serialize as ints so load/serialize is byte-stable
    return int(x) if float(x).is_integer() else float(x)


def chain_to_doc(chain: Chain) -> dict:
    return {
        "id": chain.id,
        "name": chain.name,
        "description": chain.description,
        "nodes": [_node_to_doc(n) for n in chain.nodes],
        "edges": [
            {
                "from": {"node": e.source.node, "handle": e.source.handle},
                "to": {"node": e.target.node, "handle": e.target.handle},
            }
            for e in chain.edges
        ],
    }


def chain_file_to_doc(chain_file: ChainFile) -> dict:
    doc: dict[str, Any] = {
        "formatVersion": chain_file.format_version,
        "chain": chain_to_doc(chain_file.chain),
    }
    if chain_file.fixtures is not None:
        doc["fixtures"] = _fixtures_to_doc(chain_file.fixtures)
    return doc


def serialize(chain: Chain) -> str:
    """Canonical chain-file text for a bare chain (no fixtures)."""
    return canonical_json(chain_file_to_doc(ChainFile(chain=chain, format_version=chain.format_version)))


def serialize_chain_file(chain_file: ChainFile) -> str:
    return canonical_json(chain_file_to_doc(chain_file))


def deserialize(text: str) -> Chain:
    """Parse canonical chain-file text back into a chain.

    Raises:
        FormatError: the document violates the schema; the error carries
            the JSON path of the first violation.
    """
    return load_chain_file(text).chain


def load_chain_file(text: str) -> ChainFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError("/", f"not valid JSON: {exc}") from exc
    return chain_file_from_doc(doc)


def _node_to_doc(n: Node) -> dict:
    return {
        "id": n.id,
        "kind": n.kind.value,
        "label": n.label,
        "config": _config_to_doc(n.config),
        "inputs": [{"name": h.name, "kind": h.kind.value} for h in n.inputs],
        "outputs": [{"name": h.name, "kind": h.kind.value} for h in n.outputs],
        "position": {"x": _canon_num(n.position[0]), "y": _canon_num(n.position[1])},
    }


def _config_to_doc(cfg: NodeConfig) -> dict:
    if isinstance(cfg, DataInputConfig):
        return {"defaultValue": cfg.default_value.to_json()}
    if isinstance(cfg, GenericLLMConfig):
        return {
            "template": cfg.template.raw,
            "params": {
                "temperature": _canon_num(cfg.params.temperature),
                "maxTokens": cfg.params.max_tokens,
                "stopSequences": list(cfg.params.stop_sequences),
                "nSamples": cfg.params.n_samples,
            },
        }
    if isinstance(cfg, LLMClassifierConfig):
        return {
            "template": cfg.template.raw,
            "labels": list(cfg.labels),
            "payloadInput": cfg.payload_input,
            "defaultLabel": cfg.default_label,
        }
    if isinstance(cfg, EvaluationConfig):
        return {"evaluator": _evaluator_to_doc(cfg.evaluator)}
    if isinstance(cfg, ProcessingConfig):
        return {"builtin": _builtin_to_doc(cfg.builtin)}
    if isinstance(cfg, GenericScriptConfig):
        return {"source": cfg.source}
    if isinstance(cfg, UserActionConfig):
        return {"mode": cfg.mode.value}
    if isinstance(cfg, APICallConfig):
        return {
            "method": cfg.method.value,
            "urlTemplate": cfg.url_template.raw,
            "headers": dict(cfg.headers),
            "bodyTemplate": cfg.body_template.raw if cfg.body_template is not None else None,
            "extractPath": cfg.extract_path,
        }
    raise TypeError(f"unknown config: {cfg!r}")


def _evaluator_to_doc(ev: EvaluatorSpec) -> dict:
    p = ev.predicate
    if isinstance(p, RegexMatchPredicate):
        predicate: dict[str, Any] = {"type": "regexMatch", "pattern": p.pattern}
    elif isinstance(p, BlocklistScorePredicate):
        predicate = {"type": "blocklistScore", "words": list(p.words), "threshold": _canon_num(p.threshold)}
    else:
        predicate = {"type": "lengthBounds", "min": p.min_chars, "max": p.max_chars}
    if isinstance(ev.mode, FilterMode):
        mode: dict[str, Any] = {"type": "filter"}
    else:
        mode = {"type": "rankTopK", "k": ev.mode.k}
    return {"predicate": predicate, "mode": mode}


def _builtin_to_doc(b: BuiltinSpec) -> dict:
    doc: dict[str, Any] = {"name": b.name}
    if b.name in ("splitBySeparator", "joinWithSeparator"):
        doc["separator"] = b.separator
    elif b.name == "appendText":
        doc["suffix"] = b.suffix
    elif b.name == "prependText":
        doc["prefix"] = b.prefix
    elif b.name == "regexExtract":
        doc["pattern"] = b.pattern
        doc["group"] = b.group
    return doc


def _fixtures_to_doc(f: Fixtures) -> dict:
    doc: dict[str, Any] = {}
    if f.scripted_rules:
        doc["scriptedRules"] = [r.to_json() for r in f.scripted_rules]
    if f.sample_inputs:
        doc["sampleInputs"] = {k: v.to_json() for k, v in f.sample_inputs.items()}
    if f.user_action_answers:
        doc["userActionAnswers"] = dict(f.user_action_answers)
    if f.api_stubs:
        doc["apiStubs"] = [
            {"urlPattern": s.url_pattern, "status": s.status, "response": s.response}
            for s in f.api_stubs
        ]
    return doc


# ---------------------------------------------------------------------------
# Strict loading

def _obj(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise FormatError(path, f"expected an object, got {type(value).__name__}")
    return value


def _arr(value: Any, path: str) -> list:
    if not isinstance(value, list):
        raise FormatError(path, f"expected an array, got {type(value).__name__}")
    return value


def _str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise FormatError(path, f"expected a string, got {type(value).__name__}")
    return value


def _int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise FormatError(path, f"expected an integer, got {type(value).__name__}")
    return value


def _num(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(path, f"expected a number, got {type(value).__name__}")
    return float(value)


def _require(obj: dict, key: str, path: str) -> Any:
    if key not in obj:
        raise FormatError(f"{path}/{key}", "missing required key")
    return obj[key]


def _check_keys(obj: dict, allowed: set[str], path: str) -> None:
    for key in sorted(obj):
        if key not in allowed:
            raise FormatError(f"{path}/{key}", f"unknown key for format version {CURRENT_FORMAT_VERSION}")


def chain_file_from_doc(doc: Any) -> ChainFile:
    root = _obj(doc, "/")
    _check_keys(root, {"formatVersion", "chain", "fixtures"}, "")
    version = _int(_require(root, "formatVersion", ""), "/formatVersion")
    if version != CURRENT_FORMAT_VERSION:
        raise FormatError(
            "/formatVersion",
            f"unsupported format version {version}; this build reads version {CURRENT_FORMAT_VERSION}",
        )
    chain = _chain_from_doc(_require(root, "chain", ""), "/chain", version)
    fixtures = None
    if "fixtures" in root:
        fixtures = _fixtures_from_doc(root["fixtures"], "/fixtures")
    return ChainFile(chain=chain, fixtures=fixtures, format_version=version)


def _chain_from_doc(doc: Any, path: str, version: int) -> Chain:
    obj = _obj(doc, path)
    _check_keys(obj, {"id", "name", "description", "nodes", "edges"}, path)
    nodes = tuple(
        _node_from_doc(item, f"{path}/nodes/{i}")
        for i, item in enumerate(_arr(_require(obj, "nodes", path), f"{path}/nodes"))
    )
    edges = tuple(
        _edge_from_doc(item, f"{path}/edges/{i}")
        for i, item in enumerate(_arr(_require(obj, "edges", path), f"{path}/edges"))
    )
    return Chain(
        id=_str(_require(obj, "id", path), f"{path}/id"),
        name=_str(_require(obj, "name", path), f"{path}/name"),
        description=_str(_require(obj, "description", path), f"{path}/description"),
        nodes=nodes,
        edges=edges,
        format_version=version,
    )


def _node_from_doc(doc: Any, path: str) -> Node:
    obj = _obj(doc, path)
    _check_keys(obj, {"id", "kind", "label", "config", "inputs", "outputs", "position"}, path)
    kind_raw = _str(_require(obj, "kind", path), f"{path}/kind")
    try:
        kind = NodeKind(kind_raw)
    except ValueError:
        raise FormatError(f"{path}/kind", f"unknown node kind {kind_raw!r}") from None
    inputs = tuple(
        _handle_from_doc(item, f"{path}/inputs/{i}", HandleDirection.INPUT)
        for i, item in enumerate(_arr(_require(obj, "inputs", path), f"{path}/inputs"))
    )
    outputs = tuple(
        _handle_from_doc(item, f"{path}/outputs/{i}", HandleDirection.OUTPUT)
        for i, item in enumerate(_arr(_require(obj, "outputs", path), f"{path}/outputs"))
    )
    pos_obj = _obj(_require(obj, "position", path), f"{path}/position")
    _check_keys(pos_obj, {"x", "y"}, f"{path}/position")
    position = (
        _num(_require(pos_obj, "x", f"{path}/position"), f"{path}/position/x"),
        _num(_require(pos_obj, "y", f"{path}/position"), f"{path}/position/y"),
    )
    config = _config_from_doc(kind, _require(obj, "config", path), f"{path}/config")
    return Node(
        id=_str(_require(obj, "id", path), f"{path}/id"),
        kind=kind,
        label=_str(_require(obj, "label", path), f"{path}/label"),
        config=config,
        inputs=inputs,
        outputs=outputs,
        position=position,
    )


def _handle_from_doc(doc: Any, path: str, direction: HandleDirection) -> Handle:
    obj = _obj(doc, path)
    _check_keys(obj, {"name", "kind"}, path)
    return Handle(
        name=_str(_require(obj, "name", path), f"{path}/name"),
        kind=_value_kind(_require(obj, "kind", path), f"{path}/kind"),
        direction=direction,
    )


def _value_kind(raw: Any, path: str) -> ValueKind:
    text = _str(raw, path)
    try:
        return ValueKind(text)
    except ValueError:
        raise FormatError(path, f"unknown value kind {text!r}") from None


def _value_from_doc(doc: Any, path: str) -> Value:
    obj = _obj(doc, path)
    kind = _value_kind(_require(obj, "kind", path), f"{path}/kind")
    if kind is ValueKind.TEXT:
        _check_keys(obj, {"kind", "text"}, path)
        return Value.of_text(_str(_require(obj, "text", path), f"{path}/text"))
    _check_keys(obj, {"kind", "items"}, path)
    items = _arr(_require(obj, "items", path), f"{path}/items")
    return Value.of_list([_str(item, f"{path}/items/{i}") for i, item in enumerate(items)])


def _edge_from_doc(doc: Any, path: str) -> Edge:
    obj = _obj(doc, path)
    _check_keys(obj, {"from", "to"}, path)
    return Edge(
        source=_port_from_doc(_require(obj, "from", path), f"{path}/from"),
        target=_port_from_doc(_require(obj, "to", path), f"{path}/to"),
    )


def _port_from_doc(doc: Any, path: str) -> Port:
    obj = _obj(doc, path)
    _check_keys(obj, {"node", "handle"}, path)
    return Port(
        node=_str(_require(obj, "node", path), f"{path}/node"),
        handle=_str(_require(obj, "handle", path), f"{path}/handle"),
    )


def _config_from_doc(kind: NodeKind, doc: Any, path: str) -> NodeConfig:
    obj = _obj(doc, path)

    if kind is NodeKind.DATA_INPUT:
        _check_keys(obj, {"defaultValue"}, path)
        return DataInputConfig(
            default_value=_value_from_doc(_require(obj, "defaultValue", path), f"{path}/defaultValue")
        )

    if kind is NodeKind.GENERIC_LLM:
        _check_keys(obj, {"template", "params"}, path)
        params_obj = _obj(_require(obj, "params", path), f"{path}/params")
        _check_keys(params_obj, {"temperature", "maxTokens", "stopSequences", "nSamples"}, f"{path}/params")
        stops = _arr(_require(params_obj, "stopSequences", f"{path}/params"), f"{path}/params/stopSequences")
        params = LLMParams(
            temperature=_num(_require(params_obj, "temperature", f"{path}/params"), f"{path}/params/temperature"),
            max_tokens=_int(_require(params_obj, "maxTokens", f"{path}/params"), f"{path}/params/maxTokens"),
            stop_sequences=tuple(
                _str(s, f"{path}/params/stopSequences/{i}") for i, s in enumerate(stops)
            ),
            n_samples=_int(_require(params_obj, "nSamples", f"{path}/params"), f"{path}/params/nSamples"),
        )
        template = parse_placeholders(_str(_require(obj, "template", path), f"{path}/template"))
        return GenericLLMConfig(template=template, params=params)

    if kind is NodeKind.LLM_CLASSIFIER:
        _check_keys(obj, {"template", "labels", "payloadInput", "defaultLabel"}, path)
        labels = _arr(_require(obj, "labels", path), f"{path}/labels")
        default_label = _require(obj, "defaultLabel", path)
        if default_label is not None:
            default_label = _str(default_label, f"{path}/defaultLabel")
        return LLMClassifierConfig(
            template=parse_placeholders(_str(_require(obj, "template", path), f"{path}/template")),
            labels=tuple(_str(lbl, f"{path}/labels/{i}") for i, lbl in enumerate(labels)),
            payload_input=_str(_require(obj, "payloadInput", path), f"{path}/payloadInput"),
            default_label=default_label,
        )

    if kind is NodeKind.EVALUATION:
        _check_keys(obj, {"evaluator"}, path)
        return EvaluationConfig(evaluator=_evaluator_from_doc(_require(obj, "evaluator", path), f"{path}/evaluator"))

    if kind is NodeKind.PROCESSING:
        _check_keys(obj, {"builtin"}, path)
        return ProcessingConfig(builtin=_builtin_from_doc(_require(obj, "builtin", path), f"{path}/builtin"))

    if kind is NodeKind.GENERIC_SCRIPT:
        _check_keys(obj, {"source"}, path)
        return GenericScriptConfig(source=_str(_require(obj, "source", path), f"{path}/source"))

    if kind is NodeKind.USER_ACTION:
        _check_keys(obj, {"mode"}, path)
        mode_raw = _str(_require(obj, "mode", path), f"{path}/mode")
        try:
            mode = UserActionMode(mode_raw)
        except ValueError:
            raise FormatError(f"{path}/mode", f"unknown user-action mode {mode_raw!r}") from None
        return UserActionConfig(mode=mode)

    if kind is NodeKind.API_CALL:
        _check_keys(obj, {"method", "urlTemplate", "headers", "bodyTemplate", "extractPath"}, path)
        method_raw = _str(_require(obj, "method", path), f"{path}/method")
        try:
            method = HttpMethod(method_raw)
        except ValueError:
            raise FormatError(f"{path}/method", f"unknown method {method_raw!r}") from None
        headers_obj = _obj(_require(obj, "headers", path), f"{path}/headers")
        headers = tuple(
            sorted((k, _str(v, f"{path}/headers/{k}")) for k, v in headers_obj.items())
        )
        body_raw = _require(obj, "bodyTemplate", path)
        body_template = (
            parse_placeholders(_str(body_raw, f"{path}/bodyTemplate")) if body_raw is not None else None
        )
        return APICallConfig(
            method=method,
            url_template=parse_placeholders(_str(_require(obj, "urlTemplate", path), f"{path}/urlTemplate")),
            extract_path=_str(_require(obj, "extractPath", path), f"{path}/extractPath"),
            headers=headers,
            body_template=body_template,
        )

    raise FormatError(path, f"no config reader for kind {kind.value}")


def _evaluator_from_doc(doc: Any, path: str) -> EvaluatorSpec:
    obj = _obj(doc, path)
    _check_keys(obj, {"predicate", "mode"}, path)
    pred_obj = _obj(_require(obj, "predicate", path), f"{path}/predicate")
    ptype = _str(_require(pred_obj, "type", f"{path}/predicate"), f"{path}/predicate/type")
    predicate: Predicate
    if ptype == "regexMatch":
        _check_keys(pred_obj, {"type", "pattern"}, f"{path}/predicate")
        predicate = RegexMatchPredicate(
            pattern=_str(_require(pred_obj, "pattern", f"{path}/predicate"), f"{path}/predicate/pattern")
        )
    elif ptype == "blocklistScore":
        _check_keys(pred_obj, {"type", "words", "threshold"}, f"{path}/predicate")
        words = _arr(_require(pred_obj, "words", f"{path}/predicate"), f"{path}/predicate/words")
        predicate = BlocklistScorePredicate(
            words=tuple(_str(w, f"{path}/predicate/words/{i}") for i, w in enumerate(words)),
            threshold=_num(_require(pred_obj, "threshold", f"{path}/predicate"), f"{path}/predicate/threshold"),
        )
    elif ptype == "lengthBounds":
        _check_keys(pred_obj, {"type", "min", "max"}, f"{path}/predicate")
        predicate = LengthBoundsPredicate(
            min_chars=_int(_require(pred_obj, "min", f"{path}/predicate"), f"{path}/predicate/min"),
            max_chars=_int(_require(pred_obj, "max", f"{path}/predicate"), f"{path}/predicate/max"),
        )
    else:
        raise FormatError(f"{path}/predicate/type", f"unknown predicate type {ptype!r}")

    mode_obj = _obj(_require(obj, "mode", path), f"{path}/mode")
    mtype = _str(_require(mode_obj, "type", f"{path}/mode"), f"{path}/mode/type")
    if mtype == "filter":
        _check_keys(mode_obj, {"type"}, f"{path}/mode")
        mode: FilterMode | RankTopKMode = FilterMode()
    elif mtype == "rankTopK":
        _check_keys(mode_obj, {"type", "k"}, f"{path}/mode")
        mode = RankTopKMode(k=_int(_require(mode_obj, "k", f"{path}/mode"), f"{path}/mode/k"))
    else:
        raise FormatError(f"{path}/mode/type", f"unknown evaluator mode {mtype!r}")
    return EvaluatorSpec(predicate=predicate, mode=mode)


def _builtin_from_doc(doc: Any, path: str) -> BuiltinSpec:
    obj = _obj(doc, path)
    name = _str(_require(obj, "name", path), f"{path}/name")
    if name not in BUILTIN_SIGNATURES:
        raise FormatError(f"{path}/name", f"unknown builtin {name!r}")
    if name in ("splitBySeparator", "joinWithSeparator"):
        _check_keys(obj, {"name", "separator"}, path)
        return BuiltinSpec(name=name, separator=_str(_require(obj, "separator", path), f"{path}/separator"))
    if name == "appendText":
        _check_keys(obj, {"name", "suffix"}, path)
        return BuiltinSpec(name=name, suffix=_str(_require(obj, "suffix", path), f"{path}/suffix"))
    if name == "prependText":
        _check_keys(obj, {"name", "prefix"}, path)
        return BuiltinSpec(name=name, prefix=_str(_require(obj, "prefix", path), f"{path}/prefix"))
    if name == "regexExtract":
        _check_keys(obj, {"name", "pattern", "group"}, path)
        return BuiltinSpec(
            name=name,
            pattern=_str(_require(obj, "pattern", path), f"{path}/pattern"),
            group=_int(_require(obj, "group", path), f"{path}/group"),
        )
    _check_keys(obj, {"name"}, path)
    return BuiltinSpec(name=name)


def _fixtures_from_doc(doc: Any, path: str) -> Fixtures:
    obj = _obj(doc, path)
    _check_keys(obj, {"scriptedRules", "sampleInputs", "userActionAnswers", "apiStubs"}, path)
    rules: list[ScriptedRule] = []
    for i, item in enumerate(_arr(obj.get("scriptedRules", []), f"{path}/scriptedRules")):
        rules.append(_scripted_rule_from_doc(item, f"{path}/scriptedRules/{i}"))
    sample_inputs = {
        k: _value_from_doc(v, f"{path}/sampleInputs/{k}")
        for k, v in _obj(obj.get("sampleInputs", {}), f"{path}/sampleInputs").items()
    }
    answers = _obj(obj.get("userActionAnswers", {}), f"{path}/userActionAnswers")
    for node_id, answer in answers.items():
        _answer_shape(answer, f"{path}/userActionAnswers/{node_id}")
    stubs: list[ApiStub] = []
    for i, item in enumerate(_arr(obj.get("apiStubs", []), f"{path}/apiStubs")):
        stub_obj = _obj(item, f"{path}/apiStubs/{i}")
        _check_keys(stub_obj, {"urlPattern", "status", "response"}, f"{path}/apiStubs/{i}")
        stubs.append(
            ApiStub(
                url_pattern=_str(_require(stub_obj, "urlPattern", f"{path}/apiStubs/{i}"), f"{path}/apiStubs/{i}/urlPattern"),
                status=_int(stub_obj.get("status", 200), f"{path}/apiStubs/{i}/status"),
                response=_require(stub_obj, "response", f"{path}/apiStubs/{i}"),
            )
        )
    return Fixtures(
        scripted_rules=tuple(rules),
        sample_inputs=sample_inputs,
        user_action_answers=dict(answers),
        api_stubs=tuple(stubs),
    )


def _scripted_rule_from_doc(doc: Any, path: str) -> ScriptedRule:
    obj = _obj(doc, path)
    _check_keys(obj, {"matcher", "responses"}, path)
    matcher_obj = _obj(_require(obj, "matcher", path), f"{path}/matcher")
    mtype = _str(_require(matcher_obj, "type", f"{path}/matcher"), f"{path}/matcher/type")
    allowed = {"exact": "prompt", "regex": "pattern", "prefix": "prefix"}
    if mtype not in allowed:
        raise FormatError(f"{path}/matcher/type", f"unknown matcher type {mtype!r}")
    _check_keys(matcher_obj, {"type", allowed[mtype]}, f"{path}/matcher")
    _str(_require(matcher_obj, allowed[mtype], f"{path}/matcher"), f"{path}/matcher/{allowed[mtype]}")
    responses = _arr(_require(obj, "responses", path), f"{path}/responses")
    if not responses:
        raise FormatError(f"{path}/responses", "a scripted rule needs at least one response")
    for i, r in enumerate(responses):
        _str(r, f"{path}/responses/{i}")
    return ScriptedRule.from_json(obj)


def _answer_shape(answer: Any, path: str) -> None:
    obj = _obj(answer, path)
    _check_keys(obj, {"select", "text", "handle", "value"}, path)
    if "select" in obj:
        sel = obj["select"]
        if isinstance(sel, bool) or not (
            isinstance(sel, int) or (isinstance(sel, list) and all(isinstance(i, int) and not isinstance(i, bool) for i in sel))
        ):
            raise FormatError(f"{path}/select", "expected an index or list of indices")
    if "text" in obj:
        _str(obj["text"], f"{path}/text")
    if "value" in obj:
        _value_from_doc(obj["value"], f"{path}/value")
    if "handle" in obj:
        _str(obj["handle"], f"{path}/handle")
