"""Headless command-line interface.

Everything the service can do without a browser: validate chain files,
run them (with scripted/echo/http backends and non-interactive breakpoint
answers), unit-test single nodes, export gallery entries, and start the
HTTP service.

stdout carries machine-readable JSON only; human-facing logs go to
stderr. Exit codes: 0 ok, 1 usage, 2 validation failure, 3 paused with an
unanswered breakpoint or user action, 4 node error under --strict.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any

from .backends import BackendError, EchoBackend, HttpBackend, LLMBackend, ScriptedBackend
from .executor import (
    NodeStatus,
    RunStatus,
    answer_user_action,
    edit_node_output,
    final_outputs_json,
    resume,
    run_chain,
    run_node_unit,
)
from .gallery import answer_from_doc, gallery_entry, list_gallery
from .model import validate_chain
from .persistence import (
    ChainFile,
    Fixtures,
    FormatError,
    canonical_json,
    load_chain_file,
    serialize_chain_file,
    stub_transport,
)
from .persistence import _fixtures_from_doc  # shared strict reader for fixture files
from .service import serve
from .values import Value

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_UNANSWERED = 3
EXIT_NODE_ERROR = 4


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for validation
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="chainweaver", description="Author, run, and debug prompt chains.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="validate a chain file")
    p_validate.add_argument("file")

    p_run = sub.add_parser("run", help="run a chain file end to end")
    p_run.add_argument("file")
    p_run.add_argument("--input", action="append", default=[], metavar="NAME=VALUE")
    p_run.add_argument("--backend", default=None, metavar="echo|scripted[:rules.json]|http")
    p_run.add_argument("--breakpoint", action="append", default=[], metavar="NODE_ID")
    p_run.add_argument("--answers", default=None, metavar="FILE")
    p_run.add_argument("--strict", action="store_true", help="exit 4 when any node errors")

    p_test = sub.add_parser("test-node", help="run one node with manual bindings")
    p_test.add_argument("file")
    p_test.add_argument("--node", required=True)
    p_test.add_argument("--bind", action="append", default=[], metavar="NAME=VALUE")
    p_test.add_argument("--backend", default=None)
    p_test.add_argument("--strict", action="store_true")

    p_gallery = sub.add_parser("gallery", help="list or export bundled example chains")
    gallery_sub = p_gallery.add_subparsers(dest="gallery_command", required=True)
    gallery_sub.add_parser("list")
    p_export = gallery_sub.add_parser("export")
    p_export.add_argument("id")
    p_export.add_argument("path")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--ui", default=None, metavar="DIR", help="serve a built web editor at /ui")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _cmd_validate(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "test-node":
            return _cmd_test_node(args)
        if args.command == "gallery":
            return _cmd_gallery(args)
        if args.command == "serve":
            serve(port=args.port, host=args.host, ui_dir=args.ui)
            return EXIT_OK
    except FormatError as exc:
        print(f"format error at {exc.path}: {exc.message}", file=sys.stderr)
        return EXIT_INVALID
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


def _load_file(path: str) -> ChainFile:
    return load_chain_file(Path(path).read_text(encoding="utf-8"))


def _parse_value(raw: str) -> Value:
    if raw.startswith("["):
        items = json.loads(raw)
        if not isinstance(items, list) or any(not isinstance(i, str) for i in items):
            raise ValueError(f"list inputs must be JSON arrays of strings: {raw!r}")
        return Value.of_list(items)
    return Value.of_text(raw)


def _parse_assignments(pairs: list[str], what: str) -> dict[str, Value]:
    out: dict[str, Value] = {}
    for pair in pairs:
        if "=" not in pair:
            print(f"error: {what} must look like name=value, got {pair!r}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        name, raw = pair.split("=", 1)
        try:
            out[name] = _parse_value(raw)
        except (ValueError, json.JSONDecodeError) as exc:
            print(f"error: bad {what} {name!r}: {exc}", file=sys.stderr)
            raise SystemExit(EXIT_USAGE) from exc
    return out


def _resolve_backend_arg(
    spec: str | None, fixtures: Fixtures | None
) -> tuple[LLMBackend, Fixtures | None]:
    """Backend from the --backend flag; default scripted-from-fixtures, else echo."""
    if spec is None:
        if fixtures is not None and fixtures.scripted_rules:
            return ScriptedBackend(fixtures.scripted_rules), fixtures
        return EchoBackend(), fixtures
    if spec == "echo":
        return EchoBackend(), fixtures
    if spec == "http":
        return HttpBackend(), fixtures
    if spec == "scripted" or spec.startswith("scripted:"):
        if ":" in spec:
            doc = json.loads(Path(spec.split(":", 1)[1]).read_text(encoding="utf-8"))
            if isinstance(doc, list):
                doc = {"scriptedRules": doc}
            loaded = _fixtures_from_doc(doc, "/")
            fixtures = _merge_fixtures(fixtures, loaded)
        if fixtures is None or not fixtures.scripted_rules:
            print("error: scripted backend needs fixtures with scriptedRules", file=sys.stderr)
            raise SystemExit(EXIT_USAGE)
        return ScriptedBackend(fixtures.scripted_rules), fixtures
    print(f"error: unknown backend {spec!r}", file=sys.stderr)
    raise SystemExit(EXIT_USAGE)


def _merge_fixtures(base: Fixtures | None, override: Fixtures) -> Fixtures:
    base = base or Fixtures()
    return Fixtures(
        scripted_rules=override.scripted_rules or base.scripted_rules,
        sample_inputs={**base.sample_inputs, **override.sample_inputs},
        user_action_answers={**base.user_action_answers, **override.user_action_answers},
        api_stubs=override.api_stubs or base.api_stubs,
    )


def _cmd_validate(args: argparse.Namespace) -> int:
    chain_file = _load_file(args.file)
    diagnostics = validate_chain(chain_file.chain)
    print(canonical_json([d.to_json() for d in diagnostics]), end="")
    return EXIT_OK if not diagnostics else EXIT_INVALID


def _cmd_run(args: argparse.Namespace) -> int:
    chain_file = _load_file(args.file)
    diagnostics = validate_chain(chain_file.chain)
    if diagnostics:
        for d in diagnostics:
            print(f"invalid: [{d.code}] {d.message}", file=sys.stderr)
        return EXIT_INVALID

    backend, fixtures = _resolve_backend_arg(args.backend, chain_file.fixtures)
    fixtures = fixtures or Fixtures()
    transport = stub_transport(fixtures.api_stubs) if fixtures.api_stubs else None
    inputs = dict(fixtures.sample_inputs)
    inputs.update(_parse_assignments(args.input, "--input"))
    answers: dict[str, Any] = dict(fixtures.user_action_answers)
    if args.answers:
        answers.update(json.loads(Path(args.answers).read_text(encoding="utf-8")))

    state = run_chain(
        chain_file.chain, inputs, tuple(args.breakpoint), backend, http_transport=transport
    )
    guard = 0
    while state.status in (RunStatus.PAUSED_AT_BREAKPOINT, RunStatus.AWAITING_USER_ACTION):
        guard += 1
        if guard > 10 * (len(chain_file.chain.nodes) + 1):
            print("error: run is not converging; giving up", file=sys.stderr)
            return EXIT_UNANSWERED
        node_id = state.paused_node_id or ""
        entry = answers.get(node_id)
        if entry is None and not sys.stdin.isatty():
            print(f"paused at {node_id!r} with no answer on file", file=sys.stderr)
            return EXIT_UNANSWERED
        if state.status is RunStatus.AWAITING_USER_ACTION:
            answer = answer_from_doc(entry) if entry is not None else _prompt_answer(state)
            answer_user_action(state, node_id, answer)
        else:
            edit = entry if entry is not None else _prompt_edit(node_id)
            if isinstance(edit, dict) and "handle" in edit:
                edit_node_output(state, node_id, edit["handle"], Value.from_json(edit["value"]))
        state = resume(state, backend, http_transport=transport)

    _log_records(state)
    print(canonical_json(final_outputs_json(state)), end="")
    if args.strict and any(r.status is NodeStatus.ERROR for r in state.records.values()):
        return EXIT_NODE_ERROR
    return EXIT_OK


def _prompt_answer(state) -> Any:
    pending = state.pending_interaction
    print(f"user action at {pending.node_id} ({pending.mode.value}):", file=sys.stderr)
    for i, item in enumerate(pending.candidates.as_items()):
        print(f"  [{i}] {item[:100]}", file=sys.stderr)
    raw = input("answer> ").strip()
    if pending.mode.value == "selectMany":
        return [int(p) for p in raw.split(",") if p.strip()]
    if pending.mode.value == "selectOne":
        return int(raw)
    return raw


def _prompt_edit(node_id: str) -> Any:
    raw = input(f"breakpoint at {node_id}; handle=value to edit or enter to continue> ").strip()
    if not raw or "=" not in raw:
        return {}
    handle, text = raw.split("=", 1)
    return {"handle": handle, "value": {"kind": "Text", "text": text}}


def _log_records(state) -> None:
    print(f"run {state.run_id}: {state.status.value}", file=sys.stderr)
    for record in state.records.values():
        preview = "; ".join(
            f"{h}={_preview(v)}" for h, v in sorted(record.output.items())
        )
        line = f"  {record.node_id:<24} {record.status.value:<8} {record.duration_ms:8.2f}ms  {preview}"
        if record.error_message:
            line += f"  !{record.error_message}"
        print(line, file=sys.stderr)


def _preview(v: Value) -> str:
    text = v.text if v.kind.value == "Text" else json.dumps(list(v.items))
    return text[:60] + ("…" if len(text) > 60 else "")


def _cmd_test_node(args: argparse.Namespace) -> int:
    chain_file = _load_file(args.file)
    node = chain_file.chain.get_node(args.node)
    if node is None:
        print(f"error: no node {args.node!r} in {args.file}", file=sys.stderr)
        return EXIT_USAGE
    backend, fixtures = _resolve_backend_arg(args.backend, chain_file.fixtures)
    fixtures = fixtures or Fixtures()
    transport = stub_transport(fixtures.api_stubs) if fixtures.api_stubs else None
    bindings = _parse_assignments(args.bind, "--bind")
    record = run_node_unit(node, bindings, backend, http_transport=transport)
    print(canonical_json(record.to_json()), end="")
    if args.strict and record.status is NodeStatus.ERROR:
        return EXIT_NODE_ERROR
    return EXIT_OK


def _cmd_gallery(args: argparse.Namespace) -> int:
    if args.gallery_command == "list":
        entries = [
            {"id": e.id, "title": e.title, "description": e.description} for e in list_gallery()
        ]
        print(canonical_json(entries), end="")
        return EXIT_OK
    try:
        entry = gallery_entry(args.id)
    except KeyError:
        print(f"error: no gallery entry {args.id!r}", file=sys.stderr)
        return EXIT_USAGE
    Path(args.path).write_text(serialize_chain_file(entry.chain_file), encoding="utf-8")
    print(f"wrote {args.path}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
