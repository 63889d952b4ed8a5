"""chainweaver: author, validate, execute, and debug LLM prompt chains."""

from .backends import (
    BackendError,
    EchoBackend,
    HttpBackend,
    LLMParams,
    LLMRequest,
    LLMResponse,
    ScriptedBackend,
    ScriptedRule,
)
from .builtins import BuiltinSpec, EvaluatorSpec
from .executor import (
    InputError,
    InvalidChainError,
    KindError,
    NodeRunRecord,
    RunState,
    RunStatus,
    StateError,
    answer_user_action,
    edit_node_output,
    resume,
    run_chain,
    run_node_unit,
)
from .gallery import GalleryEntry, gallery_entry, list_gallery, run_chain_file
from .model import (
    Chain,
    CycleError,
    Diagnostic,
    Edge,
    Handle,
    Node,
    NodeKind,
    Port,
    apply_template_edit,
    connect,
    disconnect,
    sync_handles,
    topo_order,
    validate_chain,
)
from .persistence import ChainFile, FormatError, deserialize, load_chain_file, serialize
from .template import PromptTemplate, diff_placeholders, parse_placeholders, render
from .values import Value, ValueKind

__version__ = "0.1.0"

__all__ = [
    "BackendError",
    "BuiltinSpec",
    "Chain",
    "ChainFile",
    "CycleError",
    "Diagnostic",
    "EchoBackend",
    "Edge",
    "EvaluatorSpec",
    "FormatError",
    "GalleryEntry",
    "Handle",
    "HttpBackend",
    "InputError",
    "InvalidChainError",
    "KindError",
    "LLMParams",
    "LLMRequest",
    "LLMResponse",
    "Node",
    "NodeKind",
    "NodeRunRecord",
    "Port",
    "PromptTemplate",
    "RunState",
    "RunStatus",
    "ScriptedBackend",
    "ScriptedRule",
    "StateError",
    "Value",
    "ValueKind",
    "answer_user_action",
    "apply_template_edit",
    "connect",
    "deserialize",
    "diff_placeholders",
    "disconnect",
    "edit_node_output",
    "gallery_entry",
    "list_gallery",
    "load_chain_file",
    "parse_placeholders",
    "render",
    "resume",
    "run_chain",
    "run_chain_file",
    "run_node_unit",
    "serialize",
    "sync_handles",
    "topo_order",
    "validate_chain",
]
