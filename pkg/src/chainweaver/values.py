"""Runtime values that flow along chain edges.

Two kinds only: a single piece of text, or an ordered list of texts.
Everything richer (API payloads, model samples) is reduced to these at
the node boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Iterable


class ValueKind(str, Enum):
    TEXT = "Text"
    TEXT_LIST = "TextList"


@dataclass(frozen=True)
class Value:
    """A datum on an edge. ``kind`` and payload always agree.

    Text carries ``text`` (empty string allowed); TextList carries
    ``items`` (may be empty). The unused payload field stays at its
    default so equality is structural.
    """

    kind: ValueKind
    text: str = ""
    items: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is ValueKind.TEXT and self.items:
            raise ValueError("Text value must not carry items")
        if self.kind is ValueKind.TEXT_LIST and self.text:
            raise ValueError("TextList value must not carry text")

    @staticmethod
    def of_text(text: str) -> Value:
        return Value(kind=ValueKind.TEXT, text=text)

    @staticmethod
    def of_list(items: Iterable[str]) -> Value:
        return Value(kind=ValueKind.TEXT_LIST, items=tuple(items))

    def as_items(self) -> tuple[str, ...]:
        """View as a list of items; Text becomes a singleton."""
        if self.kind is ValueKind.TEXT:
            return (self.text,)
        return self.items

    def to_json(self) -> dict[str, Any]:
        if self.kind is ValueKind.TEXT:
            return {"kind": "Text", "text": self.text}
        return {"kind": "TextList", "items": list(self.items)}

    @staticmethod
    def from_json(obj: Any) -> Value:
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError(f"not a value object: {obj!r}")
        kind = obj["kind"]
        if kind == "Text":
            text = obj.get("text", "")
            if not isinstance(text, str):
                raise ValueError("Text value requires a string 'text' field")
            return Value.of_text(text)
        if kind == "TextList":
            items = obj.get("items", [])
            if not isinstance(items, list) or any(not isinstance(i, str) for i in items):
                raise ValueError("TextList value requires a list of strings in 'items'")
            return Value.of_list(items)
        raise ValueError(f"unknown value kind: {kind!r}")
