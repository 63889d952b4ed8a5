"""Prompt templates with ``[[name]]`` placeholders.

Parsing extracts the placeholder set that drives a node's input handles;
rendering substitutes bound text in a single pass. Malformed placeholder
syntax never fails a parse — it is left as literal text and surfaced as a
warning.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

PLACEHOLDER_RE = re.compile(r"\[\[([A-Za-z_][A-Za-z0-9_]*)\]\]")

# Any "[[" that does not open a well-formed placeholder token.
_MALFORMED_RE = re.compile(r"\[\[(?![A-Za-z_][A-Za-z0-9_]*\]\])")


class MissingBindingError(KeyError):
    """A placeholder had no bound value at render time."""

    def __init__(self, name: str) -> None:
        super().__init__(name)
        self.name = name

    def __str__(self) -> str:
        return f"no binding for placeholder [[{self.name}]]"


@dataclass(frozen=True)
class Placeholder:
    """One distinct placeholder: its name and the span of its first occurrence."""

    name: str
    start: int
    end: int


@dataclass(frozen=True)
class PromptTemplate:
    """Raw prompt text plus its extracted placeholders.

    ``placeholders`` lists each distinct name once, in first-occurrence
    order. Re-parsing ``raw`` reproduces the same tuple.
    """

    raw: str
    placeholders: tuple[Placeholder, ...] = ()
    warnings: tuple[str, ...] = ()

    def placeholder_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.placeholders)


@dataclass(frozen=True)
class PlaceholderDiff:
    """Difference between two templates' placeholder sets.

    When exactly one name was added and one removed, the change is
    reported as ``renamed`` and the added/removed lists stay empty;
    otherwise additions and removals are listed separately.
    """

    added: tuple[str, ...] = ()
    removed: tuple[str, ...] = ()
    renamed: tuple[str, str] | None = None

    def is_empty(self) -> bool:
        return not self.added and not self.removed and self.renamed is None


def parse_placeholders(raw: str) -> PromptTemplate:
    """Extract ``[[identifier]]`` placeholders from prompt text.

    Total function: malformed sequences (``[[``, ``[[9x]]``, unclosed
    tokens) stay literal and become warnings. Duplicate names collapse to
    the first occurrence.
    """
    seen: dict[str, Placeholder] = {}
    for m in PLACEHOLDER_RE.finditer(raw):
        name = m.group(1)
        if name not in seen:
            seen[name] = Placeholder(name=name, start=m.start(), end=m.end())
    warnings = tuple(
        f"malformed placeholder at offset {m.start()}" for m in _MALFORMED_RE.finditer(raw)
    )
    return PromptTemplate(raw=raw, placeholders=tuple(seen.values()), warnings=warnings)


def render(template: PromptTemplate, binding: dict[str, str]) -> str:
    """Replace every placeholder occurrence with its bound text.

    Substitution is literal and single-pass: text introduced by a binding
    is never re-scanned for placeholders.

    Raises:
        MissingBindingError: a placeholder name is absent from ``binding``.
    """
    for p in template.placeholders:
        if p.name not in binding:
            raise MissingBindingError(p.name)
    return PLACEHOLDER_RE.sub(lambda m: binding[m.group(1)], template.raw)


def diff_placeholders(old: PromptTemplate, new: PromptTemplate) -> PlaceholderDiff:
    """Report placeholder changes between two templates.

    A single-name swap is treated as a rename (the handle-sync mechanism
    preserves edges across it); anything larger is plain adds/removes.
    """
    old_names = old.placeholder_names()
    new_names = new.placeholder_names()
    added = tuple(n for n in new_names if n not in old_names)
    removed = tuple(n for n in old_names if n not in new_names)
    if len(added) == 1 and len(removed) == 1:
        return PlaceholderDiff(renamed=(removed[0], added[0]))
    return PlaceholderDiff(added=added, removed=removed)
