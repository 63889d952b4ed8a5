"""Pre-implemented data transforms and output evaluators.

Processing nodes wrap one of the builtin transforms below; Evaluation
nodes wrap an :class:`EvaluatorSpec` that filters or re-ranks a list of
candidate outputs against a deterministic predicate. All functions here
are pure and total over their declared input kinds.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Union

from .values import Value, ValueKind

# ---------------------------------------------------------------------------
# Processing builtins

SPLIT_BY_NUMBER = "splitByNumber"
SPLIT_BY_SEPARATOR = "splitBySeparator"
JOIN_WITH_SEPARATOR = "joinWithSeparator"
APPEND_TEXT = "appendText"
PREPEND_TEXT = "prependText"
REGEX_EXTRACT = "regexExtract"
TRIM_WHITESPACE = "trimWhitespace"

# builtin -> (input kind, output kind)
BUILTIN_SIGNATURES: dict[str, tuple[ValueKind, ValueKind]] = {
    SPLIT_BY_NUMBER: (ValueKind.TEXT, ValueKind.TEXT_LIST),
    SPLIT_BY_SEPARATOR: (ValueKind.TEXT, ValueKind.TEXT_LIST),
    JOIN_WITH_SEPARATOR: (ValueKind.TEXT_LIST, ValueKind.TEXT),
    APPEND_TEXT: (ValueKind.TEXT, ValueKind.TEXT),
    PREPEND_TEXT: (ValueKind.TEXT, ValueKind.TEXT),
    REGEX_EXTRACT: (ValueKind.TEXT, ValueKind.TEXT),
    TRIM_WHITESPACE: (ValueKind.TEXT, ValueKind.TEXT),
}


@dataclass(frozen=True)
class BuiltinSpec:
    """A builtin transform plus its parameters.

    Only the fields relevant to ``name`` are meaningful; the rest stay at
    their defaults and are omitted from serialized form.
    """

    name: str
    separator: str = ""
    suffix: str = ""
    prefix: str = ""
    pattern: str = ""
    group: int = 0


# A numbered marker like "1)" or "2." at the start of the string or of a
# whitespace-delimited token. LLM list output is the target, so markers
# glued mid-word are deliberately not split points.
_NUMBER_MARKER_RE = re.compile(r"(?:^|(?<=\s))\d+[).]\s*")


def split_by_number(text: str) -> list[str]:
    """Split numbered-list text like ``1) a 2) b`` into its items.

    Items are trimmed, empty items dropped, and any preamble before the
    first marker discarded. Without any marker the trimmed text comes
    back as a singleton (or nothing, when blank).
    """
    markers = list(_NUMBER_MARKER_RE.finditer(text))
    if not markers:
        trimmed = text.strip()
        return [trimmed] if trimmed else []
    items = []
    for i, m in enumerate(markers):
        end = markers[i + 1].start() if i + 1 < len(markers) else len(text)
        item = text[m.end():end].strip()
        if item:
            items.append(item)
    return items


def split_by_separator(text: str, separator: str) -> list[str]:
    # verbatim split so join(split(s)) round-trips
    return text.split(separator)


def join_with_separator(items: list[str] | tuple[str, ...], separator: str) -> str:
    return separator.join(items)


def append_text(text: str, suffix: str) -> str:
    return text + suffix


def prepend_text(text: str, prefix: str) -> str:
    return prefix + text


def regex_extract(text: str, pattern: str, group: int) -> str:
    """First match's group, or empty text when nothing matches."""
    m = re.search(pattern, text)
    if m is None:
        return ""
    return m.group(group) or ""


def trim_whitespace(text: str) -> str:
    return text.strip()


def validate_builtin(spec: BuiltinSpec) -> list[str]:
    """Parameter problems for a builtin spec, empty when fine."""
    problems: list[str] = []
    if spec.name not in BUILTIN_SIGNATURES:
        return [f"unknown builtin '{spec.name}'"]
    if spec.name in (SPLIT_BY_SEPARATOR, JOIN_WITH_SEPARATOR) and spec.separator == "":
        problems.append(f"{spec.name} requires a non-empty separator")
    if spec.name == REGEX_EXTRACT:
        try:
            compiled = re.compile(spec.pattern)
        except re.error as exc:
            problems.append(f"regexExtract pattern does not compile: {exc}")
        else:
            if not (0 <= spec.group <= compiled.groups):
                problems.append(
                    f"regexExtract group {spec.group} out of range (pattern has {compiled.groups})"
                )
    return problems


def apply_builtin(spec: BuiltinSpec, value: Value) -> Value:
    """Run a builtin transform on a value of its declared input kind."""
    in_kind, _ = BUILTIN_SIGNATURES[spec.name]
    if value.kind is not in_kind:
        raise ValueError(f"{spec.name} expects {in_kind.value}, got {value.kind.value}")
    if spec.name == SPLIT_BY_NUMBER:
        return Value.of_list(split_by_number(value.text))
    if spec.name == SPLIT_BY_SEPARATOR:
        return Value.of_list(split_by_separator(value.text, spec.separator))
    if spec.name == JOIN_WITH_SEPARATOR:
        return Value.of_text(join_with_separator(value.items, spec.separator))
    if spec.name == APPEND_TEXT:
        return Value.of_text(append_text(value.text, spec.suffix))
    if spec.name == PREPEND_TEXT:
        return Value.of_text(prepend_text(value.text, spec.prefix))
    if spec.name == REGEX_EXTRACT:
        return Value.of_text(regex_extract(value.text, spec.pattern, spec.group))
    if spec.name == TRIM_WHITESPACE:
        return Value.of_text(trim_whitespace(value.text))
    raise ValueError(f"unknown builtin '{spec.name}'")


# ---------------------------------------------------------------------------
# Evaluators

@dataclass(frozen=True)
class RegexMatchPredicate:
    pattern: str


@dataclass(frozen=True)
class BlocklistScorePredicate:
    words: tuple[str, ...]
    threshold: float  # fraction of item words allowed to be blocklisted, exclusive


@dataclass(frozen=True)
class LengthBoundsPredicate:
    min_chars: int
    max_chars: int


Predicate = Union[RegexMatchPredicate, BlocklistScorePredicate, LengthBoundsPredicate]


@dataclass(frozen=True)
class FilterMode:
    pass


@dataclass(frozen=True)
class RankTopKMode:
    k: int


EvaluatorMode = Union[FilterMode, RankTopKMode]


@dataclass(frozen=True)
class EvaluatorSpec:
    predicate: Predicate
    mode: EvaluatorMode


def _item_words(item: str) -> list[str]:
    return [w.strip(string.punctuation).lower() for w in item.split()]


def blocklist_score(item: str, words: tuple[str, ...]) -> float:
    """Fraction of the item's words that appear on the blocklist."""
    tokens = [w for w in _item_words(item) if w]
    if not tokens:
        return 0.0
    blocked = {w.lower() for w in words}
    hits = sum(1 for t in tokens if t in blocked)
    return hits / len(tokens)


def predicate_passes(predicate: Predicate, item: str) -> bool:
    if isinstance(predicate, RegexMatchPredicate):
        return re.search(predicate.pattern, item) is not None
    if isinstance(predicate, BlocklistScorePredicate):
        return blocklist_score(item, predicate.words) < predicate.threshold
    if isinstance(predicate, LengthBoundsPredicate):
        return predicate.min_chars <= len(item) <= predicate.max_chars
    raise TypeError(f"unknown predicate: {predicate!r}")


def _rank_key(predicate: Predicate, item: str) -> float:
    # Lower key = better. Blocklist: safest (lowest score) first.
    # Length bounds: closest to the midpoint first. Regex: matches first.
    if isinstance(predicate, BlocklistScorePredicate):
        return blocklist_score(item, predicate.words)
    if isinstance(predicate, LengthBoundsPredicate):
        midpoint = (predicate.min_chars + predicate.max_chars) / 2
        return abs(len(item) - midpoint)
    if isinstance(predicate, RegexMatchPredicate):
        return 0.0 if re.search(predicate.pattern, item) else 1.0
    raise TypeError(f"unknown predicate: {predicate!r}")


def evaluate_filter(items: list[str] | tuple[str, ...], evaluator: EvaluatorSpec) -> tuple[list[str], list[str]]:
    """Order-preserving partition of items into (passed, rejected)."""
    passed: list[str] = []
    rejected: list[str] = []
    for item in items:
        (passed if predicate_passes(evaluator.predicate, item) else rejected).append(item)
    return passed, rejected


def evaluate_rank(items: list[str] | tuple[str, ...], evaluator: EvaluatorSpec) -> list[str]:
    """Best-first stable ordering, truncated to the mode's k."""
    assert isinstance(evaluator.mode, RankTopKMode)
    ranked = sorted(items, key=lambda item: _rank_key(evaluator.predicate, item))
    return ranked[: evaluator.mode.k]


def validate_evaluator(evaluator: EvaluatorSpec) -> list[str]:
    """Configuration problems for an evaluator, empty when fine."""
    problems: list[str] = []
    p = evaluator.predicate
    if isinstance(p, RegexMatchPredicate):
        try:
            re.compile(p.pattern)
        except re.error as exc:
            problems.append(f"regexMatch pattern does not compile: {exc}")
    elif isinstance(p, BlocklistScorePredicate):
        if not (0.0 <= p.threshold <= 1.0):
            problems.append(f"blocklistScore threshold must be in [0, 1], got {p.threshold}")
    elif isinstance(p, LengthBoundsPredicate):
        if p.min_chars < 0 or p.min_chars > p.max_chars:
            problems.append(f"lengthBounds requires 0 <= min <= max, got ({p.min_chars}, {p.max_chars})")
    else:
        problems.append(f"unknown predicate: {p!r}")
    if isinstance(evaluator.mode, RankTopKMode) and evaluator.mode.k < 1:
        problems.append(f"rankTopK requires k >= 1, got {evaluator.mode.k}")
    return problems
