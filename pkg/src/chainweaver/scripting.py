"""A small sandboxed expression language for user-defined text transforms.

Programs are single expressions over a closed set of string functions —
no variables, loops, conditionals, or I/O of any kind. Evaluation is
deterministic and bounded by a hard step budget, so a script node can
never hang or escape the engine.

Grammar::

    expr  := pipe
    pipe  := term { "|" call }
    term  := stringLit | ident | call | list
    call  := fname "(" [expr {"," expr}] ")"
    list  := "[" [expr {"," expr}] "]"

``|`` pipes the left value in as the first argument of the call on its
right. ``map(list, fname, extra...)`` applies a named function
element-wise; the second argument is always a bare function name.

The full function semantics table lives in docs/script-functions.md and
is bit-exact by contract: gallery fixtures depend on it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .values import Value, ValueKind

EVAL_BUDGET = 1_000_000


class ScriptError(Exception):
    """Base class for script parse and evaluation failures."""


class ParseError(ScriptError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownFunctionError(ParseError):
    def __init__(self, fname: str, position: int) -> None:
        super().__init__(f"unknown function '{fname}'", position)
        self.fname = fname


class ArityError(ParseError):
    def __init__(self, fname: str, got: int, position: int) -> None:
        super().__init__(f"wrong number of arguments for '{fname}' (got {got})", position)
        self.fname = fname


class UnboundIdentifierError(ScriptError):
    def __init__(self, name: str) -> None:
        super().__init__(f"unbound identifier '{name}'")
        self.name = name


class ScriptTypeError(ScriptError):
    """An operation was applied to a value of the wrong kind."""


class BudgetExceededError(ScriptError):
    def __init__(self) -> None:
        super().__init__(f"evaluation exceeded the {EVAL_BUDGET} step budget")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Lit:
    value: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class FuncName:
    """A bare function reference; only valid as map()'s second argument."""

    name: str


@dataclass(frozen=True)
class ListExpr:
    elements: tuple["Expr", ...]


@dataclass(frozen=True)
class Call:
    fname: str
    args: tuple["Expr", ...]


Expr = Union[Lit, Var, FuncName, ListExpr, Call]


@dataclass(frozen=True)
class ScriptProgram:
    source: str
    body: Expr


# fname -> (min arity, max arity or None for variadic)
FUNCTIONS: dict[str, tuple[int, int | None]] = {
    "concat": (1, None),
    "replace": (3, 3),
    "regexReplace": (3, 3),
    "split": (2, 2),
    "join": (2, 2),
    "trim": (1, 1),
    "upper": (1, 1),
    "lower": (1, 1),
    "slice": (2, 3),
    "length": (1, 1),
    "get": (2, 2),
    "map": (2, None),
}


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<punct>[()\[\],|])
    """,
    re.VERBOSE,
)

_ESCAPES = {"\\": "\\", '"': '"', "n": "\n", "t": "\t"}


@dataclass(frozen=True)
class _Token:
    kind: str  # string | ident | punct | eof
    text: str
    pos: int


def _unescape(literal: str, pos: int) -> str:
    # literal includes the surrounding quotes
    out: list[str] = []
    i = 1
    end = len(literal) - 1
    while i < end:
        c = literal[i]
        if c == "\\":
            esc = literal[i + 1]
            if esc not in _ESCAPES:
                raise ParseError(f"unsupported escape '\\{esc}'", pos + i)
            out.append(_ESCAPES[esc])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


def _tokenize(source: str) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    while i < len(source):
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", i)
        if m.lastgroup != "ws":
            tokens.append(_Token(kind=m.lastgroup or "", text=m.group(), pos=i))
        i = m.end()
    tokens.append(_Token(kind="eof", text="", pos=len(source)))
    return tokens


# ---------------------------------------------------------------------------
# Parser

class _Parser:
    def __init__(self, tokens: list[_Token]) -> None:
        self.tokens = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def next(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_punct(self, text: str) -> _Token:
        tok = self.next()
        if tok.kind != "punct" or tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.pos)
        return tok

    def parse_expr(self) -> Expr:
        left = self.parse_term()
        while self.peek().kind == "punct" and self.peek().text == "|":
            self.next()
            tok = self.peek()
            if tok.kind != "ident":
                raise ParseError("'|' must be followed by a function call", tok.pos)
            fname_tok = self.next()
            self.expect_punct("(")
            args = self.parse_args()
            left = _make_call(fname_tok.text, (left, *args), fname_tok.pos)
        return left

    def parse_term(self) -> Expr:
        tok = self.peek()
        if tok.kind == "string":
            self.next()
            return Lit(_unescape(tok.text, tok.pos))
        if tok.kind == "punct" and tok.text == "[":
            return self.parse_list()
        if tok.kind == "ident":
            self.next()
            if self.peek().kind == "punct" and self.peek().text == "(":
                self.next()
                args = self.parse_args()
                return _make_call(tok.text, args, tok.pos)
            return Var(tok.text)
        raise ParseError(f"unexpected token {tok.text or 'end of input'!r}", tok.pos)

    def parse_list(self) -> ListExpr:
        self.expect_punct("[")
        elements: list[Expr] = []
        if not (self.peek().kind == "punct" and self.peek().text == "]"):
            elements.append(self.parse_expr())
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.next()
                elements.append(self.parse_expr())
        self.expect_punct("]")
        return ListExpr(tuple(elements))

    def parse_args(self) -> tuple[Expr, ...]:
        # opening paren already consumed
        args: list[Expr] = []
        if not (self.peek().kind == "punct" and self.peek().text == ")"):
            args.append(self.parse_expr())
            while self.peek().kind == "punct" and self.peek().text == ",":
                self.next()
                args.append(self.parse_expr())
        self.expect_punct(")")
        return tuple(args)


def _make_call(fname: str, args: tuple[Expr, ...], pos: int) -> Call:
    if fname not in FUNCTIONS:
        raise UnknownFunctionError(fname, pos)
    lo, hi = FUNCTIONS[fname]
    if len(args) < lo or (hi is not None and len(args) > hi):
        raise ArityError(fname, len(args), pos)
    if fname == "map":
        func_arg = args[1]
        if isinstance(func_arg, Var):
            func_arg = FuncName(func_arg.name)
        if not isinstance(func_arg, FuncName):
            raise ParseError("map's second argument must be a function name", pos)
        if func_arg.name not in FUNCTIONS or func_arg.name == "map":
            raise UnknownFunctionError(func_arg.name, pos)
        args = (args[0], func_arg, *args[2:])
    return Call(fname, args)


def parse_script(source: str) -> ScriptProgram:
    """Parse a script source string into a program.

    Raises:
        ParseError: malformed syntax (position included).
        UnknownFunctionError: a call names a function outside the set.
        ArityError: a call has the wrong number of arguments.
    """
    parser = _Parser(_tokenize(source))
    body = parser.parse_expr()
    trailing = parser.peek()
    if trailing.kind != "eof":
        raise ParseError(f"unexpected trailing input {trailing.text!r}", trailing.pos)
    return ScriptProgram(source=source, body=body)


def free_vars(program: ScriptProgram) -> set[str]:
    """Names of node inputs the program reads."""
    out: set[str] = set()

    def walk(node: Expr) -> None:
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, ListExpr):
            for el in node.elements:
                walk(el)
        elif isinstance(node, Call):
            for a in node.args:
                walk(a)

    walk(program.body)
    return out


def pretty_print(expr: Expr) -> str:
    """Canonical source form; ``parse_script(pretty_print(e)).body == e``."""
    if isinstance(expr, Lit):
        escaped = expr.value.replace("\\", "\\\\").replace('"', '\\"')
        escaped = escaped.replace("\n", "\\n").replace("\t", "\\t")
        return f'"{escaped}"'
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, FuncName):
        return expr.name
    if isinstance(expr, ListExpr):
        return "[" + ", ".join(pretty_print(e) for e in expr.elements) + "]"
    if isinstance(expr, Call):
        return expr.fname + "(" + ", ".join(pretty_print(a) for a in expr.args) + ")"
    raise TypeError(f"not an expression node: {expr!r}")


# ---------------------------------------------------------------------------
# Evaluation

def eval_script(program: ScriptProgram, inputs: Mapping[str, Value]) -> Value:
    """Evaluate a program against bound node inputs.

    Raises:
        UnboundIdentifierError: the program reads a name not in ``inputs``.
        ScriptTypeError: a function received a value of the wrong kind.
        BudgetExceededError: more than EVAL_BUDGET evaluation steps.
    """
    return _Evaluator(inputs).eval(program.body)


class _Evaluator:
    def __init__(self, inputs: Mapping[str, Value]) -> None:
        self.inputs = inputs
        self.steps = 0

    def tick(self) -> None:
        self.steps += 1
        if self.steps > EVAL_BUDGET:
            raise BudgetExceededError()

    def eval(self, node: Expr) -> Value:
        self.tick()
        if isinstance(node, Lit):
            return Value.of_text(node.value)
        if isinstance(node, Var):
            if node.name not in self.inputs:
                raise UnboundIdentifierError(node.name)
            return self.inputs[node.name]
        if isinstance(node, ListExpr):
            items = [self._text(self.eval(el), "list element") for el in node.elements]
            return Value.of_list(items)
        if isinstance(node, Call):
            if node.fname == "map":
                return self._eval_map(node)
            args = [self.eval(a) for a in node.args]
            return self.apply(node.fname, args)
        if isinstance(node, FuncName):
            raise ScriptTypeError("a function name is not a value")
        raise TypeError(f"not an expression node: {node!r}")

    def _eval_map(self, node: Call) -> Value:
        items = self._list(self.eval(node.args[0]), "map")
        func = node.args[1]
        assert isinstance(func, FuncName)
        extras = [self.eval(a) for a in node.args[2:]]
        out: list[str] = []
        for item in items:
            result = self.apply(func.name, [Value.of_text(item), *extras])
            out.append(self._text(result, f"map({func.name})"))
        return Value.of_list(out)

    def apply(self, fname: str, args: list[Value]) -> Value:
        self.tick()
        impl = getattr(self, f"_fn_{fname}", None)
        if impl is None:
            raise ScriptTypeError(f"function '{fname}' cannot be applied here")
        return impl(args)

    # -- type helpers

    def _text(self, v: Value, where: str) -> str:
        if v.kind is not ValueKind.TEXT:
            raise ScriptTypeError(f"{where} expects text, got a list")
        return v.text

    def _list(self, v: Value, where: str) -> tuple[str, ...]:
        if v.kind is not ValueKind.TEXT_LIST:
            raise ScriptTypeError(f"{where} expects a list, got text")
        return v.items

    def _int(self, v: Value, where: str) -> int:
        raw = self._text(v, where).strip()
        try:
            return int(raw)
        except ValueError:
            raise ScriptTypeError(f"{where} expects an integer string, got {raw!r}") from None

    # -- function implementations

    def _fn_concat(self, args: list[Value]) -> Value:
        if all(a.kind is ValueKind.TEXT for a in args):
            return Value.of_text("".join(a.text for a in args))
        if all(a.kind is ValueKind.TEXT_LIST for a in args):
            items: list[str] = []
            for a in args:
                items.extend(a.items)
            return Value.of_list(items)
        raise ScriptTypeError("concat arguments must be all text or all lists")

    def _fn_replace(self, args: list[Value]) -> Value:
        text = self._text(args[0], "replace")
        old = self._text(args[1], "replace")
        new = self._text(args[2], "replace")
        if old == "":
            raise ScriptTypeError("replace needs a non-empty search string")
        return Value.of_text(text.replace(old, new))

    def _fn_regexReplace(self, args: list[Value]) -> Value:
        text = self._text(args[0], "regexReplace")
        pattern = self._text(args[1], "regexReplace")
        repl = self._text(args[2], "regexReplace")
        try:
            return Value.of_text(re.sub(pattern, repl, text))
        except re.error as exc:
            raise ScriptTypeError(f"bad regex in regexReplace: {exc}") from None

    def _fn_split(self, args: list[Value]) -> Value:
        text = self._text(args[0], "split")
        sep = self._text(args[1], "split")
        if sep == "":
            raise ScriptTypeError("split needs a non-empty separator")
        return Value.of_list(text.split(sep))

    def _fn_join(self, args: list[Value]) -> Value:
        items = self._list(args[0], "join")
        sep = self._text(args[1], "join")
        return Value.of_text(sep.join(items))

    def _fn_trim(self, args: list[Value]) -> Value:
        return Value.of_text(self._text(args[0], "trim").strip())

    def _fn_upper(self, args: list[Value]) -> Value:
        return Value.of_text(self._text(args[0], "upper").upper())

    def _fn_lower(self, args: list[Value]) -> Value:
        return Value.of_text(self._text(args[0], "lower").lower())

    def _fn_slice(self, args: list[Value]) -> Value:
        start = self._int(args[1], "slice")
        end = self._int(args[2], "slice") if len(args) > 2 else None
        v = args[0]
        if v.kind is ValueKind.TEXT:
            return Value.of_text(v.text[start:end])
        return Value.of_list(v.items[start:end])

    def _fn_length(self, args: list[Value]) -> Value:
        v = args[0]
        n = len(v.items) if v.kind is ValueKind.TEXT_LIST else len(v.text)
        return Value.of_text(str(n))

    def _fn_get(self, args: list[Value]) -> Value:
        items = self._list(args[0], "get")
        index = self._int(args[1], "get")
        try:
            return Value.of_text(items[index])
        except IndexError:
            raise ScriptTypeError(f"get index {index} out of range for {len(items)} items") from None
