"""The sandboxed expression language: parser, evaluator, and its bounds."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chainweaver.scripting import (
    ArityError,
    BudgetExceededError,
    Call,
    FuncName,
    Lit,
    ListExpr,
    ParseError,
    ScriptTypeError,
    UnboundIdentifierError,
    UnknownFunctionError,
    Var,
    eval_script,
    free_vars,
    parse_script,
    pretty_print,
)
from chainweaver.values import Value


def ev(source: str, **inputs) -> Value:
    bound = {
        k: v if isinstance(v, Value) else (Value.of_list(v) if isinstance(v, list) else Value.of_text(v))
        for k, v in inputs.items()
    }
    return eval_script(parse_script(source), bound)


class TestParse:
    def test_call_with_literal_and_ident(self):
        program = parse_script('concat("Artist: ", query)')
        assert program.body == Call("concat", (Lit("Artist: "), Var("query")))

    def test_pipe_desugars_to_nested_calls(self):
        program = parse_script("text | trim() | upper()")
        assert program.body == Call("upper", (Call("trim", (Var("text"),)),))

    def test_pipe_roundtrips_through_pretty_print(self):
        program = parse_script("text | trim() | upper()")
        assert parse_script(pretty_print(program.body)).body == program.body

    def test_unknown_function(self):
        with pytest.raises(UnknownFunctionError):
            parse_script("bogus(x)")

    def test_arity_checked_at_parse(self):
        with pytest.raises(ArityError):
            parse_script('replace(x, "a")')

    def test_pipe_counts_toward_arity(self):
        parse_script('x | replace("a", "b")')  # 3 args with the piped one
        with pytest.raises(ArityError):
            parse_script('x | replace("a", "b", "c")')

    def test_map_function_name_argument(self):
        program = parse_script("map(items, upper)")
        assert program.body == Call("map", (Var("items"), FuncName("upper")))

    def test_map_rejects_non_function_second_arg(self):
        with pytest.raises(ParseError):
            parse_script('map(items, "upper")')
        with pytest.raises(UnknownFunctionError):
            parse_script("map(items, nonsense)")

    def test_list_literal(self):
        program = parse_script('["a", "b"]')
        assert program.body == ListExpr((Lit("a"), Lit("b")))

    def test_parse_error_carries_position(self):
        with pytest.raises(ParseError) as err:
            parse_script("concat(")
        assert err.value.position == 7

    def test_trailing_garbage_rejected(self):
        with pytest.raises(ParseError):
            parse_script("trim(x) extra")

    def test_string_escapes(self):
        assert parse_script(r'"a\nb\t\"\\"').body == Lit('a\nb\t"\\')

    def test_free_vars(self):
        program = parse_script('concat(a, join(items, ", "), b)')
        assert free_vars(program) == {"a", "items", "b"}
        assert free_vars(parse_script("map(items, upper)")) == {"items"}


class TestEval:
    def test_concat(self):
        assert ev('concat("song about ", query)', query="rain") == Value.of_text("song about rain")

    def test_split_pipe_length_stringifies(self):
        # hand-evaluated: "a, b, c" splits into three items, length prints "3"
        assert ev('split(names, ", ") | length()', names="a, b, c") == Value.of_text("3")

    def test_map_upper(self):
        assert ev("map(items, upper)", items=["x", "y"]) == Value.of_list(["X", "Y"])

    def test_map_with_extra_args(self):
        assert ev('map(items, replace, "a", "o")', items=["cat", "bat"]) == Value.of_list(
            ["cot", "bot"]
        )

    def test_slice_and_get_take_integer_strings(self):
        assert ev('slice(text, "2", "5")', text="abcdefg") == Value.of_text("cde")
        assert ev('slice(items, "1")', items=["a", "b", "c"]) == Value.of_list(["b", "c"])
        assert ev('get(items, "1")', items=["a", "b"]) == Value.of_text("b")

    def test_join_and_list_literals(self):
        assert ev('join(["x", y], "-")', y="z") == Value.of_text("x-z")

    def test_concat_lists(self):
        assert ev("concat(a, b)", a=["1"], b=["2", "3"]) == Value.of_list(["1", "2", "3"])

    def test_length_of_text_counts_characters(self):
        assert ev("length(text)", text="abcd") == Value.of_text("4")

    def test_regex_replace(self):
        assert ev('regexReplace(t, "[0-9]+", "#")', t="a1b22c") == Value.of_text("a#b#c")

    def test_unbound_identifier(self):
        with pytest.raises(UnboundIdentifierError):
            ev("trim(nope)")

    def test_type_errors(self):
        with pytest.raises(ScriptTypeError):
            ev("join(text, ', ')".replace("'", '"'), text="not a list")
        with pytest.raises(ScriptTypeError):
            ev("upper(items)", items=["a"])
        with pytest.raises(ScriptTypeError):
            ev('get(items, "5")', items=["a"])
        with pytest.raises(ScriptTypeError):
            ev("concat(a, b)", a="text", b=["list"])

    def test_budget_exceeded_on_huge_fanout(self):
        huge = "," * 1_000_001  # split -> 1,000,002 items, map applies per item
        with pytest.raises(BudgetExceededError):
            ev('map(split(t, ","), trim)', t=huge)

    def test_budget_allows_normal_sizes(self):
        assert ev('map(split(t, ","), trim)', t="a, b") == Value.of_list(["a", "b"])


class TestPrettyPrintRoundTrip:
    exprs = st.deferred(
        lambda: st.one_of(
            st.builds(Lit, st.text(alphabet='ab\n\t"\\', max_size=6)),
            st.builds(Var, st.from_regex(r"[a-z_][a-z0-9_]{0,5}", fullmatch=True)),
            st.builds(lambda els: ListExpr(tuple(els)), st.lists(TestPrettyPrintRoundTrip.leaf, max_size=3)),
            st.builds(
                lambda args: Call("concat", tuple(args)),
                st.lists(TestPrettyPrintRoundTrip.exprs, min_size=1, max_size=3),
            ),
            st.builds(lambda a: Call("trim", (a,)), TestPrettyPrintRoundTrip.exprs),
            st.builds(
                lambda l: Call("map", (l, FuncName("upper"))), TestPrettyPrintRoundTrip.exprs
            ),
        )
    )
    leaf = st.one_of(
        st.builds(Lit, st.text(alphabet="abc", max_size=4)),
        st.builds(Var, st.from_regex(r"[a-z]{1,4}", fullmatch=True)),
    )

    @given(exprs)
    def test_parse_of_pretty_print_is_identity(self, expr):
        assert parse_script(pretty_print(expr)).body == expr
