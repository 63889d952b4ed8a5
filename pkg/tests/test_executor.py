"""Executor semantics: value flow, fan-out, routing, pausing, editing."""

from __future__ import annotations

import pytest

from chainweaver.backends import (
    EchoBackend,
    LLMParams,
    PrefixMatcher,
    RegexMatcher,
    ScriptedBackend,
    ScriptedRule,
)
from chainweaver.builtins import BlocklistScorePredicate, BuiltinSpec, EvaluatorSpec, FilterMode
from chainweaver.executor import (
    InputError,
    InvalidChainError,
    KindError,
    NodeStatus,
    RunStatus,
    StateError,
    answer_user_action,
    edit_node_output,
    final_outputs_json,
    resume,
    run_chain,
    run_node_unit,
)
from chainweaver.model import (
    Chain,
    Edge,
    HttpMethod,
    Port,
    UserActionMode,
    api_call_node,
    classifier_node,
    data_input_node,
    evaluation_node,
    llm_node,
    processing_node,
    script_node,
    user_action_node,
)
from chainweaver.values import Value
from conftest import normalized_records, run_to_completion


def chain_of(*nodes, edges=()) -> Chain:
    return Chain(id="t", name="t", nodes=tuple(nodes), edges=tuple(edges))


def edge(sn, sh, tn, th) -> Edge:
    return Edge(source=Port(sn, sh), target=Port(tn, th))


class TestBasicFlow:
    def test_single_data_input(self):
        chain = chain_of(data_input_node("d", Value.of_text("x")))
        state = run_chain(chain, {}, (), None)
        assert state.status is RunStatus.DONE
        assert state.records["d"].output == {"output": Value.of_text("x")}

    def test_text_to_text_binding(self):
        chain = chain_of(
            data_input_node("d", Value.of_text(" padded ")),
            processing_node("p", BuiltinSpec(name="trimWhitespace")),
            edges=(edge("d", "output", "p", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["p"].output["output"] == Value.of_text("padded")

    def test_text_coerces_to_singleton_list(self):
        chain = chain_of(
            data_input_node("d", Value.of_text("only")),
            processing_node("j", BuiltinSpec(name="joinWithSeparator", separator="+")),
            edges=(edge("d", "output", "j", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["j"].output["output"] == Value.of_text("only")
        assert state.records["j"].inputs["input"] == Value.of_text("only")

    def test_list_to_list_binding(self):
        chain = chain_of(
            data_input_node("d", Value.of_list(["a", "b"])),
            processing_node("j", BuiltinSpec(name="joinWithSeparator", separator="+")),
            edges=(edge("d", "output", "j", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["j"].output["output"] == Value.of_text("a+b")

    def test_chain_inputs_bind_unconnected_handles(self):
        chain = chain_of(llm_node("l", "say [[x]]"))
        state = run_chain(chain, {"x": Value.of_text("hi")}, (), EchoBackend())
        assert state.records["l"].output["output"] == Value.of_text("say hi")

    def test_node_scoped_chain_input_key_wins(self):
        chain = chain_of(llm_node("l", "say [[x]]"))
        state = run_chain(
            chain,
            {"l.x": Value.of_text("scoped"), "x": Value.of_text("bare")},
            (),
            EchoBackend(),
        )
        assert state.records["l"].output["output"] == Value.of_text("say scoped")

    def test_missing_chain_input_raises(self):
        chain = chain_of(llm_node("l", "say [[x]]"))
        with pytest.raises(InputError):
            run_chain(chain, {}, (), EchoBackend())

    def test_invalid_chain_rejected(self):
        n = data_input_node("dup", Value.of_text("x"))
        with pytest.raises(InvalidChainError):
            run_chain(chain_of(n, n), {}, (), None)

    def test_unknown_breakpoint_rejected(self):
        chain = chain_of(data_input_node("d", Value.of_text("x")))
        with pytest.raises(InputError):
            run_chain(chain, {}, ("ghost",), None)

    def test_data_input_override_by_node_id(self):
        chain = chain_of(data_input_node("d", Value.of_text("default")))
        state = run_chain(chain, {"d": Value.of_text("override")}, (), None)
        assert state.records["d"].output["output"] == Value.of_text("override")

    def test_determinism_modulo_run_id_and_duration(self):
        chain = chain_of(
            data_input_node("d", Value.of_text("1) a 2) b")),
            processing_node("s", BuiltinSpec(name="splitByNumber")),
            llm_node("l", "item [[x]]"),
            edges=(edge("d", "output", "s", "input"), edge("s", "output", "l", "x")),
        )
        s1 = run_chain(chain, {}, (), EchoBackend())
        s2 = run_chain(chain, {}, (), EchoBackend())
        assert normalized_records(s1) == normalized_records(s2)


class TestFanOut:
    def test_fanout_with_lineage(self):
        chain = chain_of(
            data_input_node("src", Value.of_list(["a", "b", "c"])),
            script_node("up", "upper(x)"),
            edges=(edge("src", "output", "up", "x"),),
        )
        state = run_chain(chain, {}, (), None)
        record = state.records["up"]
        assert record.output["output"] == Value.of_list(["A", "B", "C"])
        assert [(e.item_index, e.source_node, e.source_item) for e in record.item_lineage] == [
            (0, "src", 0),
            (1, "src", 1),
            (2, "src", 2),
        ]

    def test_zip_pairing_of_two_lists(self):
        chain = chain_of(
            data_input_node("l1", Value.of_list(["a", "b"])),
            data_input_node("l2", Value.of_list(["1", "2"])),
            script_node("z", 'concat(x, "-", y)'),
            edges=(edge("l1", "output", "z", "x"), edge("l2", "output", "z", "y")),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["z"].output["output"] == Value.of_list(["a-1", "b-2"])

    def test_zip_length_mismatch_is_node_error(self):
        chain = chain_of(
            data_input_node("l1", Value.of_list(["a", "b"])),
            data_input_node("l2", Value.of_list(["1"])),
            script_node("z", "concat(x, y)"),
            edges=(edge("l1", "output", "z", "x"), edge("l2", "output", "z", "y")),
        )
        state = run_chain(chain, {}, (), None)
        record = state.records["z"]
        assert record.status is NodeStatus.ERROR
        assert "length" in (record.error_message or "")
        assert state.status is RunStatus.FAILED

    def test_scalar_rides_along_fanout(self):
        chain = chain_of(
            data_input_node("items", Value.of_list(["a", "b"])),
            data_input_node("tag", Value.of_text("T")),
            script_node("z", "concat(tag, x)"),
            edges=(edge("items", "output", "z", "x"), edge("tag", "output", "z", "tag")),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["z"].output["output"] == Value.of_list(["Ta", "Tb"])

    def test_empty_list_fans_out_to_zero_runs(self):
        chain = chain_of(
            data_input_node("src", Value.of_list([])),
            script_node("up", "upper(x)"),
            edges=(edge("src", "output", "up", "x"),),
        )
        state = run_chain(chain, {}, (), None)
        record = state.records["up"]
        assert record.status is NodeStatus.SUCCESS
        assert record.output["output"] == Value.of_list([])

    def test_per_item_list_outputs_flatten_with_lineage(self):
        chain = chain_of(
            data_input_node("src", Value.of_list(["1) a 2) b", "1) c"])),
            processing_node("s", BuiltinSpec(name="splitByNumber")),
            edges=(edge("src", "output", "s", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        record = state.records["s"]
        assert record.output["output"] == Value.of_list(["a", "b", "c"])
        assert [(e.item_index, e.source_item) for e in record.item_lineage] == [
            (0, 0),
            (1, 0),
            (2, 1),
        ]

    def test_multi_sample_llm_gives_list(self):
        chain = chain_of(llm_node("l", "gen [[x]]", params=LLMParams(n_samples=2)))
        state = run_chain(chain, {"x": Value.of_text("hi")}, (), EchoBackend())
        assert state.records["l"].output["output"] == Value.of_list(["gen hi #1", "gen hi #2"])


def routing_chain(default_label=None) -> Chain:
    return chain_of(
        data_input_node("items", Value.of_list(["apple pie", "tax form", "beach day"])),
        classifier_node(
            "clf",
            "Is it fun? [[thing]]\nLabel:",
            labels=("fun", "boring"),
            payload_input="thing",
            default_label=default_label,
        ),
        processing_node("fun_join", BuiltinSpec(name="joinWithSeparator", separator=" & ")),
        processing_node("boring_join", BuiltinSpec(name="joinWithSeparator", separator=" & ")),
        edges=(
            edge("items", "output", "clf", "thing"),
            edge("clf", "fun", "fun_join", "input"),
            edge("clf", "boring", "boring_join", "input"),
        ),
    )


def routing_backend():
    return ScriptedBackend(
        [
            ScriptedRule(matcher=RegexMatcher(r"fun\? apple pie"), responses=("fun",)),
            ScriptedRule(matcher=RegexMatcher(r"fun\? tax form"), responses=("boring",)),
            ScriptedRule(matcher=RegexMatcher(r"fun\? beach day"), responses=(" Fun!",)),
        ]
    )


class TestClassifierRouting:
    def test_items_partition_across_branches(self):
        state = run_chain(routing_chain(), {}, (), routing_backend())
        clf = state.records["clf"]
        # " Fun!" normalizes (trim, lowercase, strip trailing punctuation) to "fun"
        assert clf.output["fun"] == Value.of_list(["apple pie", "beach day"])
        assert clf.output["boring"] == Value.of_list(["tax form"])
        assert clf.error_message is None
        assert state.records["fun_join"].output["output"] == Value.of_text("apple pie & beach day")

    def test_unmatched_items_counted_not_routed(self):
        backend = ScriptedBackend(
            [
                ScriptedRule(matcher=RegexMatcher(r"fun\? apple pie"), responses=("fun",)),
                ScriptedRule(matcher=PrefixMatcher(""), responses=("dunno",)),
            ]
        )
        state = run_chain(routing_chain(), {}, (), backend)
        clf = state.records["clf"]
        assert clf.status is NodeStatus.SUCCESS
        assert clf.output["fun"] == Value.of_list(["apple pie"])
        assert "boring" not in clf.output
        assert clf.error_message == "unmatched: dunno; unmatched: dunno"
        # the branch that received nothing is skipped downstream
        assert state.records["boring_join"].status is NodeStatus.SKIPPED
        assert state.status is RunStatus.DONE

    def test_default_label_catches_unmatched(self):
        backend = ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("???",))])
        state = run_chain(routing_chain(default_label="boring"), {}, (), backend)
        clf = state.records["clf"]
        assert clf.error_message is None
        assert clf.output["boring"] == Value.of_list(["apple pie", "tax form", "beach day"])

    def test_single_item_routes_as_text(self):
        chain = chain_of(
            data_input_node("q", Value.of_text("hello")),
            classifier_node("clf", "greeting? [[q]]", labels=("yes", "no"), payload_input="q"),
            edges=(edge("q", "output", "clf", "q"),),
        )
        backend = ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("yes",))])
        state = run_chain(chain, {}, (), backend)
        assert state.records["clf"].output == {"yes": Value.of_text("hello")}

    def test_partition_invariant_under_fuzz(self, rng):
        from conftest import HashClassifierBackend

        node = classifier_node("clf", "route [[x]]", labels=("a", "b", "c"), payload_input="x")
        backend = HashClassifierBackend(("a", "b", "c"), miss_every=1)
        for _ in range(40):
            count = rng.randint(0, 40)
            items = [f"item-{rng.randrange(1000)}" for _ in range(count)]
            record = run_node_unit(node, {"x": Value.of_list(items)}, backend)
            routed = sum(len(v.items) for v in record.output.values())
            unmatched = (record.error_message or "").count("unmatched:")
            assert routed + unmatched == count
            # each routed item carries exactly one lineage entry back to its source
            assert len(record.item_lineage) == routed
            source_items = sorted(e.source_item for e in record.item_lineage)
            assert len(set(source_items)) == len(source_items)


class TestSkipsAndErrors:
    def test_error_skips_descendants_but_not_siblings(self):
        chain = chain_of(
            data_input_node("a", Value.of_list(["x", "y"])),
            data_input_node("b", Value.of_list(["1"])),
            script_node("bad", "concat(p, q)"),
            processing_node("after_bad", BuiltinSpec(name="joinWithSeparator", separator=",")),
            processing_node("sibling", BuiltinSpec(name="joinWithSeparator", separator=",")),
            edges=(
                edge("a", "output", "bad", "p"),
                edge("b", "output", "bad", "q"),
                edge("bad", "output", "after_bad", "input"),
                edge("a", "output", "sibling", "input"),
            ),
        )
        state = run_chain(chain, {}, (), None)
        assert state.records["bad"].status is NodeStatus.ERROR
        assert state.records["after_bad"].status is NodeStatus.SKIPPED
        assert state.records["sibling"].status is NodeStatus.SUCCESS
        assert state.status is RunStatus.FAILED

    def test_skipped_nodes_have_no_output(self):
        state = run_chain(
            routing_chain(),
            {},
            (),
            ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("nope",))]),
        )
        skipped = [r for r in state.records.values() if r.status is NodeStatus.SKIPPED]
        assert skipped and all(r.output == {} for r in skipped)

    def test_skip_propagates_transitively(self):
        chain = chain_of(
            data_input_node("q", Value.of_text("x")),
            classifier_node("clf", "c [[q]]", labels=("a", "b"), payload_input="q"),
            processing_node("first", BuiltinSpec(name="trimWhitespace")),
            processing_node("second", BuiltinSpec(name="trimWhitespace")),
            edges=(
                edge("q", "output", "clf", "q"),
                edge("clf", "a", "first", "input"),
                edge("first", "output", "second", "input"),
            ),
        )
        backend = ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("b",))])
        state = run_chain(chain, {}, (), backend)
        assert state.records["first"].status is NodeStatus.SKIPPED
        assert state.records["second"].status is NodeStatus.SKIPPED


class TestBreakpoints:
    def make_chain(self):
        return chain_of(
            data_input_node("d", Value.of_text("1) a 2) b")),
            processing_node("split", BuiltinSpec(name="splitByNumber")),
            script_node("up", "upper(x)"),
            processing_node("join", BuiltinSpec(name="joinWithSeparator", separator="+")),
            edges=(
                edge("d", "output", "split", "input"),
                edge("split", "output", "up", "x"),
                edge("up", "output", "join", "input"),
            ),
        )

    def test_pause_after_breakpointed_node(self):
        state = run_chain(self.make_chain(), {}, ("split",), None)
        assert state.status is RunStatus.PAUSED_AT_BREAKPOINT
        assert state.paused_node_id == "split"
        assert "split" in state.records and "up" not in state.records

    def test_resume_without_edits_is_transparent(self):
        plain = run_chain(self.make_chain(), {}, (), None)
        paused = run_to_completion(self.make_chain(), {}, ("split", "up"), None)
        assert normalized_records(plain) == normalized_records(paused)

    def test_resume_on_done_run_raises(self):
        state = run_chain(self.make_chain(), {}, (), None)
        with pytest.raises(StateError):
            resume(state, None)

    def test_edit_changes_only_descendants(self):
        baseline = run_chain(self.make_chain(), {}, (), None)
        state = run_chain(self.make_chain(), {}, ("split",), None)
        edit_node_output(state, "split", "output", Value.of_list(["z"]))
        state = resume(state, None)
        assert state.status is RunStatus.DONE
        base = normalized_records(baseline)
        edited = normalized_records(state)
        assert edited["d"] == base["d"]
        assert edited["split"] != base["split"]
        assert edited["split"]["edited"] is True
        assert edited["up"]["output"]["output"] == {"kind": "TextList", "items": ["Z"]}
        assert edited["join"]["output"]["output"] == {"kind": "Text", "text": "Z"}

    def test_edit_requires_pause(self):
        state = run_chain(self.make_chain(), {}, (), None)
        with pytest.raises(StateError):
            edit_node_output(state, "split", "output", Value.of_list(["z"]))

    def test_edit_kind_checked_against_effective_kind(self):
        state = run_chain(self.make_chain(), {}, ("split",), None)
        with pytest.raises(KindError):
            edit_node_output(state, "split", "output", Value.of_text("not a list"))

    def test_edit_identical_value_keeps_downstream_equal(self):
        baseline = run_chain(self.make_chain(), {}, (), None)
        state = run_chain(self.make_chain(), {}, ("split",), None)
        current = state.records["split"].output["output"]
        edit_node_output(state, "split", "output", current)
        state = resume(state, None)
        base = normalized_records(baseline)
        edited = normalized_records(state)
        for node_id in ("d", "up", "join"):
            assert edited[node_id] == base[node_id]

    def test_edit_error_node_recovers_downstream(self):
        chain = chain_of(
            data_input_node("a", Value.of_list(["x", "y"])),
            data_input_node("b", Value.of_list(["1"])),
            script_node("bad", "concat(p, q)"),
            processing_node("after", BuiltinSpec(name="joinWithSeparator", separator=",")),
            edges=(
                edge("a", "output", "bad", "p"),
                edge("b", "output", "bad", "q"),
                edge("bad", "output", "after", "input"),
            ),
        )
        state = run_chain(chain, {}, ("bad",), None)
        assert state.status is RunStatus.PAUSED_AT_BREAKPOINT
        assert state.records["bad"].status is NodeStatus.ERROR
        edit_node_output(state, "bad", "output", Value.of_text("fixed"))
        state = resume(state, None)
        assert state.status is RunStatus.DONE
        assert state.records["after"].output["output"] == Value.of_text("fixed")

    def test_classifier_unmatched_then_edit_takes_branch(self):
        backend = ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("???",))])
        chain = chain_of(
            data_input_node("q", Value.of_text("play country")),
            classifier_node("clf", "music? [[q]]", labels=("is_music", "not_music"), payload_input="q"),
            processing_node("music_step", BuiltinSpec(name="prependText", prefix="♪ ")),
            edges=(edge("q", "output", "clf", "q"), edge("clf", "is_music", "music_step", "input")),
        )
        state = run_chain(chain, {}, ("clf",), backend)
        assert state.records["clf"].output == {}
        edit_node_output(state, "clf", "is_music", Value.of_text("play country"))
        state = resume(state, backend)
        assert state.records["music_step"].status is NodeStatus.SUCCESS
        assert state.records["music_step"].output["output"] == Value.of_text("♪ play country")


class TestUserActions:
    def story_chain(self):
        return chain_of(
            data_input_node("cands", Value.of_list(["spine a", "spine b", "spine c"])),
            user_action_node("pick", UserActionMode.SELECT_ONE),
            processing_node("shout", BuiltinSpec(name="appendText", suffix="!")),
            edges=(edge("cands", "output", "pick", "input"), edge("pick", "output", "shout", "input")),
        )

    def test_run_awaits_user_action(self):
        state = run_chain(self.story_chain(), {}, (), None)
        assert state.status is RunStatus.AWAITING_USER_ACTION
        assert state.pending_interaction.node_id == "pick"
        assert state.pending_interaction.candidates == Value.of_list(
            ["spine a", "spine b", "spine c"]
        )

    def test_select_one_picks_item(self):
        state = run_chain(self.story_chain(), {}, (), None)
        answer_user_action(state, "pick", 1)
        state = resume(state, None)
        assert state.status is RunStatus.DONE
        assert state.records["pick"].output["output"] == Value.of_text("spine b")
        assert state.records["shout"].output["output"] == Value.of_text("spine b!")

    def test_select_out_of_range(self):
        state = run_chain(self.story_chain(), {}, (), None)
        with pytest.raises(IndexError):
            answer_user_action(state, "pick", 7)

    def test_select_many_keeps_input_order(self):
        chain = chain_of(
            data_input_node("cands", Value.of_list(["a", "b", "c"])),
            user_action_node("pick", UserActionMode.SELECT_MANY),
            edges=(edge("cands", "output", "pick", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        answer_user_action(state, "pick", [2, 0, 2])
        state = resume(state, None)
        assert state.records["pick"].output["output"] == Value.of_list(["a", "c"])

    def test_select_many_all_is_identity(self):
        chain = chain_of(
            data_input_node("cands", Value.of_list(["a", "b"])),
            user_action_node("pick", UserActionMode.SELECT_MANY),
            edges=(edge("cands", "output", "pick", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        answer_user_action(state, "pick", [0, 1])
        state = resume(state, None)
        assert state.records["pick"].output["output"] == Value.of_list(["a", "b"])

    def test_edit_text_verbatim(self):
        chain = chain_of(
            data_input_node("draft", Value.of_text("rough")),
            user_action_node("edit", UserActionMode.EDIT_TEXT),
            edges=(edge("draft", "output", "edit", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        answer_user_action(state, "edit", "polished text")
        state = resume(state, None)
        assert state.records["edit"].output["output"] == Value.of_text("polished text")

    def test_edit_text_rejects_list_answer(self):
        chain = chain_of(
            data_input_node("draft", Value.of_text("rough")),
            user_action_node("edit", UserActionMode.EDIT_TEXT),
            edges=(edge("draft", "output", "edit", "input"),),
        )
        state = run_chain(chain, {}, (), None)
        with pytest.raises(KindError):
            answer_user_action(state, "edit", Value.of_list(["a"]))

    def test_resume_before_answer_raises(self):
        state = run_chain(self.story_chain(), {}, (), None)
        with pytest.raises(StateError):
            resume(state, None)

    def test_answer_wrong_node_raises(self):
        state = run_chain(self.story_chain(), {}, (), None)
        with pytest.raises(StateError):
            answer_user_action(state, "shout", 0)


class TestEvents:
    def test_event_order_and_payloads(self):
        events = []
        chain = chain_of(
            data_input_node("d", Value.of_text("x")),
            processing_node("p", BuiltinSpec(name="trimWhitespace")),
            edges=(edge("d", "output", "p", "input"),),
        )
        run_chain(chain, {}, (), None, on_event=events.append)
        kinds = [e.kind for e in events]
        assert kinds == [
            "runStarted",
            "nodeStarted",
            "nodeFinished",
            "nodeStarted",
            "nodeFinished",
            "runFinished",
        ]
        assert events[-1].status is RunStatus.DONE

    def test_breakpoint_and_user_action_events(self):
        events = []
        chain = chain_of(
            data_input_node("cands", Value.of_list(["a"])),
            user_action_node("pick", UserActionMode.SELECT_ONE),
            edges=(edge("cands", "output", "pick", "input"),),
        )
        state = run_chain(chain, {}, ("cands",), None, on_event=events.append)
        assert events[-1].kind == "pausedAtBreakpoint"
        state = resume(state, None, on_event=events.append)
        assert events[-1].kind == "awaitingUserAction"
        assert events[-1].candidates == Value.of_list(["a"])
        answer_user_action(state, "pick", 0, on_event=events.append)
        assert events[-1].kind == "nodeFinished"
        resume(state, None, on_event=events.append)
        assert events[-1].kind == "runFinished"


class TestUnitRuns:
    def test_unit_run_is_chain_free(self):
        node = classifier_node(
            "clf",
            "[Dialog] Play some music I like. [Class] is_music [Dialog] [[user]] [Class]",
            labels=("is_music", "not_music"),
            payload_input="user",
        )
        backend = ScriptedBackend(
            [ScriptedRule(matcher=RegexMatcher(r"hey there"), responses=("not_music",))]
        )
        record = run_node_unit(node, {"user": Value.of_text("hey there, what's up")}, backend)
        assert record.status is NodeStatus.SUCCESS
        assert record.output == {"not_music": Value.of_text("hey there, what's up")}

    def test_unit_split_empty(self):
        node = processing_node("s", BuiltinSpec(name="splitByNumber"))
        record = run_node_unit(node, {"input": Value.of_text("")})
        assert record.output["output"] == Value.of_list([])

    def test_unit_evaluation_filter(self):
        node = evaluation_node(
            "e",
            EvaluatorSpec(
                predicate=BlocklistScorePredicate(words=("awful",), threshold=0.5),
                mode=FilterMode(),
            ),
        )
        record = run_node_unit(node, {"items": Value.of_list(["nice day", "awful noise"])})
        assert record.output["passed"] == Value.of_list(["nice day"])
        assert record.output["rejected"] == Value.of_list(["awful noise"])

    def test_unit_missing_binding(self):
        node = script_node("s", "concat(a, b)")
        with pytest.raises(InputError):
            run_node_unit(node, {"a": Value.of_text("x")})

    def test_unit_user_action_errors(self):
        node = user_action_node("u", UserActionMode.SELECT_ONE)
        record = run_node_unit(node, {"input": Value.of_list(["a"])})
        assert record.status is NodeStatus.ERROR

    def test_unit_api_call_with_transport(self):
        node = api_call_node(
            "api",
            HttpMethod.GET,
            "http://x.local/find?q=[[q]]",
            extract_path="data/0/title",
        )

        def transport(method, url, headers, body):
            assert method == "GET" and "q=hi" in url and body is None
            return 200, '{"data": [{"title": "found hi"}]}'

        record = run_node_unit(node, {"q": Value.of_text("hi")}, http_transport=transport)
        assert record.output["output"] == Value.of_text("found hi")

    def test_unit_api_call_error_status(self):
        node = api_call_node("api", HttpMethod.GET, "http://x.local/", extract_path="data")
        record = run_node_unit(node, {}, http_transport=lambda m, u, h, b: (500, "{}"))
        assert record.status is NodeStatus.ERROR
        assert "500" in record.error_message


class TestFinalOutputs:
    def test_terminal_success_outputs_only(self):
        state = run_chain(
            routing_chain(),
            {},
            (),
            ScriptedBackend([ScriptedRule(matcher=PrefixMatcher(""), responses=("fun",))]),
        )
        outputs = final_outputs_json(state)
        assert set(outputs) == {"fun_join"}  # boring_join skipped, clf not terminal
