"""Pre-built example chains, each shipping fixtures that make it runnable
offline: scripted completions, sample inputs, canned user-action answers,
and API stubs. The gallery seeds a user's mental model of what chains can
do and doubles as the end-to-end regression corpus.

All prompts here are reconstructions written for the fixtures — each
entry's description says so.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .backends import EchoBackend, LLMBackend, LLMParams, RegexMatcher, ScriptedBackend, ScriptedRule
from .builtins import BlocklistScorePredicate, BuiltinSpec, EvaluatorSpec, FilterMode
from .executor import (
    EventSink,
    RunState,
    RunStatus,
    answer_user_action,
    resume,
    run_chain,
)
from .model import (
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
from .persistence import ApiStub, ChainFile, Fixtures, stub_transport
from .values import Value, ValueKind


@dataclass(frozen=True)
class GalleryEntry:
    id: str
    title: str
    description: str
    chain_file: ChainFile

    def to_json(self) -> dict:
        from .persistence import chain_file_to_doc

        return {
            "id": self.id,
            "title": self.title,
            "description": self.description,
            "chainFile": chain_file_to_doc(self.chain_file),
        }


def _edge(src_node: str, src_handle: str, dst_node: str, dst_handle: str) -> Edge:
    return Edge(source=Port(src_node, src_handle), target=Port(dst_node, dst_handle))


# ---------------------------------------------------------------------------
# Fixture-driven execution

def answer_from_doc(doc: Any) -> Any:
    """Turn a canned answer document into an answer_user_action argument."""
    if isinstance(doc, dict):
        if "select" in doc:
            return doc["select"]
        if "text" in doc:
            return doc["text"]
        if "value" in doc:
            return Value.from_json(doc["value"])
    raise ValueError(f"cannot interpret user-action answer {doc!r}")


def run_chain_file(
    chain_file: ChainFile,
    input_overrides: dict[str, Value] | None = None,
    breakpoints: tuple[str, ...] = (),
    backend: LLMBackend | None = None,
    *,
    on_event: EventSink | None = None,
    run_id: str | None = None,
) -> RunState:
    """Run a chain file under its fixtures.

    Scripted rules become the backend (echo when there are none), sample
    inputs seed the chain inputs, API stubs answer API-call nodes, and
    canned user-action answers are applied automatically so fixture runs
    go end to end. Breakpoint pauses are returned to the caller as-is.
    """
    fixtures = chain_file.fixtures or Fixtures()
    if backend is None:
        backend = ScriptedBackend(fixtures.scripted_rules) if fixtures.scripted_rules else EchoBackend()
    inputs = dict(fixtures.sample_inputs)
    inputs.update(input_overrides or {})
    transport = stub_transport(fixtures.api_stubs) if fixtures.api_stubs else None
    state = run_chain(
        chain_file.chain,
        inputs,
        breakpoints,
        backend,
        on_event=on_event,
        http_transport=transport,
        run_id=run_id,
    )
    while state.status is RunStatus.AWAITING_USER_ACTION:
        assert state.pending_interaction is not None
        node_id = state.pending_interaction.node_id
        answer_doc = fixtures.user_action_answers.get(node_id)
        if answer_doc is None:
            break
        answer_user_action(state, node_id, answer_from_doc(answer_doc), on_event=on_event)
        state = resume(state, backend, on_event=on_event, http_transport=transport)
    return state


# ---------------------------------------------------------------------------
# Entry 1: music chatbot

def _music_chatbot() -> GalleryEntry:
    classify_prompt = (
        "[Dialog] Play some music I like. [Class] is_music\n"
        "[Dialog] What's the weather today? [Class] not_music\n"
        "[Dialog] [[user]] [Class]"
    )
    query_type_prompt = (
        "Query: find me artists like Taylor Swift [Type] find_artists\n"
        "Query: play Thunder Road [Type] find_songs\n"
        "Query: [[query]] [Type]"
    )
    ideation_prompt = (
        "List some artists matching the request: [[query]]\n"
        "Answer with a numbered list.\nArtists:"
    )
    reply_prompt = (
        "User request: [[user]]\n"
        "[[results]]\n"
        "Write a short reply recommending the artists.\nReply:"
    )
    chain = Chain(
        id="music-chatbot",
        name="Music chatbot",
        description="Classify a chat message, ideate matching artists, look up videos, and reply.",
        nodes=(
            data_input_node(
                "user_query",
                Value.of_text("play me something American country like"),
                position=(0, 0),
            ),
            classifier_node(
                "is_about_music",
                classify_prompt,
                labels=("is_music", "not_music"),
                payload_input="user",
                position=(220, 0),
            ),
            classifier_node(
                "query_type",
                query_type_prompt,
                labels=("find_artists", "find_songs"),
                payload_input="query",
                position=(440, 0),
            ),
            llm_node("artist_ideation", ideation_prompt, position=(660, 0)),
            processing_node("split_artists", BuiltinSpec(name="splitByNumber"), position=(880, 0)),
            api_call_node(
                "find_video",
                HttpMethod.GET,
                "http://music-stub.local/videos?artist=[[artist]]",
                extract_path="items/0/title",
                position=(1100, 0),
            ),
            script_node(
                "format_results",
                'concat("Artists: ", join(artists, ", "), ". Videos: ", join(videos, ", "))',
                input_kinds={"artists": ValueKind.TEXT_LIST, "videos": ValueKind.TEXT_LIST},
                position=(1320, 0),
            ),
            llm_node("reply", reply_prompt, position=(1540, 0)),
            evaluation_node(
                "safety_filter",
                EvaluatorSpec(
                    predicate=BlocklistScorePredicate(words=("awful", "stupid"), threshold=0.5),
                    mode=FilterMode(),
                ),
                position=(1760, 0),
            ),
        ),
        edges=(
            _edge("user_query", "output", "is_about_music", "user"),
            _edge("is_about_music", "is_music", "query_type", "query"),
            _edge("query_type", "find_artists", "artist_ideation", "query"),
            _edge("artist_ideation", "output", "split_artists", "input"),
            _edge("split_artists", "output", "find_video", "artist"),
            _edge("split_artists", "output", "format_results", "artists"),
            _edge("find_video", "output", "format_results", "videos"),
            _edge("user_query", "output", "reply", "user"),
            _edge("format_results", "output", "reply", "results"),
            _edge("reply", "output", "safety_filter", "items"),
        ),
    )
    fixtures = Fixtures(
        scripted_rules=(
            ScriptedRule(
                matcher=RegexMatcher(r"\[Dialog\] play me something American country like \[Class\]$"),
                responses=("is_music",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"\[Dialog\] hey there, what's up \[Class\]$"),
                responses=("not_music",),
            ),
            ScriptedRule(matcher=RegexMatcher(r"\[Class\]$"), responses=("not_music",)),
            ScriptedRule(matcher=RegexMatcher(r"\[Type\]$"), responses=("find_artists",)),
            ScriptedRule(
                matcher=RegexMatcher(r"^List some artists"),
                responses=("1) Garth Brooks 2) George Strait",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"^User request:"),
                responses=(
                    "How about Garth Brooks or George Strait? Both have great country songs.",
                ),
            ),
        ),
        sample_inputs={"user_query": Value.of_text("play me something American country like")},
        api_stubs=(
            ApiStub(
                url_pattern=r"artist=Garth Brooks",
                response={"items": [{"title": "Garth Brooks - Friends in Low Places"}]},
            ),
            ApiStub(
                url_pattern=r"artist=George Strait",
                response={"items": [{"title": "George Strait - Amarillo by Morning"}]},
            ),
            ApiStub(url_pattern=r".", response={"items": [{"title": "Music video"}]}),
        ),
    )
    return GalleryEntry(
        id="music-chatbot",
        title="Music chatbot",
        description=(
            "A chat message is first classified as music-related or not; music queries are "
            "classified by type, matching artists are ideated as a numbered list, split, looked "
            "up through a (stubbed) video search API, formatted, and answered, with a blocklist "
            "filter guarding the reply. Prompts and the API response are reconstructions; the "
            "video API is answered by canned stubs so the chain runs offline."
        ),
        chain_file=ChainFile(chain=chain, fixtures=fixtures),
    )


# ---------------------------------------------------------------------------
# Entry 2: story writer

def _story_writer() -> GalleryEntry:
    spine = (
        "1) Morris meets a gourmet cricket "
        "2) Morris opens a restaurant "
        "3) Morris finds a new delicacy"
    )
    chain = Chain(
        id="story-writer",
        name="Story writer",
        description="Over-generate story spines, pick one, and expand it point by point.",
        nodes=(
            data_input_node(
                "premise", Value.of_text("Morris the frog hates eating flies"), position=(0, 0)
            ),
            llm_node(
                "outline",
                "Write a short story spine for: [[premise]]\nAnswer with a numbered list.\nSpine:",
                params=LLMParams(n_samples=3),
                position=(220, 0),
            ),
            user_action_node("pick_spine", UserActionMode.SELECT_ONE, position=(440, 0)),
            processing_node("split_points", BuiltinSpec(name="splitByNumber"), position=(660, 0)),
            llm_node(
                "write_paragraph",
                "Write one story paragraph for this outline point: [[point]]\nParagraph:",
                position=(880, 0),
            ),
            processing_node(
                "merge_story",
                BuiltinSpec(name="joinWithSeparator", separator="\n\n"),
                position=(1100, 0),
            ),
            processing_node(
                "add_ending", BuiltinSpec(name="appendText", suffix="\nThe End"), position=(1320, 0)
            ),
        ),
        edges=(
            _edge("premise", "output", "outline", "premise"),
            _edge("outline", "output", "pick_spine", "input"),
            _edge("pick_spine", "output", "split_points", "input"),
            _edge("split_points", "output", "write_paragraph", "point"),
            _edge("write_paragraph", "output", "merge_story", "input"),
            _edge("merge_story", "output", "add_ending", "input"),
        ),
    )
    fixtures = Fixtures(
        scripted_rules=(
            ScriptedRule(
                matcher=RegexMatcher(r"^Write a short story spine"),
                responses=(
                    spine,
                    "1) Morris refuses dinner 2) Morris goes hungry 3) Morris relents",
                    "1) Morris tries vegetables 2) The pond disapproves 3) Morris persists",
                ),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"outline point: Morris meets a gourmet cricket"),
                responses=("Morris met a gourmet cricket who spoke of flavors beyond flies.",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"outline point: Morris opens a restaurant"),
                responses=("So Morris opened a tiny restaurant on a lily pad.",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"outline point: Morris finds a new delicacy"),
                responses=("At last Morris found his delicacy: candied dew drops.",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"outline point:"),
                responses=("The story went on.",),
            ),
        ),
        sample_inputs={"premise": Value.of_text("Morris the frog hates eating flies")},
        user_action_answers={"pick_spine": {"select": 0}},
    )
    return GalleryEntry(
        id="story-writer",
        title="Story writer",
        description=(
            "Three candidate story spines are over-generated for a premise; the user picks one, "
            "it is split into points, a paragraph is written per point (fanned out), the "
            "paragraphs are merged, and a closing line is appended. Prompts and spines are "
            "reconstructions; the fixture answers the selection with the first spine."
        ),
        chain_file=ChainFile(chain=chain, fixtures=fixtures),
    )


# ---------------------------------------------------------------------------
# Entry 3: review attribute descriptions

def _review_attributes() -> GalleryEntry:
    classify_prompt = (
        "Attribute: marble countertop [Category] high_end\n"
        "Attribute: budget-friendly cover [Category] discount\n"
        "Attribute: sturdy handle [Category] generic\n"
        "Attribute: [[attribute]] [Category]"
    )
    chain = Chain(
        id="review-attributes",
        name="Review attribute descriptions",
        description="Route a product attribute to a specialized description generator.",
        nodes=(
            data_input_node(
                "attribute", Value.of_text("hand-stitched leather finish"), position=(0, 0)
            ),
            classifier_node(
                "attribute_type",
                classify_prompt,
                labels=("high_end", "discount", "generic"),
                payload_input="attribute",
                default_label="generic",
                position=(220, 0),
            ),
            llm_node(
                "luxury_description",
                "Write a luxurious product description highlighting: [[attribute]]\nDescription:",
                position=(440, -120),
            ),
            llm_node(
                "discount_description",
                "Write a bargain-focused product description highlighting: [[attribute]]\nDescription:",
                position=(440, 0),
            ),
            llm_node(
                "generic_description",
                "Write a plain product description mentioning: [[attribute]]\nDescription:",
                position=(440, 120),
            ),
        ),
        edges=(
            _edge("attribute", "output", "attribute_type", "attribute"),
            _edge("attribute_type", "high_end", "luxury_description", "attribute"),
            _edge("attribute_type", "discount", "discount_description", "attribute"),
            _edge("attribute_type", "generic", "generic_description", "attribute"),
        ),
    )
    fixtures = Fixtures(
        scripted_rules=(
            ScriptedRule(
                matcher=RegexMatcher(r"Attribute: hand-stitched leather finish \[Category\]$"),
                responses=("high_end",),
            ),
            ScriptedRule(matcher=RegexMatcher(r"\[Category\]$"), responses=("generic",)),
            ScriptedRule(
                matcher=RegexMatcher(r"^Write a luxurious"),
                responses=("A hand-stitched leather finish elevates every touch of this piece.",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"^Write a bargain-focused"),
                responses=("Great value without compromise.",),
            ),
            ScriptedRule(
                matcher=RegexMatcher(r"^Write a plain"),
                responses=("A dependable product for everyday use.",),
            ),
        ),
        sample_inputs={"attribute": Value.of_text("hand-stitched leather finish")},
    )
    return GalleryEntry(
        id="review-attributes",
        title="Review attribute descriptions",
        description=(
            "A product attribute is classified as high-end, discount, or generic, and only the "
            "matching specialized description generator runs; the other branches are skipped. "
            "Prompts are reconstructions."
        ),
        chain_file=ChainFile(chain=chain, fixtures=fixtures),
    )


# ---------------------------------------------------------------------------
# Entry 4: ideation with a domain filter

def _idea_filter() -> GalleryEntry:
    chain = Chain(
        id="idea-filter",
        name="Ideation with a domain filter",
        description="General-purpose ideation kept reusable by a swappable classifier filter.",
        nodes=(
            data_input_node(
                "topic", Value.of_text("things to do on a lake afternoon"), position=(0, 0)
            ),
            llm_node(
                "ideator",
                "Brainstorm ideas for: [[topic]]\nAnswer with a numbered list.\nIdeas:",
                position=(220, 0),
            ),
            processing_node("split_ideas", BuiltinSpec(name="splitByNumber"), position=(440, 0)),
            classifier_node(
                "summer_filter",
                "Is this a summer outdoor activity? [[idea]]\nLabel:",
                labels=("summer", "other"),
                payload_input="idea",
                position=(660, 0),
            ),
            processing_node(
                "summer_ideas",
                BuiltinSpec(name="joinWithSeparator", separator=", "),
                position=(880, 0),
            ),
        ),
        edges=(
            _edge("topic", "output", "ideator", "topic"),
            _edge("ideator", "output", "split_ideas", "input"),
            _edge("split_ideas", "output", "summer_filter", "idea"),
            _edge("summer_filter", "summer", "summer_ideas", "input"),
        ),
    )
    fixtures = Fixtures(
        scripted_rules=(
            ScriptedRule(
                matcher=RegexMatcher(r"^Brainstorm ideas"),
                responses=(
                    "1) Kayak race 2) File tax returns 3) Build a sandcastle 4) Defrag the hard drive",
                ),
            ),
            ScriptedRule(matcher=RegexMatcher(r"activity\? Kayak race"), responses=("summer",)),
            ScriptedRule(
                matcher=RegexMatcher(r"activity\? Build a sandcastle"), responses=("summer",)
            ),
            ScriptedRule(matcher=RegexMatcher(r"activity\?"), responses=("other",)),
        ),
        sample_inputs={"topic": Value.of_text("things to do on a lake afternoon")},
    )
    return GalleryEntry(
        id="idea-filter",
        title="Ideation with a domain filter",
        description=(
            "A general ideator brainstorms a numbered list; each idea fans out through a "
            "domain classifier whose matching items are merged back. Swapping the classifier "
            "prompt retargets the whole chain. Prompts are reconstructions."
        ),
        chain_file=ChainFile(chain=chain, fixtures=fixtures),
    )


def list_gallery() -> list[GalleryEntry]:
    """All bundled example chains, in presentation order."""
    return [_music_chatbot(), _story_writer(), _review_attributes(), _idea_filter()]


def gallery_entry(entry_id: str) -> GalleryEntry:
    for entry in list_gallery():
        if entry.id == entry_id:
            return entry
    raise KeyError(f"no gallery entry {entry_id!r}")
