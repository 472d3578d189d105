import json

import pytest
from hypothesis import given

from conftest import CE1, CE2, CE4, W, H, histories, random_history
from navhist.history import InvalidHistory, doc_line, from_doc_line, singleton
from navhist.render import render_ascii, render_dot
from navhist.semantics import PATCHED, SPEC
from navhist.textio import (
    StructuredFormatError,
    TraceSyntaxError,
    from_structured,
    load_any,
    parse_history,
    parse_script,
    parse_trace,
    serialize_history,
    serialize_script,
    serialize_trace,
    to_structured,
)
from navhist.trace import (
    ExpectAbort,
    ExpectActive,
    ExpectWellFormed,
    LoadChild,
    Navigate,
    Trace,
    TraverseBy,
    TraverseTo,
    format_ids,
    replay,
)

ALL_ACTIONS = (
    LoadChild("0", "A", "1"),
    Navigate("A", "2"),
    TraverseBy(-1),
    TraverseBy(0),
    TraverseBy(3),
    TraverseTo("1"),
    ExpectActive(("0", "1")),
    ExpectActive(()),
    ExpectWellFormed(False),
    ExpectAbort(),
)


class TestHistoryFormat:
    def test_serialize(self):
        assert serialize_history(H("0.T(-)* 1.A(0)* 2.A(0)")) == (
            "doc 0 session=T parent=- active\n"
            "doc 1 session=A parent=0 active\n"
            "doc 2 session=A parent=0\n"
        )

    def test_comments_and_blank_lines(self):
        text = "# header\n\ndoc 0 session=T parent=- active  # root\n"
        assert parse_history(text) == singleton()

    @pytest.mark.parametrize(
        "text, line, col",
        [
            ("doc 0 session=T\n", 1, 1),
            ("doc 0 session=T parent=- active\nfoo\n", 2, 1),
            ("doc 0 sesion=T parent=- active\n", 1, 7),
            ("doc 0 session=T parent= active\n", 1, 17),
            ("doc 0 session=T parent=- activ\n", 1, 26),
        ],
    )
    def test_syntax_errors_have_positions(self, text, line, col):
        with pytest.raises(TraceSyntaxError) as err:
            parse_history(text)
        assert (err.value.line, err.value.column) == (line, col)
        assert str(err.value).startswith(f"line {line}, column {col}: ")

    def test_invariant_violation_names_line(self):
        text = "doc 0 session=T parent=- active\n\ndoc 1 session=A parent=0 active\ndoc 2 session=A parent=0 active\n"
        with pytest.raises(InvalidHistory) as err:
            parse_history(text)
        (v,) = err.value.violations
        assert v.invariant == "I4" and v.line == 4
        assert str(v).startswith("line 4: ")

    def test_doc_line(self):
        assert from_doc_line(CE4) == H(CE4)
        assert doc_line(H(CE4)) == CE4


class TestScriptFormat:
    def test_round_trip(self):
        text = serialize_script(ALL_ACTIONS)
        assert "traverse +3\n" in text and "traverse 0\n" in text
        assert parse_script(text) == ALL_ACTIONS

    @pytest.mark.parametrize(
        "text, col",
        [
            ("jump 2\n", 1),
            ("traverse two\n", 10),
            ("traverse\n", 1),
            ("navigate A\n", 1),
            ("expect-wf maybe\n", 11),
            ("expect-abort now\n", 1),
        ],
    )
    def test_errors(self, text, col):
        with pytest.raises(TraceSyntaxError) as err:
            parse_script(text)
        assert err.value.column == col

    def test_doc_after_action(self):
        with pytest.raises(TraceSyntaxError, match="precede"):
            parse_trace("traverse 1\ndoc 0 session=T parent=- active\n")

    def test_default_initial(self):
        assert parse_trace("loadchild 0 A 1\n").initial == singleton()


class TestStructured:
    def test_key_order_and_compactness(self):
        text = to_structured(H("0.T(-) 1.T(-)*"))
        assert text == (
            '{"docs":[{"id":"0","session":"T","parent":null,"active":false},'
            '{"id":"1","session":"T","parent":null,"active":true}]}'
        )

    def test_trace_round_trip(self):
        t = Trace(H(CE1), ALL_ACTIONS)
        assert from_structured(to_structured(t)) == t

    def test_reports_pass_through(self):
        assert from_structured('{"report":"diff","x":1}') == {"report": "diff", "x": 1}

    @pytest.mark.parametrize(
        "text",
        [
            "[1]",
            "{not json",
            '{"docs":[{"id":0,"session":"T","parent":null,"active":true}]}',
            '{"docs":[{"id":"0","session":"T","parent":null}]}',
            '{"initial":{"docs":[{"id":"0","session":"T","parent":null,"active":true}]},'
            '"actions":[{"op":"fly"}]}',
            '{"initial":{"docs":[{"id":"0","session":"T","parent":null,"active":true}]},'
            '"actions":[{"op":"traverse","delta":true}]}',
            '{"something":"else"}',
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(StructuredFormatError):
            from_structured(text)

    def test_invalid_history_in_structured(self):
        with pytest.raises(InvalidHistory):
            from_structured('{"docs":[]}')

    def test_load_any(self, traces_dir):
        line_form = load_any((traces_dir / "ce1.trace").read_text())
        assert load_any(to_structured(line_form)) == line_form
        assert load_any(to_structured(H(W))) == Trace(H(W), ())


def _fixtures(traces_dir):
    return sorted(p for p in traces_dir.iterdir() if p.suffix in (".trace", ".hist"))


class TestRoundTrips:
    def test_fixtures(self, traces_dir):
        paths = _fixtures(traces_dir)
        assert len(paths) >= 8
        for path in paths:
            t = parse_trace(path.read_text())
            text = serialize_trace(t)
            assert parse_trace(text) == t
            assert serialize_trace(parse_trace(text)) == text
            s = to_structured(t)
            assert from_structured(s) == t
            assert to_structured(from_structured(s)) == s
            assert json.loads(s)["initial"]["docs"][0]["parent"] is None

    def test_seeded_random_histories(self):
        for seed in range(1000):
            h = random_history(seed)
            line = doc_line(h)
            assert from_doc_line(line) == h and doc_line(from_doc_line(line)) == line
            text = serialize_history(h)
            assert parse_history(text) == h and serialize_history(parse_history(text)) == text
            s = to_structured(h)
            assert from_structured(s) == h and to_structured(from_structured(s)) == s

    @given(histories())
    def test_generated(self, h):
        assert parse_history(serialize_history(h)) == h
        assert from_structured(to_structured(h)) == h


class TestReplay:
    def test_ce1_fixture(self, traces_dir):
        t = parse_trace((traces_dir / "ce1.trace").read_text())
        assert replay(t, PATCHED).ok
        run = replay(t, SPEC)
        # -2 jumps straight to entry 1, so 4 stays active and +2 then aborts
        assert [f.index for f in run.failures] == [3, 5]
        assert run.failures[0].actual.startswith("active {0,1,4}")
        assert "(expect-active 0 1 2)" in str(run.failures[0])

    def test_expect_abort(self, traces_dir):
        t = parse_trace((traces_dir / "short.trace").read_text())
        assert replay(t).ok
        bad = Trace(singleton(), (LoadChild("0", "A", "1"), ExpectAbort()))
        assert replay(bad).failures[0].actual == "no preceding traverse"
        moved = Trace(H(CE1), (TraverseBy(1), ExpectAbort()))
        assert not replay(moved).ok

    def test_precondition_error_stops_replay(self):
        t = Trace(singleton(), (Navigate("Q", "1"), TraverseBy(1)))
        run = replay(t)
        assert len(run.steps) == 1 and run.error is not None and not run.ok
        assert run.steps[0].summary().startswith("error:")

    def test_format_ids(self):
        assert format_ids({"10", "2", "x", "0"}) == "{0,2,10,x}"


class TestRender:
    def test_ascii(self):
        assert render_ascii(H(CE2)) == (
            "T | [0]                  5\n"
            "A |     [1]  2  parent 0\n"
            "B |             (3)  4  parent 2\n"
        )

    def test_ascii_marks(self):
        out = render_ascii(H(CE2))
        assert "[0]" in out and "[1]" in out and "(3)" in out and " 5" in out
        assert out.count("\n") == 3

    def test_dot(self):
        out = render_dot(H(CE2))
        assert out.startswith("digraph history {")
        assert out.count("subgraph cluster_") == 3
        assert '"0" [style=filled, fillcolor=black' in out
        assert '"3" [style=filled, fillcolor=gray80]' in out
        # 3 is active but its parent 2 is not, so only 0 -> 1 is drawn
        assert '"2" -> "3";' in out and '"0" -> "2";' not in out
        assert '"0" -> "1";' in out

    def test_deterministic(self):
        assert render_dot(H(CE2)) == render_dot(from_doc_line(CE2))
