import pytest

from conftest import CE1, CE2, CE4, CE5, W, H
from navhist.history import is_well_formed, is_well_formed_brute, singleton
from navhist.semantics import P1, PATCHED, SPEC, SPEC_ALGORITHM
from navhist.trace import ExpectActive, Navigate, Trace, TraverseBy, replay
from navhist.verification import (
    DEFAULT_SCHEMA,
    ENTRY_SEQUENCE_NOTE,
    FrameSchema,
    activation_problems,
    admissible_actions,
    canonical,
    check_fundamental,
    check_lemmas,
    differential_run,
    enumerate_reachable,
    fundamental_witnesses,
    known_shapes,
    oracle_divergences,
    random_trace,
    session_name,
    sweep,
    trace_states,
    unit_step_problems,
    witness_mechanism,
)


class TestSchema:
    def test_parse(self):
        assert FrameSchema.parse("1, 2, 3, 4") == FrameSchema(1, 2, 3, 4)
        assert FrameSchema.parse("2,2,2,6") == DEFAULT_SCHEMA

    @pytest.mark.parametrize("text", ["1,2,3", "a,b,c,d", "1,2,3,-1"])
    def test_parse_rejects(self, text):
        with pytest.raises(ValueError):
            FrameSchema.parse(text)


class TestCanonical:
    def test_session_names_skip_t(self):
        assert [session_name(k) for k in range(4)] == ["T", "A", "B", "C"]
        assert session_name(30) == "S30"

    def test_renames_ids_and_sessions(self):
        h = H("7.X(-)* 9.Q(7) 12.Q(7)*")
        assert str(canonical(h)) == "0.T(-)* 1.A(0) 2.A(0)*"

    def test_idempotent(self, patched_states):
        for h in list(patched_states)[:200]:
            assert canonical(h) == h


class TestEnumeration:
    def test_zero_actions(self):
        assert enumerate_reachable(FrameSchema(2, 2, 2, 0)) == {singleton()}

    def test_depth_one_navigation_shape(self):
        # depth-1 analog: a child session with a back entry and a top-level future entry
        states = enumerate_reachable(FrameSchema(1, 1, 2, 4), PATCHED)
        assert canonical(H("0.T(-)* 1.A(0) 2.A(0)*")) in states

    def test_patched_navigation_shape_reachable(self):
        states = enumerate_reachable(FrameSchema(1, 2, 2, 5), PATCHED)
        assert canonical(H("0.T(-)* 1.A(0)* 2.B(1) 4.B(1)*")) in states

    def test_admissible_respects_navigation_bound(self):
        h = H("0.T(-) 1.T(-) 2.T(-)*")
        acts = admissible_actions(h, DEFAULT_SCHEMA, PATCHED, "3", "A")
        assert not any(isinstance(a, Navigate) for a, _ in acts)

    def test_admissible_traversals_change_state(self):
        for a, h2 in admissible_actions(H(CE1), DEFAULT_SCHEMA, PATCHED, "5", "C"):
            assert h2 != H(CE1)

    def test_patched_states_all_well_formed(self, patched_states):
        assert all(is_well_formed(h) for h in patched_states)

    def test_well_formed_check_agrees_with_brute_force(self, patched_states, spec_states):
        for h in patched_states | spec_states:
            if len(h) <= 7:
                assert is_well_formed(h) == is_well_formed_brute(h)


class TestFundamental:
    def test_ce1_spec_fails(self):
        verdict = check_fundamental(H(CE1), 5, SPEC)
        assert not verdict.holds
        assert verdict.checked > 0

    def test_ce1_patched_holds(self):
        assert check_fundamental(H(CE1), 5, PATCHED).holds

    def test_witness_trace_reproduces(self):
        w = next(fundamental_witnesses(H(CE1), 5, SPEC))
        assert not replay(w.trace(), SPEC).ok
        assert "then" in w.describe()

    def test_mechanisms(self):
        by_pair = {(w.delta, w.delta2): w for w in fundamental_witnesses(H(CE1), 5, SPEC)}
        assert witness_mechanism(by_pair[(1, 1)]) == "intermediaries"
        by_pair = {(w.delta, w.delta2): w for w in fundamental_witnesses(H(CE2), 6, P1)}
        assert witness_mechanism(by_pair[(1, 1)]) == "fully-active basis"
        by_pair = {(w.delta, w.delta2): w for w in fundamental_witnesses(H(W), 5, SPEC)}
        # -2 jumps past entry 2; folding through it already agrees with -1,-1
        assert witness_mechanism(by_pair[(-1, -1)]) == "intermediaries"
        by_pair = {(w.delta, w.delta2): w for w in fundamental_witnesses(H(CE4), 5, PATCHED)}
        assert witness_mechanism(by_pair[(-1, 1)]) == "not well-formed"

    def test_small_sweep(self):
        states = enumerate_reachable(FrameSchema(1, 1, 1, 3), SPEC)
        report = sweep(states, SPEC, FrameSchema(1, 1, 1, 3))
        assert report.states == len(states)
        assert report.pairs_checked > 0

    def test_first_witness_only(self, spec_states):
        some = sorted(spec_states, key=len)[:300]
        full = sweep(some, SPEC)
        first = sweep(some, SPEC, all_witnesses=False)
        assert len(first.witnesses) == len(full.violating_states)

    def test_known_shapes_on_spec(self, spec_states):
        report = sweep(spec_states, SPEC)
        assert set(report.mechanisms()) == {
            "intermediaries", "fully-active basis", "backward asymmetry", "not well-formed"
        }
        shapes = known_shapes(report)
        assert shapes["counterexample 1"] and shapes["witness W"]
        assert shapes["fully-active basis mechanism"]


class TestLemmas:
    def test_well_formed_example(self):
        verdicts = check_lemmas(H(CE1))
        assert verdicts[1].status == "holds"
        assert verdicts[2].status == "vacuous"
        assert verdicts[3].status == "holds"
        assert verdicts[5].status == "holds"

    def test_not_well_formed_is_vacuous(self):
        verdicts = check_lemmas(H(CE4))
        assert [verdicts[k].status for k in (3, 4, 5, 6)] == ["vacuous"] * 4

    def test_back_lemmas_on_w(self):
        verdicts = check_lemmas(H(W))
        assert verdicts[4].status == "holds" and verdicts[6].status == "holds"

    def test_oracles_agree_on_known_histories(self):
        for text in (CE1, CE5, W):
            assert oracle_divergences(H(text)) == []
            assert unit_step_problems(H(text)) == []
            assert activation_problems(H(text), len(H(text))) == []


class TestRandomTraces:
    def test_seeded(self):
        assert random_trace(7) == random_trace(7)
        assert len(random_trace(7).actions) <= DEFAULT_SCHEMA.max_total_actions

    def test_replays_cleanly(self):
        for seed in range(30):
            t = random_trace(seed)
            assert replay(t, PATCHED).ok
            states = trace_states(t)
            assert len(states) == len(t.actions) + 1
            assert all(is_well_formed(h) for h in states)


class TestDifferential:
    def test_no_divergence(self):
        t = Trace(H(CE1), (TraverseBy(1),))
        assert differential_run(t, SPEC, PATCHED) is None

    def test_ce1(self):
        d = differential_run(Trace(H(CE1), (TraverseBy(2),)), SPEC, PATCHED)
        assert d.index == 0
        assert "{0,1,4}" in d.left and "{0,3,4}" in d.right
        assert d.note == ""

    def test_w_backward_note(self):
        d = differential_run(Trace(H(W), (TraverseBy(-1),)), PATCHED, SPEC_ALGORITHM)
        assert "{0,1,3}" in d.left and "{0,2,4}" in d.right
        assert d.note == ENTRY_SEQUENCE_NOTE
        assert "note:" in d.describe()

    def test_assertions_do_not_count_as_divergence(self):
        t = Trace(H(CE5), (Navigate("B", "4"), ExpectActive(("0", "1", "4"))))
        d = differential_run(t, SPEC, PATCHED)
        assert d is not None and d.index == 0
