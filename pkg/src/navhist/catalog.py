"""The five known counterexamples, with expected states per preset."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .history import History, doc_line, from_doc_line, is_well_formed
from .semantics import PatchSet
from .trace import Action, Navigate, Trace, TraverseBy, format_ids, replay


@dataclass(frozen=True)
class Scenario:
    label: str
    actions: Tuple[Action, ...]
    # preset name -> state after each action
    expected: Dict[str, Tuple[History, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class CounterexampleCase:
    index: int
    title: str
    initial: History
    scenarios: Tuple[Scenario, ...]
    # Labels of two scenarios (or "initial") that the fundamental property
    # says must end in the same state.
    same_final: Optional[Tuple[str, str]] = None
    expected_well_formed: Optional[bool] = None

    def scenario(self, label: str) -> Scenario:
        for s in self.scenarios:
            if s.label == label:
                return s
        raise KeyError(label)

    def trace(self, label: str) -> Trace:
        return Trace(self.initial, self.scenario(label).actions)


def _h(text: str) -> History:
    return from_doc_line(text)


def _states(*texts: str) -> Tuple[History, ...]:
    return tuple(_h(t) for t in texts)


_CE1 = "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)"
_CE2 = "0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)"
_CE3 = "0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*"
_CE4 = "0.T(-)* 1.A(0)* 2.B(1) 3.A(0) 4.B(1)*"
_CE5 = "0.T(-)* 1.A(0)* 2.B(1)* 3.A(0)"

_PLUS2 = (TraverseBy(2),)
_PLUS1_TWICE = (TraverseBy(1), TraverseBy(1))
_BACK_FORTH = (TraverseBy(-1), TraverseBy(1))


def _build() -> Dict[int, CounterexampleCase]:
    ce1_step = ("0.T(-)* 1.A(0) 2.B(0)* 3.A(0)* 4.B(0)", "0.T(-)* 1.A(0) 2.B(0) 3.A(0)* 4.B(0)*")
    ce2_step = (
        "0.T(-)* 1.A(0) 2.A(0)* 3.B(2)* 4.B(2) 5.T(-)",
        "0.T(-)* 1.A(0) 2.A(0)* 3.B(2) 4.B(2)* 5.T(-)",
    )
    ce3_round = ("0.T(-)* 1.A(0)* 2.B(0)* 3.B(0) 4.A(0)", "0.T(-)* 1.A(0)* 2.B(0) 3.B(0)* 4.A(0)")
    ce4_round = ("0.T(-)* 1.A(0)* 2.B(1)* 3.A(0) 4.B(1)", "0.T(-)* 1.A(0) 2.B(1)* 3.A(0)* 4.B(1)")
    ce5_unpatched = _states(_CE4)
    ce5_patched = _states("0.T(-)* 1.A(0)* 2.B(1) 4.B(1)*")

    cases = [
        CounterexampleCase(
            1,
            "forward traversal skips intermediate entries",
            _h(_CE1),
            (
                Scenario("+2", _PLUS2, {
                    "spec": _states("0.T(-)* 1.A(0)* 2.B(0) 3.A(0) 4.B(0)*"),
                    "patched": _states(ce1_step[1]),
                }),
                Scenario("+1,+1", _PLUS1_TWICE, {
                    "spec": _states(*ce1_step),
                    "patched": _states(*ce1_step),
                }),
            ),
            same_final=("+2", "+1,+1"),
        ),
        CounterexampleCase(
            2,
            "joint history built from fully active documents only",
            _h(_CE2),
            (
                Scenario("+2", _PLUS2, {
                    "p1": _states("0.T(-) 1.A(0) 2.A(0)* 3.B(2)* 4.B(2) 5.T(-)*"),
                    "p1p2": _states(ce2_step[1]),
                }),
                Scenario("+1,+1", _PLUS1_TWICE, {
                    "p1": _states(*ce2_step),
                    "p1p2": _states(*ce2_step),
                }),
            ),
            same_final=("+2", "+1,+1"),
        ),
        CounterexampleCase(
            3,
            "back then forward does not return",
            _h(_CE3),
            (
                Scenario("-1,+1", _BACK_FORTH, {
                    "p1p2": _states(*ce3_round),
                    "p1p2p3": _states(*ce3_round),
                }),
            ),
            same_final=("-1,+1", "initial"),
            expected_well_formed=False,
        ),
        CounterexampleCase(
            4,
            "history that is not well-formed",
            _h(_CE4),
            (
                Scenario("-1,+1", _BACK_FORTH, {
                    "p1p2p3": _states(*ce4_round),
                    "patched": _states(*ce4_round),
                }),
            ),
            same_final=("-1,+1", "initial"),
            expected_well_formed=False,
        ),
        CounterexampleCase(
            5,
            "navigation that only clears its own session future",
            _h(_CE5),
            (
                Scenario("navigate B 4", (Navigate("B", "4"),), {
                    "spec": ce5_unpatched,
                    "p1": ce5_unpatched,
                    "p1p2": ce5_unpatched,
                    "p1p2p3": ce5_unpatched,
                    "patched": ce5_patched,
                    "spec-algorithm": ce5_patched,
                }),
            ),
            expected_well_formed=True,
        ),
    ]
    return {c.index: c for c in cases}


_CASES = _build()


def counterexample_catalog(i: int) -> CounterexampleCase:
    try:
        return _CASES[i]
    except KeyError:
        raise ValueError(f"counterexample index must be 1..5, got {i}") from None


@dataclass
class ScenarioResult:
    label: str
    states: List[History]  # after each mutating action; aborts repeat the prior state
    summaries: List[str]
    expected: Optional[Tuple[History, ...]]

    @property
    def matches(self) -> Optional[bool]:
        if self.expected is None:
            return None
        return tuple(self.states) == self.expected

    @property
    def final(self) -> History:
        return self.states[-1]


@dataclass
class CaseResult:
    case: CounterexampleCase
    patches: PatchSet
    scenarios: List[ScenarioResult]
    findings: List[str]

    @property
    def mismatches(self) -> List[str]:
        return [s.label for s in self.scenarios if s.matches is False]

    @property
    def manifests(self) -> bool:
        return bool(self.findings)


def run_case(case: CounterexampleCase, patches: PatchSet) -> CaseResult:
    results = []
    for sc in case.scenarios:
        run = replay(Trace(case.initial, sc.actions), patches)
        states = [s.history for s in run.steps]
        summaries = [s.summary() for s in run.steps]
        results.append(ScenarioResult(sc.label, states, summaries, sc.expected.get(patches.name)))

    findings = []
    if not is_well_formed(case.initial):
        findings.append(f"initial history {doc_line(case.initial)} is not well-formed")
    if case.same_final is not None:
        finals = {r.label: r.final for r in results}
        finals["initial"] = case.initial
        a, b = case.same_final
        if finals[a] != finals[b]:
            findings.append(
                f"fundamental property fails: {a} ends at active {format_ids(finals[a].active())}, "
                f"{b} at active {format_ids(finals[b].active())}"
            )
    for r in results:
        for state in r.states:
            if not is_well_formed(state):
                findings.append(f"{r.label} reaches {doc_line(state)}, which is not well-formed")
                break
    return CaseResult(case, patches, results, findings)
