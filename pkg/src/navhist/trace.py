"""Actions, traces, and deterministic replay under a chosen semantics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

from .history import History, HistoryError, doc_line, is_well_formed, singleton
from .semantics import (
    PATCHED,
    Aborted,
    Changed,
    PatchSet,
    TraversalOutcome,
    load_child,
    navigate,
    traverse_by,
    traverse_to,
)


@dataclass(frozen=True)
class LoadChild:
    parent: str
    session: str
    id: str


@dataclass(frozen=True)
class Navigate:
    session: str
    id: str


@dataclass(frozen=True)
class TraverseBy:
    delta: int


@dataclass(frozen=True)
class TraverseTo:
    id: str


@dataclass(frozen=True)
class ExpectActive:
    ids: Tuple[str, ...]  # compared as a set; order kept for faithful re-serialization


@dataclass(frozen=True)
class ExpectWellFormed:
    value: bool


@dataclass(frozen=True)
class ExpectAbort:
    pass


Action = Union[LoadChild, Navigate, TraverseBy, TraverseTo, ExpectActive, ExpectWellFormed, ExpectAbort]
EXPECTATIONS = (ExpectActive, ExpectWellFormed, ExpectAbort)


@dataclass(frozen=True)
class Trace:
    initial: History = field(default_factory=singleton)
    actions: Tuple[Action, ...] = ()


@dataclass(frozen=True)
class AssertionFailure:
    index: int
    action: Action
    expected: str
    actual: str
    preset: str

    def __str__(self) -> str:
        from .textio import format_action

        return (
            f"action {self.index} ({format_action(self.action)}) under {self.preset}: "
            f"expected {self.expected}, got {self.actual}"
        )


@dataclass(frozen=True)
class Step:
    index: int
    action: Action
    history: History  # state after the action
    outcome: Optional[TraversalOutcome] = None  # set for traversals
    error: Optional[str] = None  # precondition failure; replay stops here
    failure: Optional[AssertionFailure] = None

    def summary(self) -> str:
        if self.error is not None:
            return f"error: {self.error}"
        if isinstance(self.outcome, Aborted):
            return f"aborted ({self.outcome.reason.value})"
        return doc_line(self.history)


@dataclass
class Replay:
    trace: Trace
    patches: PatchSet
    steps: List[Step] = field(default_factory=list)

    @property
    def final(self) -> History:
        return self.steps[-1].history if self.steps else self.trace.initial

    @property
    def failures(self) -> List[AssertionFailure]:
        return [s.failure for s in self.steps if s.failure is not None]

    @property
    def error(self) -> Optional[Step]:
        for s in self.steps:
            if s.error is not None:
                return s
        return None

    @property
    def ok(self) -> bool:
        return self.error is None and not self.failures


def _sort_ids(ids) -> List[str]:
    return sorted(ids, key=lambda x: (0, int(x), x) if x.isdigit() else (1, 0, x))


def format_ids(ids) -> str:
    return "{" + ",".join(_sort_ids(ids)) + "}"


def apply_action(h: History, action: Action, patches: PatchSet) -> Tuple[History, Optional[TraversalOutcome]]:
    """Apply one mutating action.  Raises :class:`HistoryError` on a broken precondition."""
    if isinstance(action, LoadChild):
        return load_child(h, action.parent, action.session, action.id), None
    if isinstance(action, Navigate):
        return navigate(h, action.session, action.id, patches), None
    if isinstance(action, TraverseBy):
        outcome = traverse_by(h, action.delta, patches)
        return (outcome.history if isinstance(outcome, Changed) else h), outcome
    if isinstance(action, TraverseTo):
        h2 = traverse_to(h, action.id)
        return h2, Changed(h2)
    raise TypeError(f"not a mutating action: {action!r}")


def replay(trace: Trace, patches: PatchSet = PATCHED) -> Replay:
    run = Replay(trace, patches)
    h = trace.initial
    last_outcome: Optional[TraversalOutcome] = None
    last_mutation: Optional[Action] = None
    for i, action in enumerate(trace.actions):
        if isinstance(action, EXPECTATIONS):
            failure = _check(i, action, h, last_mutation, last_outcome, patches)
            run.steps.append(Step(i, action, h, failure=failure))
            continue
        try:
            h, outcome = apply_action(h, action, patches)
        except HistoryError as exc:
            run.steps.append(Step(i, action, h, error=str(exc)))
            break
        last_mutation, last_outcome = action, outcome
        run.steps.append(Step(i, action, h, outcome=outcome))
    return run


def _check(i, action, h, last_mutation, last_outcome, patches) -> Optional[AssertionFailure]:
    def fail(expected: str, actual: str) -> AssertionFailure:
        return AssertionFailure(i, action, expected, actual, patches.name)

    if isinstance(action, ExpectActive):
        if h.active() != frozenset(action.ids):
            return fail(f"active {format_ids(action.ids)}", f"active {format_ids(h.active())} in {doc_line(h)}")
    elif isinstance(action, ExpectWellFormed):
        wf = is_well_formed(h)
        if wf != action.value:
            return fail(f"well-formed={str(action.value).lower()}", f"well-formed={str(wf).lower()} in {doc_line(h)}")
    elif isinstance(action, ExpectAbort):
        if not isinstance(last_mutation, TraverseBy):
            return fail("abort of the preceding traverse", "no preceding traverse")
        if not isinstance(last_outcome, Aborted):
            return fail("abort", f"traversal to {doc_line(h)}")
    return None
