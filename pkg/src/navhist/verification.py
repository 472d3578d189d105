"""Property harness: fundamental property, proof lemmas, enumeration, differential runs."""

from __future__ import annotations

import random
import string
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple

from .history import (
    Basis,
    DocumentRecord,
    History,
    back_target,
    doc_line,
    forward_target,
    fully_active,
    is_well_formed,
    joint_session_future,
    joint_session_past,
    singleton,
)
from .semantics import (
    P1,
    P1P2,
    P1P2P3,
    PATCHED,
    Aborted,
    Changed,
    PatchSet,
    TraversalOutcome,
    backward_symmetric_literal,
    forward_literal,
    load_child,
    navigate,
    spec_traverse_by,
    traverse_by,
    traverse_from,
    traverse_to,
)
from .trace import (
    Action,
    ExpectActive,
    LoadChild,
    Navigate,
    Trace,
    TraverseBy,
    format_ids,
    replay,
)


@dataclass(frozen=True)
class FrameSchema:
    max_child_sessions_per_document: int = 2
    max_depth: int = 2
    max_navigations_per_session: int = 2
    max_total_actions: int = 6

    def __post_init__(self) -> None:
        for name, value in self.__dict__.items():
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")

    @classmethod
    def parse(cls, text: str) -> "FrameSchema":
        """``children,depth,navs,actions``"""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 4:
            raise ValueError(f"schema needs four comma-separated bounds, got {text!r}")
        return cls(*(int(p) for p in parts))


DEFAULT_SCHEMA = FrameSchema()


# -- canonical forms and fresh names ------------------------------------------

_LETTERS = [c for c in string.ascii_uppercase if c != "T"]


def session_name(k: int) -> str:
    """``T`` for the top-level session, then ``A``, ``B``, ..."""
    if k == 0:
        return "T"
    if k <= len(_LETTERS):
        return _LETTERS[k - 1]
    return f"S{k}"


def canonical(h: History) -> History:
    """Rename documents to chronological ranks and sessions by first appearance."""
    ids = {d.id: str(i) for i, d in enumerate(h.docs)}
    sessions = {s: session_name(k) for k, s in enumerate(h.sessions())}
    return History(
        tuple(
            DocumentRecord(ids[d.id], None if d.parent is None else ids[d.parent], sessions[d.session], d.active)
            for d in h.docs
        )
    )


def _sort_key(h: History) -> Tuple[int, str]:
    return (len(h), doc_line(h))


def sorted_histories(hs: Iterable[History]) -> List[History]:
    return sorted(hs, key=_sort_key)


# -- schema-admissible actions -------------------------------------------------


def admissible_actions(
    h: History,
    schema: FrameSchema,
    patches: PatchSet,
    fresh_id: str,
    fresh_session: str,
) -> List[Tuple[Action, History]]:
    """Every action the schema allows from ``h``, with its resulting history.

    Navigation counts are read off the state (session size minus one), so
    the admissible set depends only on ``h``.
    """
    out: List[Tuple[Action, History]] = []
    fa = fully_active(h)
    for d in h.docs:
        if d.id not in fa:
            continue
        if h.depth(d.id) < schema.max_depth and len(h.child_sessions(d.id)) < schema.max_child_sessions_per_document:
            a = LoadChild(d.id, fresh_session, fresh_id)
            out.append((a, load_child(h, d.id, fresh_session, fresh_id)))
    for s in h.sessions():
        if h.active_in(s) in fa and len(h.members(s)) - 1 < schema.max_navigations_per_session:
            a = Navigate(s, fresh_id)
            out.append((a, navigate(h, s, fresh_id, patches)))
    for delta in range(-len(h), len(h) + 1):
        if delta == 0:
            continue
        outcome = traverse_by(h, delta, patches)
        if isinstance(outcome, Changed) and outcome.history != h:
            out.append((TraverseBy(delta), outcome.history))
    return out


def enumerate_reachable(schema: FrameSchema = DEFAULT_SCHEMA, patches: PatchSet = PATCHED) -> Set[History]:
    """Canonical histories reachable from a single root document within the schema."""
    start = canonical(singleton())
    seen = {start}
    frontier = [start]
    for _ in range(schema.max_total_actions):
        nxt = []
        for h in frontier:
            fresh = str(len(h))
            fresh_session = session_name(len(h.sessions()))
            for _action, h2 in admissible_actions(h, schema, patches, fresh, fresh_session):
                c = canonical(h2)
                if c not in seen:
                    seen.add(c)
                    nxt.append(c)
        frontier = nxt
    return seen


# -- fundamental property ---------------------------------------------------------


@dataclass(frozen=True)
class FundamentalWitness:
    history: History
    delta: int
    delta2: int
    first: History  # after delta
    second: History  # after delta then delta2
    composite: TraversalOutcome  # traversing by delta + delta2 directly

    def describe(self) -> str:
        if isinstance(self.composite, Changed):
            got = format_ids(self.composite.history.active())
        else:
            got = f"abort ({self.composite.reason.value})"
        return (
            f"{doc_line(self.history)}: {self.delta:+d} then {self.delta2:+d} gives "
            f"{format_ids(self.second.active())}, {self.delta + self.delta2:+d} gives {got}"
        )

    def trace(self) -> Trace:
        """A trace that fails exactly when the violation reproduces."""
        return Trace(
            self.history,
            (TraverseBy(self.delta + self.delta2), ExpectActive(tuple(sorted(self.second.active())))),
        )


@dataclass(frozen=True)
class PropertyVerdict:
    holds: bool
    witness: Optional[FundamentalWitness] = None
    checked: int = 0  # (delta, delta2) pairs where both steps succeeded


def _pairs(h: History, bound: int, patches: PatchSet):
    """``(delta, delta2, first, second, composite)`` for every pair where both steps succeed."""
    for delta in range(-bound, bound + 1):
        first = traverse_by(h, delta, patches)
        if not isinstance(first, Changed):
            continue
        for delta2 in range(-bound, bound + 1):
            second = traverse_by(first.history, delta2, patches)
            if isinstance(second, Changed):
                yield delta, delta2, first.history, second, traverse_by(h, delta + delta2, patches)


def fundamental_witnesses(h: History, bound: int, patches: PatchSet) -> Iterator[FundamentalWitness]:
    """Every pair where both steps succeed but the combined step disagrees."""
    for delta, delta2, first, second, composite in _pairs(h, bound, patches):
        if composite != second:
            yield FundamentalWitness(h, delta, delta2, first, second.history, composite)


def check_fundamental(h: History, bound: int, patches: PatchSet = PATCHED) -> PropertyVerdict:
    checked = 0
    for delta, delta2, first, second, composite in _pairs(h, bound, patches):
        checked += 1
        if composite != second:
            w = FundamentalWitness(h, delta, delta2, first, second.history, composite)
            return PropertyVerdict(False, w, checked)
    return PropertyVerdict(True, None, checked)


CUMULATIVE = (("p1", P1), ("p1p2", P1P2), ("p1p2p3", P1P2P3))

MECHANISMS = {
    "p1": "intermediaries",
    "p1p2": "fully-active basis",
    "p1p2p3": "backward asymmetry",
    None: "not well-formed",
}


def witness_mechanism(w: FundamentalWitness) -> str:
    """Name the first cumulative patch under which this ``(delta, delta2)`` pair holds."""
    for name, patches in CUMULATIVE:
        first = traverse_by(w.history, w.delta, patches)
        if not isinstance(first, Changed):
            return MECHANISMS[name]
        second = traverse_by(first.history, w.delta2, patches)
        if not isinstance(second, Changed):
            return MECHANISMS[name]
        if traverse_by(w.history, w.delta + w.delta2, patches) == second:
            return MECHANISMS[name]
    return MECHANISMS[None]


# -- proof lemmas -----------------------------------------------------------------


@dataclass(frozen=True)
class LemmaVerdict:
    lemma: int
    status: str  # "holds" | "fails" | "vacuous"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.status != "fails"


def _counts(h: History) -> Tuple[int, int]:
    return len(joint_session_future(h, Basis.ACTIVE)), len(joint_session_past(h, Basis.ACTIVE))


def check_lemmas(h: History) -> Dict[int, LemmaVerdict]:
    """Instantiate the six proof lemmas at ``h``.

    Lemmas 1 and 2 compare the upfront-sequence traversals with a first
    step to the forward target / from the back target.  Lemmas 3 to 6 need a
    well-formed ``h`` and are vacuous otherwise.
    """
    out: Dict[int, LemmaVerdict] = {}
    f = forward_target(h)
    b = back_target(h)
    wf = is_well_formed(h)

    if f is None:
        out[1] = LemmaVerdict(1, "vacuous", "no forward target")
    else:
        h_f = traverse_to(h, f)
        n_max = len(joint_session_future(h, Basis.ACTIVE))
        bad = [
            n for n in range(1, n_max + 2)
            if forward_literal(h, n) != (Changed(h_f) if n == 1 else forward_literal(h_f, n - 1))
        ]
        out[1] = LemmaVerdict(1, "fails" if bad else "holds", f"mismatch at +{bad[0]}" if bad else "")

    if b is None:
        out[2] = LemmaVerdict(2, "vacuous", "no back target")
    else:
        h_b = traverse_from(h, b)
        n_max = len(joint_session_past(h, Basis.ACTIVE))
        bad = [
            n for n in range(1, n_max + 2)
            if backward_symmetric_literal(h, n)
            != (Changed(h_b) if n == 1 else backward_symmetric_literal(h_b, n - 1))
        ]
        out[2] = LemmaVerdict(2, "fails" if bad else "holds", f"mismatch at -{bad[0]}" if bad else "")

    if not wf:
        for k in (3, 4, 5, 6):
            out[k] = LemmaVerdict(k, "vacuous", "history is not well-formed")
        return out

    if f is None:
        out[3] = LemmaVerdict(3, "vacuous", "no forward target")
        out[5] = LemmaVerdict(5, "vacuous", "no forward target")
    else:
        h2 = traverse_to(h, f)
        if back_target(h2) != f:
            out[3] = LemmaVerdict(3, "fails", f"back target after stepping to {f} is {back_target(h2)}")
        elif traverse_from(h2, f) != h:
            out[3] = LemmaVerdict(3, "fails", f"stepping back from {f} does not restore the history")
        else:
            out[3] = LemmaVerdict(3, "holds")
        out[5] = LemmaVerdict(5, "holds" if is_well_formed(h2) else "fails")

    if b is None:
        out[4] = LemmaVerdict(4, "vacuous", "no back target")
        out[6] = LemmaVerdict(6, "vacuous", "no back target")
    else:
        h2 = traverse_from(h, b)
        if forward_target(h2) != b:
            out[4] = LemmaVerdict(4, "fails", f"forward target after stepping back from {b} is {forward_target(h2)}")
        elif traverse_to(h2, b) != h:
            out[4] = LemmaVerdict(4, "fails", f"stepping forward to {b} does not restore the history")
        else:
            out[4] = LemmaVerdict(4, "holds")
        out[6] = LemmaVerdict(6, "holds" if is_well_formed(h2) else "fails")
    return dict(sorted(out.items()))


def oracle_divergences(h: History) -> List[str]:
    """Where target-stepping, upfront-sequence, and entry-sequence traversals disagree."""
    out = []
    jf, jp = _counts(h)
    for n in range(1, jf + 2):
        canon = traverse_by(h, n, PATCHED)
        if canon != forward_literal(h, n):
            out.append(f"+{n}: stepping forward differs from the upfront joint-future fold")
        if canon != spec_traverse_by(h, n)[0]:
            out.append(f"+{n}: entry-sequence algorithm differs from the patched model")
    for n in range(1, jp + 2):
        if traverse_by(h, -n, PATCHED) != backward_symmetric_literal(h, n):
            out.append(f"-{n}: stepping back differs from the upfront back-sequence fold")
    return out


def unit_step_problems(h: History) -> List[str]:
    """Check that one forward/back step moves exactly one entry between future and past."""
    out = []
    jf, jp = _counts(h)
    f = forward_target(h)
    if f is not None:
        jf2, jp2 = _counts(traverse_to(h, f))
        if (jf2 - jf, jp2 - jp) != (-1, 1):
            out.append(f"forward step changed counts by {(jf2 - jf, jp2 - jp)}")
    b = back_target(h)
    if b is not None:
        jf2, jp2 = _counts(traverse_from(h, b))
        if (jf2 - jf, jp2 - jp) != (1, -1):
            out.append(f"back step changed counts by {(jf2 - jf, jp2 - jp)}")
    return out


def activation_problems(h: History, bound: int) -> List[str]:
    """Compare the entry-sequence classification with the state it produces."""
    out = []
    for delta in range(-bound, bound + 1):
        outcome, cls = spec_traverse_by(h, delta)
        if not isinstance(outcome, Changed) or delta == 0:
            continue
        after = outcome.history
        if after.active() != cls.activating:
            out.append(f"{delta:+d}: activating {format_ids(cls.activating)} but active {format_ids(after.active())}")
        if fully_active(after) != cls.fully_activating:
            out.append(
                f"{delta:+d}: fully activating {format_ids(cls.fully_activating)} "
                f"but fully active {format_ids(fully_active(after))}"
            )
    return out


# -- sweeps -----------------------------------------------------------------------


@dataclass
class SweepReport:
    patches: PatchSet
    schema: FrameSchema
    states: int = 0
    pairs_checked: int = 0
    not_well_formed: int = 0
    witnesses: List[FundamentalWitness] = field(default_factory=list)

    @property
    def violating_states(self) -> List[History]:
        seen: Dict[History, None] = {}
        for w in self.witnesses:
            seen.setdefault(w.history, None)
        return list(seen)

    def mechanisms(self) -> Counter:
        return Counter(witness_mechanism(w) for w in self.witnesses)


def sweep(
    states: Iterable[History],
    patches: PatchSet,
    schema: FrameSchema = DEFAULT_SCHEMA,
    all_witnesses: bool = True,
) -> SweepReport:
    """Check the fundamental property on each state with ``|delta| <= document count``."""
    report = SweepReport(patches, schema)
    for h in sorted_histories(states):
        report.states += 1
        if not is_well_formed(h):
            report.not_well_formed += 1
        if all_witnesses:
            for delta, delta2, first, second, composite in _pairs(h, len(h), patches):
                report.pairs_checked += 1
                if composite != second:
                    report.witnesses.append(
                        FundamentalWitness(h, delta, delta2, first, second.history, composite)
                    )
        else:
            verdict = check_fundamental(h, len(h), patches)
            report.pairs_checked += verdict.checked
            if verdict.witness is not None:
                report.witnesses.append(verdict.witness)
    return report


KNOWN_SHAPES = {
    "counterexample 1": "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)",
    "counterexample 2": "0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)",
    "witness W": "0.T(-)* 1.A(0) 2.B(0) 3.B(0)* 4.A(0)*",
}


def known_shapes(report: SweepReport) -> Dict[str, bool]:
    """Which catalogued violation shapes occur among the sweep's witnesses.

    Exact shapes are matched on canonical form.  The fully-active-basis
    mechanism is reported separately since the exact second counterexample
    needs more actions than the default schema allows.
    """
    from .history import from_doc_line

    states = set(report.violating_states)
    found = {name: canonical(from_doc_line(text)) in states for name, text in KNOWN_SHAPES.items()}
    found["fully-active basis mechanism"] = "fully-active basis" in report.mechanisms()
    return found


# -- random traces -----------------------------------------------------------------


def random_trace(seed: int, schema: FrameSchema = DEFAULT_SCHEMA, patches: PatchSet = PATCHED) -> Trace:
    """Seeded walk from a single root document through schema-admissible actions."""
    rng = random.Random(seed)
    h = singleton()
    next_id = 1
    actions: List[Action] = []
    for _ in range(schema.max_total_actions):
        options = admissible_actions(h, schema, patches, str(next_id), session_name(len(h.sessions())))
        if not options:
            break
        by_kind: Dict[str, List[Tuple[Action, History]]] = {}
        for a, h2 in options:
            by_kind.setdefault(type(a).__name__, []).append((a, h2))
        kind = rng.choice(sorted(by_kind))
        action, h = rng.choice(by_kind[kind])
        if not isinstance(action, TraverseBy):
            next_id += 1
        actions.append(action)
    return Trace(singleton(), tuple(actions))


def trace_states(trace: Trace, patches: PatchSet = PATCHED) -> List[History]:
    run = replay(trace, patches)
    return [trace.initial] + [s.history for s in run.steps]


# -- differential runs -----------------------------------------------------------


@dataclass(frozen=True)
class Divergence:
    index: int
    action: Action
    left: str
    right: str
    left_name: str
    right_name: str
    note: str = ""

    def describe(self) -> str:
        from .textio import format_action

        lines = [
            f"first divergence at action {self.index}: {format_action(self.action)}",
            f"  {self.left_name}: {self.left}",
            f"  {self.right_name}: {self.right}",
        ]
        if self.note:
            lines.append(f"  note: {self.note}")
        return "\n".join(lines)


ENTRY_SEQUENCE_NOTE = (
    "the entry-sequence algorithm walks back through the raw joint session past, "
    "while the patched model steps back from the latest active document that can go back; "
    "the two disagree on this well-formed history"
)


def _summary(step) -> str:
    if step.error is not None:
        return f"error: {step.error}"
    if isinstance(step.outcome, Aborted):
        return f"aborted ({step.outcome.reason.value})"
    return f"active {format_ids(step.history.active())}  [{doc_line(step.history)}]"


def differential_run(trace: Trace, left: PatchSet, right: PatchSet) -> Optional[Divergence]:
    lrun, rrun = replay(trace, left), replay(trace, right)
    for ls, rs in zip(lrun.steps, rrun.steps):
        lsum, rsum = _summary(ls), _summary(rs)
        if lsum != rsum:
            note = ""
            if (
                isinstance(ls.action, TraverseBy)
                and ls.action.delta < 0
                and left.entry_sequence_algorithm != right.entry_sequence_algorithm
            ):
                note = ENTRY_SEQUENCE_NOTE
            return Divergence(ls.index, ls.action, lsum, rsum, left.name, right.name, note)
    if len(lrun.steps) != len(rrun.steps):
        i = min(len(lrun.steps), len(rrun.steps))
        longer = lrun if len(lrun.steps) > len(rrun.steps) else rrun
        action = longer.steps[i].action
        lsum = _summary(lrun.steps[i]) if i < len(lrun.steps) else "stopped"
        rsum = _summary(rrun.steps[i]) if i < len(rrun.steps) else "stopped"
        return Divergence(i, action, lsum, rsum, left.name, right.name)
    return None

