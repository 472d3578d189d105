"""Navigation and traversal under a configurable set of patches.

Every function is pure: it takes a :class:`~navhist.history.History` and
returns a new one.  Traversals return a :class:`Changed` or :class:`Aborted`
outcome instead of raising, since running out of history is an ordinary
result of pressing "back" too many times.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple, Union

from .history import (
    Basis,
    DocumentRecord,
    History,
    HistoryError,
    back_target,
    fully_active,
    joint_session_future,
    joint_session_past,
    session_future,
    session_past,
)


@dataclass(frozen=True)
class PatchSet:
    p1_intermediaries: bool = False
    p2_active_basis: bool = False
    p3_symmetric_back: bool = False
    p4_delete_joint_future: bool = False
    # Traverse by computing the whole entry sequence up front and activating
    # each entry in turn, as the rewritten traversal algorithm does.
    entry_sequence_algorithm: bool = False

    @property
    def basis(self) -> Basis:
        return Basis.ACTIVE if self.p2_active_basis else Basis.FULLY_ACTIVE

    @property
    def name(self) -> str:
        for key, value in PRESETS.items():
            if value == self:
                return key
        on = [str(i) for i, flag in enumerate(self._flags(), 1) if flag]
        return "patches=" + (",".join(on) or "none")

    def _flags(self) -> Tuple[bool, bool, bool, bool]:
        return (
            self.p1_intermediaries,
            self.p2_active_basis,
            self.p3_symmetric_back,
            self.p4_delete_joint_future,
        )

    @classmethod
    def from_numbers(cls, numbers) -> "PatchSet":
        nums = set(numbers)
        bad = nums - {1, 2, 3, 4}
        if bad:
            raise ValueError(f"unknown patch number(s): {sorted(bad)}")
        return cls(1 in nums, 2 in nums, 3 in nums, 4 in nums)

    def __str__(self) -> str:
        return self.name


SPEC = PatchSet()
P1 = PatchSet(p1_intermediaries=True)
P1P2 = PatchSet(p1_intermediaries=True, p2_active_basis=True)
P1P2P3 = PatchSet(p1_intermediaries=True, p2_active_basis=True, p3_symmetric_back=True)
PATCHED = PatchSet(True, True, True, True)
SPEC_ALGORITHM = PatchSet(True, True, True, True, entry_sequence_algorithm=True)

PRESETS: Dict[str, PatchSet] = {
    "spec": SPEC,
    "p1": P1,
    "p1p2": P1P2,
    "p1p2p3": P1P2P3,
    "patched": PATCHED,
    "spec-algorithm": SPEC_ALGORITHM,
}


def preset(name: str) -> PatchSet:
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown preset {name!r}; choose from {', '.join(PRESETS)}"
        ) from None


class AbortReason(enum.Enum):
    INSUFFICIENT_FUTURE = "InsufficientFuture"
    INSUFFICIENT_PAST = "InsufficientPast"


@dataclass(frozen=True)
class Changed:
    history: History


@dataclass(frozen=True)
class Aborted:
    reason: AbortReason


TraversalOutcome = Union[Changed, Aborted]


class NonWellFormedStuck(RuntimeError):
    """Back-target stepping found no back target although the joint past was long enough."""


# -- navigation ------------------------------------------------------------


def delete_entry(h: History, doc_id: str, basis: Basis = Basis.ACTIVE) -> History:
    """Remove ``doc_id`` and its descendants; ``doc_id`` must be a joint-future entry."""
    if doc_id not in joint_session_future(h, basis):
        raise HistoryError(f"{doc_id} is not in the joint session future")
    doomed = {doc_id}
    for d in h.docs:
        if d.parent in doomed:
            doomed.add(d.id)
    return h.with_docs(d for d in h.docs if d.id not in doomed)


def replace_document(h: History, doc_id: str, fresh: str) -> History:
    if doc_id not in fully_active(h):
        raise HistoryError(f"{doc_id} is not fully active")
    if fresh in h:
        raise HistoryError(f"document id {fresh} is already in use")
    old = h.record(doc_id)
    docs = [
        DocumentRecord(d.id, d.parent, d.session, False) if d.id == doc_id else d
        for d in h.docs
    ]
    docs.append(DocumentRecord(fresh, old.parent, old.session, True))
    return h.with_docs(docs)


def navigate(h: History, session: str, fresh: str, patches: PatchSet = PATCHED) -> History:
    """Open ``fresh`` as the new current document of ``session``."""
    current = h.active_in(session)
    if current not in fully_active(h):
        raise HistoryError(f"active document {current} of session {session} is not fully active")
    if fresh in h:
        raise HistoryError(f"document id {fresh} is already in use")
    if patches.p4_delete_joint_future:
        basis = patches.basis
        doomed = joint_session_future(h, basis)
    else:
        basis = Basis.FULLY_ACTIVE
        doomed = session_future(h, current)
    for doc_id in reversed(doomed):
        if doc_id in h:  # may already be gone with an earlier ancestor
            h = delete_entry(h, doc_id, basis)
    return replace_document(h, current, fresh)


def load_child(h: History, parent: str, session: str, fresh: str) -> History:
    """Start a new nested session under ``parent`` with ``fresh`` as its only document."""
    if parent not in fully_active(h):
        raise HistoryError(f"parent {parent} is not fully active")
    if session in h.sessions():
        raise HistoryError(f"session {session} already exists")
    if fresh in h:
        raise HistoryError(f"document id {fresh} is already in use")
    return h.with_docs(h.docs + (DocumentRecord(fresh, parent, session, True),))


# -- traversal ---------------------------------------------------------------


def traverse_to(h: History, doc_id: str) -> History:
    """Make ``doc_id`` the active document of its session."""
    target = h.record(doc_id)
    if target.active:
        return h
    docs = []
    for d in h.docs:
        if d.session == target.session and d.active != (d.id == doc_id):
            d = DocumentRecord(d.id, d.parent, d.session, d.id == doc_id)
        docs.append(d)
    return h.with_docs(docs)


def traverse_from(h: History, doc_id: str) -> History:
    """Go back one entry in the session of ``doc_id``."""
    past = session_past(h, doc_id)
    if not past:
        raise HistoryError(f"{doc_id} has no session past")
    return traverse_to(h, past[0])


def _fold_to(h: History, entries) -> History:
    for e in entries:
        h = traverse_to(h, e)
    return h


def forward_literal(h: History, n: int, basis: Basis = Basis.ACTIVE) -> TraversalOutcome:
    """Traverse to each of the first ``n`` joint-future entries of ``h`` in turn."""
    jf = joint_session_future(h, basis)
    if len(jf) < n:
        return Aborted(AbortReason.INSUFFICIENT_FUTURE)
    return Changed(_fold_to(h, jf[:n]))


def backward_literal(h: History, n: int, basis: Basis = Basis.ACTIVE) -> TraversalOutcome:
    """Traverse to each of the first ``n`` joint-past entries of ``h`` in turn."""
    jp = joint_session_past(h, basis)
    if len(jp) < n:
        return Aborted(AbortReason.INSUFFICIENT_PAST)
    return Changed(_fold_to(h, jp[:n]))


def back_sequence(h: History) -> Tuple[str, ...]:
    """Active and joint-past documents, latest first, keeping only those that can go back.

    Session minima are skipped since there is nothing to traverse back from them.
    """
    jp = set(joint_session_past(h, Basis.ACTIVE))
    out = []
    for d in reversed(h.docs):
        if (d.active or d.id in jp) and session_past(h, d.id):
            out.append(d.id)
    return tuple(out)


def backward_symmetric_literal(h: History, n: int) -> TraversalOutcome:
    """Traverse from each of the first ``n`` entries of :func:`back_sequence`."""
    if len(joint_session_past(h, Basis.ACTIVE)) < n:
        return Aborted(AbortReason.INSUFFICIENT_PAST)
    for d in back_sequence(h)[:n]:
        h = traverse_from(h, d)
    return Changed(h)


def _step_forward(h: History, basis: Basis) -> History:
    jf = joint_session_future(h, basis)
    return traverse_to(h, jf[0])


def _step_back(h: History) -> History:
    b = back_target(h)
    if b is None:
        raise NonWellFormedStuck(f"no back target in {h}")
    return traverse_from(h, b)


@functools.lru_cache(maxsize=1 << 18)
def traverse_by(h: History, delta: int, patches: PatchSet = PATCHED) -> TraversalOutcome:
    if delta == 0:
        return Changed(h)
    if patches.entry_sequence_algorithm:
        return spec_traverse_by(h, delta)[0]
    basis = patches.basis
    n = abs(delta)
    if delta > 0:
        jf = joint_session_future(h, basis)
        if len(jf) < n:
            return Aborted(AbortReason.INSUFFICIENT_FUTURE)
        if not patches.p1_intermediaries:
            return Changed(traverse_to(h, jf[n - 1]))
        if basis is Basis.FULLY_ACTIVE:
            # Recomputing a fully-active joint future mid-way changes its
            # membership; intermediaries come from the initial list.
            return Changed(_fold_to(h, jf[:n]))
        for _ in range(n):
            h = _step_forward(h, basis)
        return Changed(h)

    jp = joint_session_past(h, basis)
    if len(jp) < n:
        return Aborted(AbortReason.INSUFFICIENT_PAST)
    if patches.p3_symmetric_back:
        for _ in range(n):
            h = _step_back(h)
        return Changed(h)
    if patches.p1_intermediaries:
        return Changed(_fold_to(h, jp[:n]))
    return Changed(traverse_to(h, jp[n - 1]))


# -- entry-sequence algorithm -----------------------------------------------


@dataclass(frozen=True)
class ActivationClassification:
    entry_sequence: Tuple[str, ...] = ()
    become_active: FrozenSet[str] = frozenset()
    stay_active: FrozenSet[str] = frozenset()
    activating: FrozenSet[str] = frozenset()
    fully_activating: FrozenSet[str] = frozenset()


def entry_sequence(h: History, delta: int, basis: Basis = Basis.ACTIVE) -> Optional[Tuple[str, ...]]:
    """First ``|delta|`` joint-future (or joint-past) entries, or ``None`` if too few exist."""
    n = abs(delta)
    if delta >= 0:
        entries = joint_session_future(h, basis)
    else:
        entries = joint_session_past(h, basis)
    if len(entries) < n:
        return None
    return entries[:n]


def classify_activation(
    h: History, delta: int, patches: PatchSet = PATCHED
) -> ActivationClassification:
    seq = entry_sequence(h, delta, patches.basis)
    if seq is None:
        raise HistoryError(f"traversal by {delta} would abort")
    last_per_session: Dict[str, str] = {}
    for e in seq:
        last_per_session[h.record(e).session] = e
    become = frozenset(last_per_session.values())
    stay = frozenset(
        d.id for d in h.docs if d.active and d.session not in last_per_session
    )
    activating = become | stay
    fully = set()
    for d in h.docs:  # chronological, so parents are decided first
        if d.id in activating and (d.parent is None or d.parent in fully):
            fully.add(d.id)
    return ActivationClassification(seq, become, stay, activating, frozenset(fully))


def spec_traverse_by(h: History, delta: int) -> Tuple[TraversalOutcome, ActivationClassification]:
    """Traverse by computing the entry sequence up front, then activating each entry."""
    if delta == 0:
        return Changed(h), ActivationClassification()
    seq = entry_sequence(h, delta, Basis.ACTIVE)
    if seq is None:
        reason = AbortReason.INSUFFICIENT_FUTURE if delta > 0 else AbortReason.INSUFFICIENT_PAST
        return Aborted(reason), ActivationClassification()
    classification = classify_activation(h, delta, SPEC_ALGORITHM)
    return Changed(_fold_to(h, seq)), classification
