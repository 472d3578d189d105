"""Navigation-history state: documents, sessions, activity, and derived sets.

A :class:`History` is an immutable sequence of :class:`DocumentRecord` values.
Sequence position is chronological order, so "earlier" always means "appears
before in ``docs``".  Document ids and session ids are opaque strings.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class Basis(enum.Enum):
    """Which documents contribute their session pasts/futures to the joint sets."""

    FULLY_ACTIVE = "fully-active"
    ACTIVE = "active"


@dataclass(frozen=True)
class DocumentRecord:
    id: str
    parent: Optional[str]
    session: str
    active: bool

    @property
    def is_root(self) -> bool:
        return self.parent is None


@dataclass(frozen=True)
class Violation:
    invariant: str  # "I1" .. "I6"
    docs: Tuple[str, ...]
    message: str
    index: Optional[int] = None  # position in the raw sequence, when one record is to blame
    line: Optional[int] = None  # source line, filled in by the text parsers

    def __str__(self) -> str:
        where = f"line {self.line}: " if self.line is not None else ""
        return f"{where}{self.invariant}: {self.message}"


class HistoryError(ValueError):
    """Raised for misuse of an operation (bad id, unmet precondition)."""


class InvalidHistory(HistoryError):
    def __init__(self, violations: Sequence[Violation]):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def check_invariants(raw: Sequence[DocumentRecord]) -> List[Violation]:
    """Return every invariant violation in ``raw`` (empty list when valid)."""
    violations: List[Violation] = []
    if not raw:
        return [Violation("I6", (), "history has no documents")]

    position: Dict[str, int] = {}
    for i, rec in enumerate(raw):
        if rec.id in position:
            violations.append(
                Violation("I1", (rec.id,), f"document {rec.id} appears more than once", i)
            )
        else:
            position[rec.id] = i

    for i, rec in enumerate(raw):
        if rec.parent is None:
            continue
        p = position.get(rec.parent)
        if p is None or p >= i:
            violations.append(
                Violation(
                    "I2",
                    (rec.id, rec.parent),
                    f"parent {rec.parent} of {rec.id} does not occur earlier",
                    i,
                )
            )

    parent_of: Dict[str, Optional[str]] = {}
    first_of: Dict[str, DocumentRecord] = {}
    active_count: Dict[str, List[str]] = {}
    for i, rec in enumerate(raw):
        if rec.session not in parent_of:
            parent_of[rec.session] = rec.parent
            first_of[rec.session] = rec
            active_count[rec.session] = []
        elif parent_of[rec.session] != rec.parent:
            other = first_of[rec.session]
            violations.append(
                Violation(
                    "I3",
                    (other.id, rec.id),
                    f"session {rec.session} members {other.id} and {rec.id} have different parents",
                    i,
                )
            )
        if rec.active:
            active_count[rec.session].append(rec.id)

    for session, actives in active_count.items():
        if len(actives) != 1:
            members = tuple(r.id for r in raw if r.session == session)
            what = "no active document" if not actives else f"{len(actives)} active documents"
            violations.append(
                Violation(
                    "I4",
                    tuple(actives) or members,
                    f"session {session} has {what}",
                    None if not actives else position.get(actives[-1]),
                )
            )

    root_sessions = sorted({r.session for r in raw if r.parent is None})
    if len(root_sessions) != 1:
        roots = tuple(r.id for r in raw if r.parent is None)
        violations.append(
            Violation(
                "I5",
                roots,
                "expected exactly one top-level session, found "
                + (", ".join(root_sessions) or "none"),
            )
        )
    return violations


@dataclass(frozen=True)
class History:
    """A valid navigation history.  Construction validates; use :func:`validate`."""

    docs: Tuple[DocumentRecord, ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        docs = tuple(self.docs)
        object.__setattr__(self, "docs", docs)
        problems = check_invariants(docs)
        if problems:
            raise InvalidHistory(problems)
        object.__setattr__(self, "_index", {d.id: i for i, d in enumerate(docs)})

    # -- basic access -----------------------------------------------------

    def __len__(self) -> int:
        return len(self.docs)

    def __contains__(self, doc_id: object) -> bool:
        return doc_id in self._index

    def __iter__(self):
        return iter(self.docs)

    @property
    def ids(self) -> Tuple[str, ...]:
        return tuple(d.id for d in self.docs)

    def position(self, doc_id: str) -> int:
        try:
            return self._index[doc_id]
        except KeyError:
            raise HistoryError(f"unknown document {doc_id!r}") from None

    def record(self, doc_id: str) -> DocumentRecord:
        return self.docs[self.position(doc_id)]

    def sessions(self) -> Tuple[str, ...]:
        """Session ids in order of first appearance."""
        seen: Dict[str, None] = {}
        for d in self.docs:
            seen.setdefault(d.session, None)
        return tuple(seen)

    def members(self, session: str) -> Tuple[str, ...]:
        return tuple(d.id for d in self.docs if d.session == session)

    def active_in(self, session: str) -> str:
        for d in self.docs:
            if d.session == session and d.active:
                return d.id
        raise HistoryError(f"unknown session {session!r}")

    def active(self) -> FrozenSet[str]:
        return frozenset(d.id for d in self.docs if d.active)

    def children(self, doc_id: str) -> Tuple[str, ...]:
        return tuple(d.id for d in self.docs if d.parent == doc_id)

    def child_sessions(self, doc_id: str) -> Tuple[str, ...]:
        seen: Dict[str, None] = {}
        for d in self.docs:
            if d.parent == doc_id:
                seen.setdefault(d.session, None)
        return tuple(seen)

    def depth(self, doc_id: str) -> int:
        n = 0
        rec = self.record(doc_id)
        while rec.parent is not None:
            rec = self.record(rec.parent)
            n += 1
        return n

    def earlier(self, a: str, b: str) -> bool:
        return self.position(a) < self.position(b)

    def sorted_ids(self, ids: Iterable[str], reverse: bool = False) -> Tuple[str, ...]:
        return tuple(sorted(ids, key=self.position, reverse=reverse))

    def with_docs(self, docs: Iterable[DocumentRecord]) -> "History":
        return History(tuple(docs))

    def __str__(self) -> str:
        return doc_line(self)


def validate(raw: Iterable[DocumentRecord]) -> History:
    """Build a :class:`History`, raising :class:`InvalidHistory` listing every violation."""
    return History(tuple(raw))


def doc_line(h: History) -> str:
    """Compact one-line notation, e.g. ``0.T(-)* 1.A(0)*``."""
    parts = []
    for d in h.docs:
        parts.append(f"{d.id}.{d.session}({d.parent or '-'}){'*' if d.active else ''}")
    return " ".join(parts)


def from_doc_line(text: str) -> History:
    """Parse the compact one-line notation produced by :func:`doc_line`."""
    recs = []
    for tok in text.split():
        active = tok.endswith("*")
        if active:
            tok = tok[:-1]
        head, _, rest = tok.partition("(")
        if not rest.endswith(")") or "." not in head:
            raise HistoryError(f"malformed document token {tok!r}")
        doc_id, _, session = head.partition(".")
        parent = rest[:-1]
        recs.append(DocumentRecord(doc_id, None if parent == "-" else parent, session, active))
    return validate(recs)


def singleton(doc_id: str = "0", session: str = "T") -> History:
    return History((DocumentRecord(doc_id, None, session, True),))


# -- derived sets ---------------------------------------------------------


def active_root(h: History) -> str:
    for d in h.docs:
        if d.parent is None and d.active:
            return d.id
    raise AssertionError("valid history without an active root")  # unreachable by I4+I5


def fully_active(h: History) -> FrozenSet[str]:
    """Documents reachable from the active root through active children."""
    fa = set()
    for d in h.docs:  # parents precede children, so one pass suffices
        if d.active and (d.parent is None or d.parent in fa):
            fa.add(d.id)
    return frozenset(fa)


def session_future(h: History, doc_id: str) -> Tuple[str, ...]:
    pos = h.position(doc_id)
    session = h.docs[pos].session
    return tuple(d.id for d in h.docs[pos + 1 :] if d.session == session)


def session_past(h: History, doc_id: str) -> Tuple[str, ...]:
    pos = h.position(doc_id)
    session = h.docs[pos].session
    return tuple(d.id for d in reversed(h.docs[:pos]) if d.session == session)


def _basis_set(h: History, basis: Basis) -> FrozenSet[str]:
    return h.active() if basis is Basis.ACTIVE else fully_active(h)


def joint_session_future(h: History, basis: Basis = Basis.ACTIVE) -> Tuple[str, ...]:
    """Session futures of the basis documents, merged in ascending chronological order."""
    sessions = {h.record(d).session for d in _basis_set(h, basis)}
    out = []
    seen_active = set()
    for d in h.docs:
        if d.session not in sessions:
            continue
        if d.active:
            seen_active.add(d.session)
        elif d.session in seen_active:
            out.append(d.id)
    return tuple(out)


def joint_session_past(h: History, basis: Basis = Basis.ACTIVE) -> Tuple[str, ...]:
    """Session pasts of the basis documents, merged in descending chronological order."""
    sessions = {h.record(d).session for d in _basis_set(h, basis)}
    out = []
    seen_active = set()
    for d in reversed(h.docs):
        if d.session not in sessions:
            continue
        if d.active:
            seen_active.add(d.session)
        elif d.session in seen_active:
            out.append(d.id)
    return tuple(out)


def can_go_back(h: History, doc_id: str) -> bool:
    return bool(session_past(h, doc_id))


def forward_target(h: History) -> Optional[str]:
    """Earliest entry of the (active-basis) joint session future."""
    jf = joint_session_future(h, Basis.ACTIVE)
    return jf[0] if jf else None


def back_target(h: History) -> Optional[str]:
    """Latest active document that has a session past."""
    for d in reversed(h.docs):
        if d.active and can_go_back(h, d.id):
            return d.id
    return None


def is_well_formed(h: History) -> bool:
    # An active document with a past must not come after any future entry of
    # any active document; both extremes are the back and forward targets.
    b = back_target(h)
    f = forward_target(h)
    return b is None or f is None or h.earlier(b, f)


def is_well_formed_brute(h: History) -> bool:
    """Quantified pair check, kept independent of :func:`is_well_formed`."""
    docs = h.docs
    n = len(docs)
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if docs[i].session == docs[j].session
    ]
    for a, b in pairs:
        if not docs[a].active:
            continue
        for c, d in pairs:
            if docs[d].active and not d <= b:
                return False
    return True
