import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from navhist.history import DocumentRecord, History, from_doc_line

TRACES = Path(__file__).resolve().parent.parent / "traces"

CE1 = "0.T(-)* 1.A(0)* 2.B(0)* 3.A(0) 4.B(0)"
CE2 = "0.T(-)* 1.A(0)* 2.A(0) 3.B(2)* 4.B(2) 5.T(-)"
CE3 = "0.T(-)* 1.A(0) 2.B(0)* 3.B(0) 4.A(0)*"
CE4 = "0.T(-)* 1.A(0)* 2.B(1) 3.A(0) 4.B(1)*"
CE5 = "0.T(-)* 1.A(0)* 2.B(1)* 3.A(0)"
W = "0.T(-)* 1.A(0) 2.B(0) 3.B(0)* 4.A(0)*"
# the running example before and after navigating from 1 to 6
RUNNING = "0.T(-)* 1.A(0)* 2.B(1) 3.C(0)* 4.B(1)* 5.A(0)"
RUNNING_NAV = "0.T(-)* 1.A(0) 2.B(1) 3.C(0)* 4.B(1)* 6.A(0)*"


def H(text: str) -> History:
    return from_doc_line(text)


def active(h) -> set:
    return set(h.active())


@pytest.fixture
def traces_dir() -> Path:
    return TRACES


def random_history(seed: int, max_docs: int = 9) -> History:
    """Seeded arbitrary valid history, for round-trip sweeps outside hypothesis."""
    rng = random.Random(seed)
    n = rng.randint(1, max_docs)
    session_of = ["T"]
    parent_of = {"T": None}
    for i in range(1, n):
        if rng.random() < 0.5:
            session_of.append(rng.choice(sorted(parent_of)))
        else:
            name = f"S{i}"
            parent_of[name] = str(rng.randrange(i))
            session_of.append(name)
    chosen = {s: rng.choice([i for i, x in enumerate(session_of) if x == s]) for s in parent_of}
    # non-numeric ids exercise the tokenizer too
    ids = [str(i) if rng.random() < 0.8 else f"d{i}" for i in range(n)]
    docs = []
    for i, s in enumerate(session_of):
        parent = parent_of[s]
        docs.append(DocumentRecord(ids[i], None if parent is None else ids[int(parent)], s, chosen[s] == i))
    return History(tuple(docs))


@st.composite
def histories(draw, max_docs: int = 8) -> History:
    """Arbitrary valid histories (not necessarily reachable by navigation)."""
    n = draw(st.integers(1, max_docs))
    session_of = ["T"]
    parent_of = {"T": None}
    for i in range(1, n):
        existing = sorted(parent_of)
        if draw(st.booleans()):
            session_of.append(draw(st.sampled_from(existing)))
        else:
            name = f"S{i}"
            parent_of[name] = str(draw(st.integers(0, i - 1)))
            session_of.append(name)
    docs = []
    chosen = {}
    for s in parent_of:
        members = [i for i, x in enumerate(session_of) if x == s]
        chosen[s] = draw(st.sampled_from(members))
    for i, s in enumerate(session_of):
        docs.append(DocumentRecord(str(i), parent_of[s], s, chosen[s] == i))
    return History(tuple(docs))


@pytest.fixture(scope="session")
def patched_states():
    from navhist.semantics import PATCHED
    from navhist.verification import enumerate_reachable

    return enumerate_reachable(patches=PATCHED)


@pytest.fixture(scope="session")
def spec_states():
    from navhist.semantics import SPEC
    from navhist.verification import enumerate_reachable

    return enumerate_reachable(patches=SPEC)
