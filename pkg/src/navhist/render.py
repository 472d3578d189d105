"""Graphviz and plain-text pictures of a history.

Both follow the usual diagram conventions: left-to-right is chronological,
documents of one session are grouped, and only active children get a
parent edge.  Output depends only on the history, so equal histories render
byte-identically.
"""

from __future__ import annotations

from typing import List

from .history import History, fully_active


def _q(s: str) -> str:
    return '"{}"'.format(s.replace("\\", "\\\\").replace('"', r"\""))


def render_dot(h: History) -> str:
    fa = fully_active(h)
    out: List[str] = [
        "digraph history {\n",
        "  rankdir=LR;\n",
        '  node [shape=circle, fontname="Helvetica"];\n',
    ]
    for n, session in enumerate(h.sessions()):
        out.append(f"  subgraph cluster_{n} {{\n")
        out.append(f"    label={_q(session)};\n")
        out.append("    style=dashed;\n")
        for doc_id in h.members(session):
            d = h.record(doc_id)
            if doc_id in fa:
                attrs = "style=filled, fillcolor=black, fontcolor=white"
            elif d.active:
                attrs = "style=filled, fillcolor=gray80"
            else:
                attrs = "style=solid"
            out.append(f"    {_q(doc_id)} [{attrs}];\n")
        out.append("  }\n")
    # Invisible chain keeps the chronological order left to right.
    if len(h) > 1:
        chain = " -> ".join(_q(d) for d in h.ids)
        out.append(f"  {chain} [style=invis];\n")
    for d in h.docs:
        if d.active and d.parent is not None:
            out.append(f"  {_q(d.parent)} -> {_q(d.id)};\n")
    out.append("}\n")
    return "".join(out)


def render_ascii(h: History) -> str:
    """One row per session, one column per document in chronological order.

    ``[d]`` is fully active, ``(d)`` active but not fully, `` d `` inactive.
    """
    fa = fully_active(h)
    width = max(len(d) for d in h.ids) + 2
    label_w = max(len(s) for s in h.sessions())
    cells = {}
    for d in h.docs:
        if d.id in fa:
            cells[d.id] = f"[{d.id}]"
        elif d.active:
            cells[d.id] = f"({d.id})"
        else:
            cells[d.id] = f" {d.id} "
    rows = []
    for session in h.sessions():
        parent = h.record(h.members(session)[0]).parent
        row = [f"{session:<{label_w}} |"]
        for d in h.docs:
            row.append(cells[d.id].center(width) if d.session == session else " " * width)
        tail = f"  parent {parent}" if parent is not None else ""
        rows.append(" ".join(row).rstrip() + tail + "\n")
    return "".join(rows)
