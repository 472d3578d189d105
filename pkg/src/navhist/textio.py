"""Line formats for histories, scripts, and traces, plus the structured (JSON) mirror.

History lines::

    doc <id> session=<name> parent=<id|-> [active]

Script lines::

    loadchild <parent> <session> <id>
    navigate <session> <id>
    traverse <+n|-n|0>
    traverse-to <id>
    expect-active <id> ...
    expect-wf true|false
    expect-abort

A trace file is history lines followed by script lines.  ``#`` starts a
comment anywhere on a line.
"""

from __future__ import annotations

import dataclasses
import json
import re
from typing import Any, Dict, List, Tuple

from .history import DocumentRecord, History, InvalidHistory, check_invariants, singleton
from .trace import (
    Action,
    ExpectAbort,
    ExpectActive,
    ExpectWellFormed,
    LoadChild,
    Navigate,
    Trace,
    TraverseBy,
    TraverseTo,
)


class TraceSyntaxError(ValueError):
    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class StructuredFormatError(ValueError):
    pass


_TOKEN = re.compile(r"\S+")
_DELTA = re.compile(r"[+-]?\d+\Z")


def _tokens(raw: str) -> List[Tuple[int, str]]:
    """Tokens with their 1-based columns, comments stripped."""
    body = raw.split("#", 1)[0]
    return [(m.start() + 1, m.group()) for m in _TOKEN.finditer(body)]


def _parse_doc(lineno: int, toks: List[Tuple[int, str]]) -> DocumentRecord:
    if len(toks) < 4 or len(toks) > 5:
        raise TraceSyntaxError(lineno, toks[0][0], "expected: doc <id> session=<name> parent=<id|-> [active]")
    (_, doc_id), (scol, stok), (pcol, ptok) = toks[1], toks[2], toks[3]
    if not stok.startswith("session=") or len(stok) == len("session="):
        raise TraceSyntaxError(lineno, scol, f"expected session=<name>, got {stok!r}")
    if not ptok.startswith("parent=") or len(ptok) == len("parent="):
        raise TraceSyntaxError(lineno, pcol, f"expected parent=<id|->, got {ptok!r}")
    active = False
    if len(toks) == 5:
        acol, atok = toks[4]
        if atok != "active":
            raise TraceSyntaxError(lineno, acol, f"expected 'active' or end of line, got {atok!r}")
        active = True
    parent = ptok[len("parent="):]
    return DocumentRecord(doc_id, None if parent == "-" else parent, stok[len("session="):], active)


def _build(records: List[DocumentRecord], lines: List[int]) -> History:
    problems = check_invariants(records)
    if problems:
        located = [
            dataclasses.replace(v, line=lines[v.index]) if v.index is not None else v
            for v in problems
        ]
        raise InvalidHistory(located)
    return History(tuple(records))


def parse_history(text: str) -> History:
    records, lines = [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if not toks:
            continue
        if toks[0][1] != "doc":
            raise TraceSyntaxError(lineno, toks[0][0], f"expected 'doc', got {toks[0][1]!r}")
        records.append(_parse_doc(lineno, toks))
        lines.append(lineno)
    return _build(records, lines)


def serialize_history(h: History) -> str:
    out = []
    for d in h.docs:
        line = f"doc {d.id} session={d.session} parent={d.parent if d.parent is not None else '-'}"
        if d.active:
            line += " active"
        out.append(line + "\n")
    return "".join(out)


def _parse_action(lineno: int, toks: List[Tuple[int, str]]) -> Action:
    col, word = toks[0]
    args = [t for _, t in toks[1:]]

    def arity(n: int) -> None:
        if len(args) != n:
            raise TraceSyntaxError(lineno, col, f"{word} takes {n} argument(s), got {len(args)}")

    if word == "loadchild":
        arity(3)
        return LoadChild(*args)
    if word == "navigate":
        arity(2)
        return Navigate(*args)
    if word == "traverse":
        arity(1)
        if not _DELTA.match(args[0]):
            raise TraceSyntaxError(lineno, toks[1][0], f"expected a signed integer, got {args[0]!r}")
        return TraverseBy(int(args[0]))
    if word == "traverse-to":
        arity(1)
        return TraverseTo(args[0])
    if word == "expect-active":
        return ExpectActive(tuple(args))
    if word == "expect-wf":
        arity(1)
        if args[0] not in ("true", "false"):
            raise TraceSyntaxError(lineno, toks[1][0], f"expected true or false, got {args[0]!r}")
        return ExpectWellFormed(args[0] == "true")
    if word == "expect-abort":
        arity(0)
        return ExpectAbort()
    raise TraceSyntaxError(lineno, col, f"unknown action {word!r}")


def parse_script(text: str) -> Tuple[Action, ...]:
    actions = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if toks:
            actions.append(_parse_action(lineno, toks))
    return tuple(actions)


def format_action(a: Action) -> str:
    if isinstance(a, LoadChild):
        return f"loadchild {a.parent} {a.session} {a.id}"
    if isinstance(a, Navigate):
        return f"navigate {a.session} {a.id}"
    if isinstance(a, TraverseBy):
        return f"traverse {a.delta:+d}" if a.delta else "traverse 0"
    if isinstance(a, TraverseTo):
        return f"traverse-to {a.id}"
    if isinstance(a, ExpectActive):
        return " ".join(("expect-active",) + a.ids)
    if isinstance(a, ExpectWellFormed):
        return f"expect-wf {'true' if a.value else 'false'}"
    if isinstance(a, ExpectAbort):
        return "expect-abort"
    raise TypeError(f"not an action: {a!r}")


def serialize_script(actions) -> str:
    return "".join(format_action(a) + "\n" for a in actions)


def parse_trace(text: str) -> Trace:
    """History lines (optional; default is a single root document) then script lines."""
    records, lines, actions = [], [], []
    for lineno, raw in enumerate(text.splitlines(), 1):
        toks = _tokens(raw)
        if not toks:
            continue
        if toks[0][1] == "doc":
            if actions:
                raise TraceSyntaxError(lineno, toks[0][0], "doc lines must precede actions")
            records.append(_parse_doc(lineno, toks))
            lines.append(lineno)
        else:
            actions.append(_parse_action(lineno, toks))
    initial = _build(records, lines) if records else singleton()
    return Trace(initial, tuple(actions))


def serialize_trace(trace: Trace) -> str:
    return serialize_history(trace.initial) + serialize_script(trace.actions)


# -- structured mirror --------------------------------------------------------


def _dump(obj: Any) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def history_to_obj(h: History) -> Dict[str, Any]:
    return {
        "docs": [
            {"id": d.id, "session": d.session, "parent": d.parent, "active": d.active}
            for d in h.docs
        ]
    }


def action_to_obj(a: Action) -> Dict[str, Any]:
    if isinstance(a, LoadChild):
        return {"op": "loadchild", "parent": a.parent, "session": a.session, "id": a.id}
    if isinstance(a, Navigate):
        return {"op": "navigate", "session": a.session, "id": a.id}
    if isinstance(a, TraverseBy):
        return {"op": "traverse", "delta": a.delta}
    if isinstance(a, TraverseTo):
        return {"op": "traverse-to", "id": a.id}
    if isinstance(a, ExpectActive):
        return {"op": "expect-active", "ids": list(a.ids)}
    if isinstance(a, ExpectWellFormed):
        return {"op": "expect-wf", "value": a.value}
    if isinstance(a, ExpectAbort):
        return {"op": "expect-abort"}
    raise TypeError(f"not an action: {a!r}")


def trace_to_obj(t: Trace) -> Dict[str, Any]:
    return {"initial": history_to_obj(t.initial), "actions": [action_to_obj(a) for a in t.actions]}


def to_structured(value: Any) -> str:
    """Serialize a History, Trace, or report dict as compact JSON with stable key order."""
    if isinstance(value, History):
        obj = history_to_obj(value)
    elif isinstance(value, Trace):
        obj = trace_to_obj(value)
    elif isinstance(value, dict):
        obj = value
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")
    return _dump(obj)


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise StructuredFormatError(message)


def _str(obj: Dict[str, Any], key: str, where: str) -> str:
    _expect(isinstance(obj.get(key), str), f"{where}: {key!r} must be a string")
    return obj[key]


def history_from_obj(obj: Any) -> History:
    _expect(isinstance(obj, dict) and set(obj) == {"docs"}, "history must be an object with only 'docs'")
    _expect(isinstance(obj["docs"], list), "'docs' must be a list")
    records = []
    for i, d in enumerate(obj["docs"]):
        where = f"docs[{i}]"
        _expect(isinstance(d, dict) and set(d) == {"id", "session", "parent", "active"},
                f"{where}: expected keys id, session, parent, active")
        _expect(d["parent"] is None or isinstance(d["parent"], str), f"{where}: 'parent' must be a string or null")
        _expect(isinstance(d["active"], bool), f"{where}: 'active' must be a boolean")
        records.append(DocumentRecord(_str(d, "id", where), d["parent"], _str(d, "session", where), d["active"]))
    return History(tuple(records))


_ACTION_KEYS = {
    "loadchild": {"parent", "session", "id"},
    "navigate": {"session", "id"},
    "traverse": {"delta"},
    "traverse-to": {"id"},
    "expect-active": {"ids"},
    "expect-wf": {"value"},
    "expect-abort": set(),
}


def action_from_obj(obj: Any, where: str = "action") -> Action:
    _expect(isinstance(obj, dict) and obj.get("op") in _ACTION_KEYS, f"{where}: unknown or missing 'op'")
    op = obj["op"]
    _expect(set(obj) == _ACTION_KEYS[op] | {"op"}, f"{where}: {op} expects keys {sorted(_ACTION_KEYS[op])}")
    if op == "loadchild":
        return LoadChild(_str(obj, "parent", where), _str(obj, "session", where), _str(obj, "id", where))
    if op == "navigate":
        return Navigate(_str(obj, "session", where), _str(obj, "id", where))
    if op == "traverse":
        _expect(type(obj["delta"]) is int, f"{where}: 'delta' must be an integer")
        return TraverseBy(obj["delta"])
    if op == "traverse-to":
        return TraverseTo(_str(obj, "id", where))
    if op == "expect-active":
        ids = obj["ids"]
        _expect(isinstance(ids, list) and all(isinstance(x, str) for x in ids), f"{where}: 'ids' must be a list of strings")
        return ExpectActive(tuple(ids))
    if op == "expect-wf":
        _expect(isinstance(obj["value"], bool), f"{where}: 'value' must be a boolean")
        return ExpectWellFormed(obj["value"])
    return ExpectAbort()


def from_structured(text: str) -> Any:
    """Inverse of :func:`to_structured`: returns a History, a Trace, or a report dict."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructuredFormatError(str(exc)) from None
    _expect(isinstance(obj, dict), "top level must be an object")
    if "docs" in obj:
        return history_from_obj(obj)
    if "initial" in obj or "actions" in obj:
        _expect(set(obj) == {"initial", "actions"}, "trace must have exactly 'initial' and 'actions'")
        _expect(isinstance(obj["actions"], list), "'actions' must be a list")
        return Trace(
            history_from_obj(obj["initial"]),
            tuple(action_from_obj(a, f"actions[{i}]") for i, a in enumerate(obj["actions"])),
        )
    _expect("report" in obj, "unrecognized structured document")
    return obj


def load_any(text: str) -> Trace:
    """Read a trace from either the line format or the structured format."""
    if text.lstrip().startswith("{"):
        value = from_structured(text)
        if isinstance(value, History):
            return Trace(value, ())
        if isinstance(value, Trace):
            return value
        raise StructuredFormatError("expected a history or a trace")
    return parse_trace(text)
