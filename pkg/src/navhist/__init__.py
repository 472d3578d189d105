"""Executable semantics for web navigation history with nested browsing contexts."""

from .history import (
    Basis,
    DocumentRecord,
    History,
    HistoryError,
    InvalidHistory,
    Violation,
    active_root,
    back_target,
    check_invariants,
    forward_target,
    from_doc_line,
    fully_active,
    is_well_formed,
    joint_session_future,
    joint_session_past,
    session_future,
    session_past,
    singleton,
    validate,
)
from .semantics import (
    P1,
    P1P2,
    P1P2P3,
    PATCHED,
    PRESETS,
    SPEC,
    SPEC_ALGORITHM,
    Aborted,
    AbortReason,
    Changed,
    PatchSet,
    classify_activation,
    delete_entry,
    load_child,
    navigate,
    replace_document,
    spec_traverse_by,
    traverse_by,
    traverse_from,
    traverse_to,
)

__version__ = "0.1.0"
