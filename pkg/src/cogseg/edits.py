"""Character-level alignment and edit extraction for linked morph pairs.

Edits describe how a morph in language 1 is rewritten into its counterpart
in language 2 as a pair of substrings (lhs -> rhs), with positions dropped.
They are produced in three steps: minimal alignment, merging of adjacent
non-match operations, and extension of one-sided edits over a neighboring
unchanged character (so a lengthened sound becomes 'a -> aa' rather than
the harder-to-reuse ' -> a').

All functions operate on Unicode code points, never bytes.

Alignment tie-breaking is fully deterministic: among minimum-distance
alignments, the one with the fewest contiguous runs of non-match operations
is preferred, and remaining ties are resolved left to right with the
operation preference match > substitute > delete > insert.  Plain
per-operation preference alone cannot keep edit regions contiguous, which
the merging step depends on; minimizing run count is what makes the
extraction stable.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

from .errors import ContractError

# Separates lhs from rhs in the serialized form of an edit. Reserved: may not
# occur inside training tokens.
EDIT_BOUNDARY = "|"

MATCH = "match"
SUBSTITUTE = "substitute"
DELETE = "delete"
INSERT = "insert"

_INF = (1 << 60, 1 << 60)


@dataclass(frozen=True)
class AlignmentOp:
    """One step of a character alignment.

    source/target are None when the op does not consume a character on that
    side (insert/delete respectively). Positions index into the respective
    strings; for the non-consuming side the position is where the gap sits.
    """

    kind: str
    source: str | None
    target: str | None
    source_pos: int
    target_pos: int


@dataclass(frozen=True)
class Edit:
    """A positionless rewrite of one substring into another."""

    lhs: str
    rhs: str

    def __post_init__(self):
        if self.lhs == self.rhs:
            raise ContractError("edit sides must differ: %r" % (self.lhs,))
        if EDIT_BOUNDARY in self.lhs or EDIT_BOUNDARY in self.rhs:
            raise ContractError("edit sides may not contain %r" % EDIT_BOUNDARY)

    @property
    def form(self) -> str:
        """Serialized form, also the key used in the edit lexicon."""
        return self.lhs + EDIT_BOUNDARY + self.rhs

    @classmethod
    def from_form(cls, form: str) -> "Edit":
        lhs, sep, rhs = form.partition(EDIT_BOUNDARY)
        if not sep:
            raise ContractError("malformed edit form %r" % form)
        return cls(lhs, rhs)

    def reversed(self) -> "Edit":
        return Edit(self.rhs, self.lhs)

    def __str__(self):
        return "%s→%s" % (self.lhs or "ε", self.rhs or "ε")


@dataclass(frozen=True)
class PositionedEdit:
    """An Edit plus the source span it rewrites (source[start:end] == lhs)."""

    edit: Edit
    start: int
    end: int


@dataclass(frozen=True)
class EditScript:
    """Ordered edits extracted from one morph pair; empty for identical morphs."""

    positioned: tuple[PositionedEdit, ...]

    @property
    def edits(self) -> tuple[Edit, ...]:
        return tuple(p.edit for p in self.positioned)

    def __len__(self):
        return len(self.positioned)


def levenshtein_distance(a: str, b: str) -> int:
    """Plain unit-cost edit distance."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return la or lb
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        cur = [i] + [0] * lb
        ca = a[i - 1]
        for j in range(1, lb + 1):
            cur[j] = min(
                prev[j - 1] + (ca != b[j - 1]),
                prev[j] + 1,
                cur[j - 1] + 1,
            )
        prev = cur
    return prev[lb]


def _suffix_table(a: str, b: str):
    """(cost, runs) of aligning a[i:] with b[j:], for both predecessor states.

    State p=1 means the operation just before (i, j) was a non-match, in
    which case a following non-match continues the current run for free.
    """
    la, lb = len(a), len(b)
    table = [[[_INF, _INF] for _ in range(lb + 1)] for _ in range(la + 1)]
    table[la][lb][0] = table[la][lb][1] = (0, 0)
    for i in range(la, -1, -1):
        row = table[i]
        for j in range(lb, -1, -1):
            if i == la and j == lb:
                continue
            same = i < la and j < lb and a[i] == b[j]
            for p in (0, 1):
                best = _INF
                if same:
                    best = table[i + 1][j + 1][0]
                bump = 1 if p == 0 else 0
                if i < la and j < lb and not same:
                    c, r = table[i + 1][j + 1][1]
                    cand = (c + 1, r + bump)
                    if cand < best:
                        best = cand
                if i < la:
                    c, r = table[i + 1][j][1]
                    cand = (c + 1, r + bump)
                    if cand < best:
                        best = cand
                if j < lb:
                    c, r = row[j + 1][1]
                    cand = (c + 1, r + bump)
                    if cand < best:
                        best = cand
                row[j][p] = best
    return table


def levenshtein_align(a: str, b: str) -> list[AlignmentOp]:
    """One deterministic minimum-cost alignment of a with b.

    The number of substitute/delete/insert ops equals the Levenshtein
    distance; tie-breaking is as described in the module docstring.
    """
    table = _suffix_table(a, b)
    la, lb = len(a), len(b)
    ops: list[AlignmentOp] = []
    i = j = p = 0
    while i < la or j < lb:
        cur = table[i][j][p]
        if i < la and j < lb and a[i] == b[j] and table[i + 1][j + 1][0] == cur:
            ops.append(AlignmentOp(MATCH, a[i], b[j], i, j))
            i, j, p = i + 1, j + 1, 0
            continue
        bump = 1 if p == 0 else 0
        if i < la and j < lb and a[i] != b[j]:
            c, r = table[i + 1][j + 1][1]
            if (c + 1, r + bump) == cur:
                ops.append(AlignmentOp(SUBSTITUTE, a[i], b[j], i, j))
                i, j, p = i + 1, j + 1, 1
                continue
        if i < la:
            c, r = table[i + 1][j][1]
            if (c + 1, r + bump) == cur:
                ops.append(AlignmentOp(DELETE, a[i], None, i, j))
                i, p = i + 1, 1
                continue
        ops.append(AlignmentOp(INSERT, None, b[j], i, j))
        j, p = j + 1, 1
    return ops


def _merge_spans(ops) -> list[list[int]]:
    """Collapse consecutive non-match ops into spans [a0, a1, b0, b1)."""
    spans: list[list[int]] = []
    open_span = False
    for op in ops:
        if op.kind == MATCH:
            open_span = False
            continue
        a1 = op.source_pos + (op.source is not None)
        b1 = op.target_pos + (op.target is not None)
        if open_span:
            spans[-1][1] = a1
            spans[-1][3] = b1
        else:
            spans.append([op.source_pos, a1, op.target_pos, b1])
            open_span = True
    return spans


def _extend_and_remerge(a: str, b: str, spans: list[list[int]]) -> list[list[int]]:
    """Grow one-sided spans over a neighboring equal character, re-merging
    spans that become adjacent, until nothing changes.

    A neighbor is eligible when it is an unchanged (matched) character, the
    non-empty side of the edit contains it, and it is not already claimed by
    the adjacent span. The left neighbor is preferred over the right.
    """
    changed = True
    while changed:
        changed = False
        for k, span in enumerate(spans):
            a0, a1, b0, b1 = span
            lhs_empty = a0 == a1
            rhs_empty = b0 == b1
            if lhs_empty == rhs_empty:
                continue
            nonempty = a[a0:a1] if rhs_empty else b[b0:b1]
            prev = spans[k - 1] if k > 0 else None
            nxt = spans[k + 1] if k + 1 < len(spans) else None
            can_left = (
                a0 > 0
                and b0 > 0
                and a[a0 - 1] == b[b0 - 1]
                and a[a0 - 1] in nonempty
                and (prev is None or (prev[1] < a0 and prev[3] < b0))
            )
            if can_left:
                span[0] = a0 - 1
                span[2] = b0 - 1
                changed = True
                continue
            can_right = (
                a1 < len(a)
                and b1 < len(b)
                and a[a1] == b[b1]
                and a[a1] in nonempty
                and (nxt is None or (a1 < nxt[0] and b1 < nxt[2]))
            )
            if can_right:
                span[1] = a1 + 1
                span[3] = b1 + 1
                changed = True
        merged: list[list[int]] = []
        for span in spans:
            if merged and merged[-1][1] == span[0] and merged[-1][3] == span[2]:
                merged[-1][1] = span[1]
                merged[-1][3] = span[3]
                changed = True
            else:
                merged.append(span)
        spans = merged
    return spans


@functools.lru_cache(maxsize=1 << 17)
def extract_edits(morph_a: str, morph_b: str) -> EditScript:
    """Canonical edit script rewriting morph_a into morph_b.

    Pure and deterministic; results are cached, so the returned script must
    be treated as immutable (it is).
    """
    if morph_a == morph_b:
        return EditScript(())
    ops = levenshtein_align(morph_a, morph_b)
    spans = _merge_spans(ops)
    spans = _extend_and_remerge(morph_a, morph_b, spans)
    positioned = tuple(
        PositionedEdit(Edit(morph_a[a0:a1], morph_b[b0:b1]), a0, a1)
        for a0, a1, b0, b1 in spans
    )
    return EditScript(positioned)


def apply_edit_script(morph: str, script: EditScript) -> str:
    """Apply a script extracted from (morph, target); returns target exactly."""
    pieces = []
    pos = 0
    for pe in script.positioned:
        if pe.start < pos or pe.end > len(morph):
            raise ContractError(
                "edit span %d:%d does not fit %r" % (pe.start, pe.end, morph)
            )
        if morph[pe.start : pe.end] != pe.edit.lhs:
            raise ContractError(
                "edit lhs %r does not match source at %d:%d"
                % (pe.edit.lhs, pe.start, pe.end)
            )
        pieces.append(morph[pos : pe.start])
        pieces.append(pe.edit.rhs)
        pos = pe.end
    pieces.append(morph[pos:])
    return "".join(pieces)
