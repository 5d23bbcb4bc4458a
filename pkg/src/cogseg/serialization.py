"""Deterministic text serialization of trained models.

A model file is a versioned, sectioned UTF-8 document with TSV rows inside
the sections. Sections are sorted, so saving is byte-deterministic and
save -> load -> save is the identity on bytes. Loading revalidates all model
invariants: analyses must concatenate to their words, cognate analyses must
have equal morph counts, and the stored lexicon and edit sections must match
an exact recount from the analyses.
"""

from __future__ import annotations

from .edits import Edit
from .errors import CogsegError, FormatError
from .model import Analysis, CognateModel, CognatePair

FORMAT_NAME = "cogseg-model"
FORMAT_VERSION = 1

_SECTIONS = (
    "LEXICON-A",
    "LEXICON-B",
    "EDITS",
    "PAIRS",
    "ANALYSES-A",
    "ANALYSES-B",
)

_ESCAPES = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "|": "\\|"}
_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "|": "|"}


def escape_field(text: str) -> str:
    """Escape the characters that would break the file format."""
    if not any(ch in text for ch in _ESCAPES):
        return text
    return "".join(_ESCAPES.get(ch, ch) for ch in text)


def unescape_field(text: str, path=None, line=None) -> str:
    if "\\" not in text:
        return text
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\":
            if i + 1 >= len(text) or text[i + 1] not in _UNESCAPES:
                raise FormatError("bad escape in %r" % text, path, line)
            out.append(_UNESCAPES[text[i + 1]])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _check_token(token: str, what: str) -> str:
    if not token or any(ch.isspace() for ch in token):
        raise CogsegError("%s %r is empty or contains whitespace" % (what, token))
    return token


def save_model(model: CognateModel, path) -> None:
    """Write the model to path; output bytes depend only on the model state."""
    lines = [
        "%s %d" % (FORMAT_NAME, FORMAT_VERSION),
        "alpha %r" % model.alpha,
        "edit-weight %r" % model.edit_weight,
        "edit-mode %s" % model.edit_mode,
        "seed %d" % model.seed,
        "dampening %s" % model.dampening,
    ]
    for lang, name in (("a", "LEXICON-A"), ("b", "LEXICON-B")):
        lines.append("[%s]" % name)
        lex = model.lexicons[lang]
        for form in sorted(lex.counts):
            _check_token(form, "morph")
            lines.append("%s\t%d" % (escape_field(form), lex.counts[form]))
    lines.append("[EDITS]")
    for form in sorted(model.edit_lexicon.counts):
        edit = Edit.from_form(form)
        lines.append(
            "%s|%s\t%d"
            % (
                escape_field(edit.lhs),
                escape_field(edit.rhs),
                model.edit_lexicon.counts[form],
            )
        )
    lines.append("[PAIRS]")
    for pair in sorted(model.pairs, key=lambda p: (p.word_a, p.word_b)):
        lines.append(
            "%s\t%s\t%d\t%d"
            % (
                escape_field(pair.word_a),
                escape_field(pair.word_b),
                pair.count_a,
                pair.count_b,
            )
        )
    for lang, name in (("a", "ANALYSES-A"), ("b", "ANALYSES-B")):
        lines.append("[%s]" % name)
        table = model.analyses[lang]
        for word in sorted(table):
            analysis = table[word]
            for morph in analysis.morphs:
                _check_token(morph, "morph")
            lines.append(
                "%s\t%d\t%s"
                % (
                    escape_field(word),
                    analysis.count,
                    " ".join(escape_field(m) for m in analysis.morphs),
                )
            )
    with open(path, "w", encoding="utf-8", newline="\n") as stream:
        stream.write("\n".join(lines))
        stream.write("\n")


def _parse_int(text: str, path, line) -> int:
    try:
        value = int(text)
    except ValueError:
        raise FormatError("bad integer %r" % text, path, line) from None
    return value


def _parse_positive(text: str, path, line) -> int:
    value = _parse_int(text, path, line)
    if value < 1:
        raise FormatError("count must be positive, got %d" % value, path, line)
    return value


def load_model(path) -> CognateModel:
    """Load and fully validate a model file."""
    with open(path, encoding="utf-8") as stream:
        raw = stream.read().split("\n")
    if raw and raw[-1] == "":
        raw.pop()
    if not raw:
        raise FormatError("empty model file", path, 1)
    head = raw[0].split(" ")
    if len(head) != 2 or head[0] != FORMAT_NAME:
        raise FormatError("not a %s file" % FORMAT_NAME, path, 1)
    if head[1] != str(FORMAT_VERSION):
        raise FormatError(
            "unsupported format version %s (expected %d)" % (head[1], FORMAT_VERSION),
            path,
            1,
        )
    header: dict[str, str] = {}
    lineno = 1
    while lineno < len(raw) and not raw[lineno].startswith("["):
        key, sep, value = raw[lineno].partition(" ")
        if not sep:
            raise FormatError("bad header line %r" % raw[lineno], path, lineno + 1)
        header[key] = value
        lineno += 1
    for key in ("alpha", "edit-weight", "edit-mode", "seed", "dampening"):
        if key not in header:
            raise FormatError("missing header field %r" % key, path, lineno + 1)
    try:
        alpha = float(header["alpha"])
        edit_weight = float(header["edit-weight"])
    except ValueError:
        raise FormatError("bad numeric header field", path, 1) from None

    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    for offset in range(lineno, len(raw)):
        line = raw[offset]
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name not in _SECTIONS:
                raise FormatError("unknown section %r" % name, path, offset + 1)
            if name in sections:
                raise FormatError("duplicate section %r" % name, path, offset + 1)
            sections[name] = []
            current = name
        elif current is None:
            raise FormatError("data before first section", path, offset + 1)
        else:
            sections[current].append((offset + 1, line))
    for name in _SECTIONS:
        if name not in sections:
            raise FormatError("missing section [%s]" % name, path, len(raw))

    try:
        model = CognateModel(
            alpha=alpha,
            edit_weight=edit_weight,
            edit_mode=header["edit-mode"],
            seed=_parse_int(header["seed"], path, 1),
            dampening=header["dampening"],
        )
    except CogsegError as exc:
        raise FormatError(str(exc), path, 1) from exc

    pair_counts: dict[tuple[str, str], tuple[int, int]] = {}
    for line_no, line in sections["PAIRS"]:
        fields = line.split("\t")
        if len(fields) != 4:
            raise FormatError("pair rows need 4 fields", path, line_no)
        word_a = unescape_field(fields[0], path, line_no)
        word_b = unescape_field(fields[1], path, line_no)
        count_a = _parse_positive(fields[2], path, line_no)
        count_b = _parse_positive(fields[3], path, line_no)
        pair = CognatePair(word_a, word_b, count_a, count_b)
        try:
            model.register_pair(pair)
        except CogsegError as exc:
            raise FormatError(str(exc), path, line_no) from exc
        pair_counts[pair.key] = (count_a, count_b)

    for lang, name in (("a", "ANALYSES-A"), ("b", "ANALYSES-B")):
        for line_no, line in sections[name]:
            fields = line.split("\t")
            if len(fields) != 3:
                raise FormatError("analysis rows need 3 fields", path, line_no)
            word = unescape_field(fields[0], path, line_no)
            count = _parse_positive(fields[1], path, line_no)
            morphs = tuple(
                unescape_field(m, path, line_no) for m in fields[2].split(" ")
            )
            try:
                model.add_analysis(Analysis(word, morphs, count), lang)
            except CogsegError as exc:
                raise FormatError(str(exc), path, line_no) from exc

    for pair in model.pairs:
        for lang, word, count in (
            ("a", pair.word_a, pair.count_a),
            ("b", pair.word_b, pair.count_b),
        ):
            analysis = model.analyses[lang].get(word)
            if analysis is None:
                raise FormatError(
                    "pair word %r has no analysis in %s" % (word, lang), path, None
                )
            if analysis.count != count:
                raise FormatError(
                    "pair count %d disagrees with analysis count %d for %r"
                    % (count, analysis.count, word),
                    path,
                    None,
                )

    for name, lexicon in (
        ("LEXICON-A", model.lexicons["a"]),
        ("LEXICON-B", model.lexicons["b"]),
        ("EDITS", model.edit_lexicon),
    ):
        stored: dict[str, int] = {}
        for line_no, line in sections[name]:
            fields = line.split("\t")
            if len(fields) != 2:
                raise FormatError("lexicon rows need 2 fields", path, line_no)
            form = unescape_field(fields[0], path, line_no)
            stored[form] = _parse_positive(fields[1], path, line_no)
            if form not in lexicon.counts or lexicon.counts[form] != stored[form]:
                raise FormatError(
                    "stored count for %r disagrees with the analyses" % form,
                    path,
                    line_no,
                )
        if stored != lexicon.counts:
            missing = sorted(set(lexicon.counts) - set(stored))[:3]
            raise FormatError(
                "[%s] is missing entries (e.g. %r)" % (name, missing), path, None
            )
    return model


def report_edits(model: CognateModel, top_k: int, direction: str = "ab"):
    """Most used edits, by descending lexicon count.

    direction "ab" reports edits as stored (language a to b); "ba" displays
    them reversed. Returns at most top_k (edit, count) rows.
    """
    if direction not in ("ab", "ba"):
        raise CogsegError("direction must be 'ab' or 'ba'")
    rows = []
    for form, count in model.edit_lexicon.counts.items():
        edit = Edit.from_form(form)
        if direction == "ba":
            edit = edit.reversed()
        rows.append((edit, count))
    rows.sort(key=lambda r: (-r[1], r[0].lhs, r[0].rhs))
    return rows[: max(0, top_k)]
