"""Applying trained models to text: Viterbi segmentation, corpus streaming,
source-side override, and target-language tagging.

Corpus segmentation is lookup-first: words seen in training reuse their
stored analyses, unseen words are segmented with the Viterbi algorithm under
the unigram morph distribution. Out-of-lexicon single characters receive an
additive smoothing penalty so that every word is segmentable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .errors import CogsegError, ContractError
from .model import Analysis, CognateModel, CountLexicon

# Pseudo-tokens of this shape select the target language in a multilingual
# system; they pass through segmentation unsplit.
TAG_PATTERN = re.compile(r"^<to_[0-9A-Za-z]+>$")

DEFAULT_JOINER = "@@"


@dataclass(frozen=True)
class SegmenterConfig:
    """Output conventions and unknown-morph smoothing.

    joiner marks non-final subwords of a token; unknown_char_penalty is the
    extra cost in nats (on top of ln N) of emitting an out-of-lexicon single
    character, chosen large so known morphs always win when available.
    """

    joiner: str = DEFAULT_JOINER
    unknown_char_penalty: float = 20.0

    def __post_init__(self):
        if not self.joiner or self.joiner.strip() != self.joiner:
            raise ContractError("joiner must be a non-empty token-safe string")


def viterbi_segment(
    lexicon: CountLexicon, word: str, config: SegmenterConfig = SegmenterConfig()
) -> Analysis:
    """Most probable segmentation of word under the lexicon's unigram model.

    Ties are broken deterministically: fewest morphs first, then the
    leftmost-longest morph sequence.
    """
    if not word:
        raise ContractError("cannot segment an empty word")
    counts = lexicon.counts
    log_tokens = math.log(lexicon.tokens) if lexicon.tokens > 0 else 0.0
    unknown = log_tokens + config.unknown_char_penalty
    n = len(word)
    # best[i]: (cost, morph count, negated morph lengths, predecessor) over word[:i]
    best: list[tuple | None] = [None] * (n + 1)
    best[0] = (0.0, 0, (), -1)
    for i in range(1, n + 1):
        for j in range(0, i):
            base = best[j]
            if base is None:
                continue
            morph = word[j:i]
            count = counts.get(morph)
            if count is not None:
                step = log_tokens - math.log(count)
            elif i - j == 1:
                step = unknown
            else:
                continue
            cand = (base[0] + step, base[1] + 1, base[2] + (j - i,), j)
            if best[i] is None or cand[:3] < best[i][:3]:
                best[i] = cand
    morphs: list[str] = []
    pos = n
    while pos > 0:
        prev = best[pos][3]
        morphs.append(word[prev:pos])
        pos = prev
    morphs.reverse()
    return Analysis(word, tuple(morphs), 1)


def _token_morphs(model: CognateModel, language: str, token: str, config) -> tuple[str, ...]:
    stored = model.analyses[language].get(token)
    if stored is not None:
        return stored.morphs
    return viterbi_segment(model.lexicons[language], token, config).morphs


def join_morphs(morphs, joiner: str) -> str:
    """Render a token's morphs with the joiner marking non-final subwords.

    Rejects morphs containing the joiner, which would make the output
    ambiguous to undo.
    """
    if len(morphs) == 1:
        return morphs[0]
    if any(joiner in m for m in morphs):
        raise ContractError("joiner %r occurs inside a morph of %r" % (joiner, morphs))
    return " ".join(m + joiner for m in morphs[:-1]) + " " + morphs[-1]


def segment_tokens(model: CognateModel, language: str, tokens, config) -> list[str]:
    out = []
    for token in tokens:
        if not token or TAG_PATTERN.match(token):
            out.append(token)
        else:
            out.append(join_morphs(_token_morphs(model, language, token, config), config.joiner))
    return out


def segment_corpus(
    model: CognateModel,
    lines,
    language: str,
    config: SegmenterConfig = SegmenterConfig(),
):
    """Segment a stream of whitespace-tokenized lines; yields output lines.

    Joining the emitted morphs and stripping the joiner markers restores the
    input stream exactly. I/O and decoding failures are reported with the
    offending line number.
    """
    lineno = 0
    try:
        for line in lines:
            lineno += 1
            line = line.rstrip("\n")
            yield " ".join(segment_tokens(model, language, line.split(" "), config))
    except (OSError, UnicodeError) as exc:
        raise CogsegError("line %d: %s" % (lineno + 1, exc)) from exc


def unjoin(line: str, joiner: str = DEFAULT_JOINER) -> str:
    """Undo segment markers on one line, restoring the original tokens."""
    return line.replace(joiner + " ", "")


def override_source_segmentation(
    source_lexicon: CountLexicon,
    cognate_model: CognateModel,
    word: str,
    config: SegmenterConfig = SegmenterConfig(),
) -> Analysis:
    """Segmentation of a source-language word, kept consistent with the
    target side: words also present in either target analysis table reuse
    that stored analysis (language a preferred), everything else falls back
    to Viterbi under the source lexicon.
    """
    for language in ("a", "b"):
        stored = cognate_model.analyses[language].get(word)
        if stored is not None:
            return stored
    return viterbi_segment(source_lexicon, word, config)


def prefix_target_tag(sentence: str, language_id: str, targets=("et", "fi")) -> str:
    """Prefix the target-language pseudo-token: "<to_XX> " + sentence."""
    if language_id not in targets:
        raise ContractError(
            "unknown target language %r (configured: %s)" % (language_id, ", ".join(targets))
        )
    return "<to_%s> %s" % (language_id, sentence)
