"""Model state and description-length costs for the bilingual segmentation model.

The model holds two morph lexicons (one per target language), an edit lexicon
over linked cognate pairs, and the current analysis of every word. The total
cost is

    lexicon(a) + lexicon(b) + alpha * (corpus(a) + corpus(b))
    + edit_weight * (lexicon(edits) + alpha * corpus(edits))

in nats. The corpus cost of an inventory is the maximum-likelihood unigram
token code N*ln(N) - sum(c*ln(c)); the lexicon cost is the log-binomial
frequency-distribution code ln C(N-1, M-1) plus a maximum-likelihood
character code over the entry forms, each form carrying one end marker.

In the "count-only" mode the edit terms are dropped from the cost but edit
bookkeeping is still maintained, so reports and the equal-morph-count
constraint behave identically.

All bookkeeping is incremental; ``recompute_from_scratch`` is the oracle
guarding it.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .edits import Edit, extract_edits
from .errors import ContractError, ModelIntegrityError

# Internal end-of-form marker counted once per entry in character statistics.
FORM_END = "\x00"

LANGUAGES = ("a", "b")

EDIT_MODE_FULL = "full"
EDIT_MODE_COUNT_ONLY = "count-only"
EDIT_MODES = (EDIT_MODE_FULL, EDIT_MODE_COUNT_ONLY)

DAMPENING_MODES = ("none", "log")

_log = math.log
_lgamma = math.lgamma


def dampen_count(count: int) -> int:
    """Log-dampened token count: floor(ln(count)) + 1."""
    return int(math.floor(_log(count))) + 1


@dataclass(frozen=True)
class Analysis:
    """A word's current segmentation and its corpus token count."""

    word: str
    morphs: tuple[str, ...]
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ContractError("count must be positive: %r" % (self,))
        if not self.morphs or any(not m for m in self.morphs):
            raise ContractError("morphs must be non-empty: %r" % (self,))
        if "".join(self.morphs) != self.word:
            raise ContractError(
                "morphs %r do not concatenate to %r" % (self.morphs, self.word)
            )
        if any(ch.isspace() for ch in self.word):
            raise ContractError("word %r contains whitespace" % self.word)


@dataclass(frozen=True)
class CognatePair:
    """Two linked words, one per language, with their corpus counts."""

    word_a: str
    word_b: str
    count_a: int
    count_b: int

    @property
    def key(self) -> tuple[str, str]:
        return (self.word_a, self.word_b)


class CountLexicon:
    """Counted inventory of forms with cached cost statistics.

    Serves both morph lexicons (forms are morphs) and the edit lexicon
    (forms are serialized edits, boundary symbol included). Zero-count forms
    are evicted immediately so type and character statistics stay exact.
    """

    __slots__ = (
        "counts",
        "tokens",
        "log_token_sum",
        "char_counts",
        "char_tokens",
        "log_char_sum",
    )

    def __init__(self):
        self.counts: dict[str, int] = {}
        self.tokens = 0
        self.log_token_sum = 0.0
        self.char_counts: dict[str, int] = {}
        self.char_tokens = 0
        self.log_char_sum = 0.0

    @property
    def types(self) -> int:
        return len(self.counts)

    def add(self, form: str, delta: int) -> None:
        """Adjust the token count of form by delta (negative to remove)."""
        counts = self.counts
        old = counts.get(form, 0)
        new = old + delta
        if new < 0:
            raise ContractError("count of %r would go negative" % form)
        if new == 0:
            if old:
                del counts[form]
        else:
            counts[form] = new
        self.tokens += delta
        if old > 1:
            self.log_token_sum -= old * _log(old)
        if new > 1:
            self.log_token_sum += new * _log(new)
        if old == 0 and new > 0:
            self._add_form_chars(form, 1)
        elif old > 0 and new == 0:
            self._add_form_chars(form, -1)

    def _add_form_chars(self, form: str, sign: int) -> None:
        chars = self.char_counts
        for ch in itertools.chain(form, (FORM_END,)):
            old = chars.get(ch, 0)
            new = old + sign
            if new == 0:
                del chars[ch]
            else:
                chars[ch] = new
            if old > 1:
                self.log_char_sum -= old * _log(old)
            if new > 1:
                self.log_char_sum += new * _log(new)
        self.char_tokens += sign * (len(form) + 1)

    def corpus_cost(self) -> float:
        """Token code N*ln(N) - sum(c*ln(c)); zero for an empty inventory."""
        n = self.tokens
        if n == 0:
            return 0.0
        return n * _log(n) - self.log_token_sum

    def lexicon_cost(self) -> float:
        """Frequency-distribution code plus character code over entry forms."""
        m = self.types
        if m == 0:
            return 0.0
        n = self.tokens
        freq = _lgamma(n) - _lgamma(m) - _lgamma(n - m + 1)
        t = self.char_tokens
        forms = t * _log(t) - self.log_char_sum
        return freq + forms

    def rebuilt(self) -> "CountLexicon":
        """Fresh lexicon with the same counts, statistics recomputed."""
        fresh = CountLexicon()
        for form, count in self.counts.items():
            fresh.add(form, count)
        return fresh


def corpus_cost(lexicon: CountLexicon) -> float:
    return lexicon.corpus_cost()


def lexicon_cost(lexicon: CountLexicon) -> float:
    return lexicon.lexicon_cost()


def aligned_edit_tokens(analysis_a: Analysis, analysis_b: Analysis) -> tuple[Edit, ...]:
    """Edit tokens of a pair: morphs are paired up in sequence.

    Both analyses must have the same number of morphs.
    """
    if len(analysis_a.morphs) != len(analysis_b.morphs):
        raise ContractError(
            "cognate analyses must have equal morph counts: %r / %r"
            % (analysis_a.morphs, analysis_b.morphs)
        )
    tokens: list[Edit] = []
    for ma, mb in zip(analysis_a.morphs, analysis_b.morphs):
        tokens.extend(extract_edits(ma, mb).edits)
    return tuple(tokens)


class CognateModel:
    """Full state of the bilingual model; single-writer, cheap O(1) cost reads."""

    def __init__(
        self,
        alpha: float = 0.01,
        edit_weight: float = 10.0,
        edit_mode: str = EDIT_MODE_FULL,
        seed: int = 0,
        dampening: str = "none",
    ):
        if alpha <= 0 or edit_weight <= 0:
            raise ContractError("alpha and edit_weight must be positive")
        if edit_mode not in EDIT_MODES:
            raise ContractError("unknown edit mode %r" % edit_mode)
        if dampening not in DAMPENING_MODES:
            raise ContractError("unknown dampening mode %r" % dampening)
        self.alpha = alpha
        self.edit_weight = edit_weight
        self.edit_mode = edit_mode
        self.seed = seed
        self.dampening = dampening
        self.lexicons = {"a": CountLexicon(), "b": CountLexicon()}
        self.edit_lexicon = CountLexicon()
        self.analyses: dict[str, dict[str, Analysis]] = {"a": {}, "b": {}}
        self.pairs: list[CognatePair] = []
        self._pair_by_word: dict[tuple[str, str], CognatePair] = {}
        # Edit tokens currently counted for each linked pair, keyed by pair.key.
        self._pair_tokens: dict[tuple[str, str], tuple[Edit, ...]] = {}

    # -- pair registry -------------------------------------------------

    def register_pair(self, pair: CognatePair) -> None:
        """Register a cognate link; each word may belong to one pair only."""
        for lang, word in (("a", pair.word_a), ("b", pair.word_b)):
            if (lang, word) in self._pair_by_word:
                raise ContractError(
                    "word %r already belongs to a pair in language %s" % (word, lang)
                )
        self.pairs.append(pair)
        self._pair_by_word[("a", pair.word_a)] = pair
        self._pair_by_word[("b", pair.word_b)] = pair

    def pair_for(self, language: str, word: str) -> CognatePair | None:
        return self._pair_by_word.get((language, word))

    def pair_tokens(self, pair: CognatePair) -> tuple[Edit, ...]:
        return self._pair_tokens.get(pair.key, ())

    # -- cost ----------------------------------------------------------

    def total_cost(self) -> float:
        lex_a = self.lexicons["a"]
        lex_b = self.lexicons["b"]
        cost = (
            lex_a.lexicon_cost()
            + lex_b.lexicon_cost()
            + self.alpha * (lex_a.corpus_cost() + lex_b.corpus_cost())
        )
        if self.edit_mode == EDIT_MODE_FULL:
            edits = self.edit_lexicon
            cost += self.edit_weight * (
                edits.lexicon_cost() + self.alpha * edits.corpus_cost()
            )
        return cost

    def cost_components(self) -> dict[str, float]:
        """Raw (unweighted) cost terms, for reporting."""
        return {
            "lexicon_a": self.lexicons["a"].lexicon_cost(),
            "corpus_a": self.lexicons["a"].corpus_cost(),
            "lexicon_b": self.lexicons["b"].lexicon_cost(),
            "corpus_b": self.lexicons["b"].corpus_cost(),
            "lexicon_edits": self.edit_lexicon.lexicon_cost(),
            "corpus_edits": self.edit_lexicon.corpus_cost(),
        }

    # -- analysis mutation ----------------------------------------------

    def _check_language(self, language: str) -> None:
        if language not in self.analyses:
            raise ContractError("unknown language %r" % language)

    def _attach_pair_tokens(self, pair: CognatePair) -> None:
        if pair.key in self._pair_tokens:
            return
        ana_a = self.analyses["a"].get(pair.word_a)
        ana_b = self.analyses["b"].get(pair.word_b)
        if ana_a is None or ana_b is None:
            return
        tokens = aligned_edit_tokens(ana_a, ana_b)
        lex = self.edit_lexicon
        for edit in tokens:
            lex.add(edit.form, 1)
        self._pair_tokens[pair.key] = tokens

    def _detach_pair_tokens(self, pair: CognatePair) -> None:
        tokens = self._pair_tokens.pop(pair.key, None)
        if tokens is None:
            return
        lex = self.edit_lexicon
        for edit in tokens:
            lex.add(edit.form, -1)

    def add_analysis(self, analysis: Analysis, language: str) -> float:
        """Insert a word's analysis; returns the total-cost delta.

        For a cognate word whose partner is present, the pair's edit tokens
        are added atomically (both analyses must have equal morph counts).
        """
        self._check_language(language)
        word = analysis.word
        table = self.analyses[language]
        if word in table:
            raise ContractError("word %r already analyzed in %s" % (word, language))
        before = self.total_cost()
        table[word] = analysis
        lex = self.lexicons[language]
        for morph in analysis.morphs:
            lex.add(morph, analysis.count)
        pair = self.pair_for(language, word)
        if pair is not None:
            self._attach_pair_tokens(pair)
        return self.total_cost() - before

    def remove_analysis(self, word: str, language: str) -> float:
        """Remove a word's analysis; returns the total-cost delta."""
        self._check_language(language)
        table = self.analyses[language]
        if word not in table:
            raise ContractError("word %r not analyzed in %s" % (word, language))
        before = self.total_cost()
        pair = self.pair_for(language, word)
        if pair is not None:
            self._detach_pair_tokens(pair)
        analysis = table.pop(word)
        lex = self.lexicons[language]
        for morph in analysis.morphs:
            lex.add(morph, -analysis.count)
        return self.total_cost() - before

    def detach_word(self, word: str, language: str) -> None:
        """Remove a word's counted contributions, keeping its analysis record.

        Local-search primitive: the record supplies the token count while the
        word is being resegmented. Pair edit tokens are removed with the
        first detached member of the pair.
        """
        analysis = self.analyses[language][word]
        pair = self.pair_for(language, word)
        if pair is not None:
            self._detach_pair_tokens(pair)
        lex = self.lexicons[language]
        for morph in analysis.morphs:
            lex.add(morph, -analysis.count)

    def attach_word(self, word: str, language: str) -> None:
        """Count a detached word's recorded analysis back in."""
        analysis = self.analyses[language][word]
        lex = self.lexicons[language]
        for morph in analysis.morphs:
            lex.add(morph, analysis.count)
        pair = self.pair_for(language, word)
        if pair is not None:
            self._attach_pair_tokens(pair)

    # -- integrity -------------------------------------------------------

    def _rebuild(self) -> tuple[CountLexicon, CountLexicon, CountLexicon]:
        fresh = {"a": CountLexicon(), "b": CountLexicon()}
        for lang in LANGUAGES:
            lex = fresh[lang]
            for analysis in self.analyses[lang].values():
                for morph in analysis.morphs:
                    lex.add(morph, analysis.count)
        fresh_edits = CountLexicon()
        for pair in self.pairs:
            ana_a = self.analyses["a"].get(pair.word_a)
            ana_b = self.analyses["b"].get(pair.word_b)
            if ana_a is None or ana_b is None:
                continue
            for edit in aligned_edit_tokens(ana_a, ana_b):
                fresh_edits.add(edit.form, 1)
        return fresh["a"], fresh["b"], fresh_edits

    def recompute_from_scratch(self) -> float:
        """Rebuild all statistics from the analyses and return the total cost.

        Raises ModelIntegrityError if the rebuilt state disagrees with the
        cached one (exact count mismatch, or cached float sums off by more
        than 1e-9 relative).
        """
        fresh_a, fresh_b, fresh_e = self._rebuild()
        for name, cached, fresh in (
            ("lexicon a", self.lexicons["a"], fresh_a),
            ("lexicon b", self.lexicons["b"], fresh_b),
            ("edit lexicon", self.edit_lexicon, fresh_e),
        ):
            if cached.counts != fresh.counts:
                raise ModelIntegrityError("%s counts diverge from analyses" % name)
            if cached.char_counts != fresh.char_counts:
                raise ModelIntegrityError("%s character counts diverge" % name)
            if cached.tokens != fresh.tokens or cached.char_tokens != fresh.char_tokens:
                raise ModelIntegrityError("%s totals diverge" % name)
            for attr in ("log_token_sum", "log_char_sum"):
                c = getattr(cached, attr)
                f = getattr(fresh, attr)
                if abs(c - f) > 1e-9 * max(1.0, abs(f)):
                    raise ModelIntegrityError(
                        "%s %s drifted: cached %.17g vs fresh %.17g" % (name, attr, c, f)
                    )
        saved = self.lexicons, self.edit_lexicon
        try:
            self.lexicons = {"a": fresh_a, "b": fresh_b}
            self.edit_lexicon = fresh_e
            return self.total_cost()
        finally:
            self.lexicons, self.edit_lexicon = saved


def total_cost(model: CognateModel) -> float:
    return model.total_cost()


def recompute_from_scratch(model: CognateModel) -> float:
    return model.recompute_from_scratch()
