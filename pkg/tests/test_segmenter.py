import math

import pytest
from hypothesis import given, strategies as st

from cogseg.errors import ContractError
from cogseg.model import Analysis, CountLexicon
from cogseg.segmenter import (
    SegmenterConfig,
    join_morphs,
    override_source_segmentation,
    prefix_target_tag,
    segment_corpus,
    unjoin,
    viterbi_segment,
)
from cogseg.trainer import TrainingParams, initialize, train


def lexicon_from(counts):
    lex = CountLexicon()
    for form, count in counts.items():
        lex.add(form, count)
    return lex


class TestViterbi:
    def test_dominant_whole_word(self):
        lex = lexicon_from({"talossa": 50, "ta": 1, "lo": 1, "ssa": 1})
        assert viterbi_segment(lex, "talossa").morphs == ("talossa",)

    def test_two_candidate_comparison(self):
        # candidates for "ab": [ab] costs ln(16/1); [a, b] costs ln(16*16/(10*5))
        lex = lexicon_from({"a": 10, "b": 5, "ab": 1})
        n = 16
        whole = math.log(n / 1)
        split = math.log(n / 10) + math.log(n / 5)
        assert split < whole
        assert viterbi_segment(lex, "ab").morphs == ("a", "b")

    def test_unknown_single_char_smoothed(self):
        lex = lexicon_from({"a": 3})
        assert viterbi_segment(lex, "z").morphs == ("z",)
        assert viterbi_segment(lex, "za").morphs == ("z", "a")

    def test_empty_lexicon_falls_back_to_characters(self):
        assert viterbi_segment(CountLexicon(), "abc").morphs == ("a", "b", "c")

    def test_leftmost_longest_tie_break(self):
        # [aa, a] and [a, aa] have identical cost and morph count; the
        # longer first morph wins
        lex = lexicon_from({"aa": 2, "a": 2})
        assert viterbi_segment(lex, "aaa").morphs == ("aa", "a")

    def test_fewest_morphs_preferred_on_cost_tie(self):
        # both readings of "abab" use the same token twice, so any cost tie
        # must resolve toward fewer morphs
        lex = lexicon_from({"ab": 3, "a": 3, "b": 3})
        result = viterbi_segment(lex, "abab").morphs
        assert result == ("ab", "ab")

    def test_concatenation_invariant(self):
        lex = lexicon_from({"aa": 2, "b": 3})
        for word in ("aab", "baa", "ababa", "üõ"):
            assert "".join(viterbi_segment(lex, word).morphs) == word

    def test_known_morphs_beat_character_fallback(self):
        lex = lexicon_from({"kala": 1, "ssa": 1})
        assert viterbi_segment(lex, "kalassa").morphs == ("kala", "ssa")

    def test_empty_word_rejected(self):
        with pytest.raises(ContractError):
            viterbi_segment(lexicon_from({"a": 1}), "")


def trained_toy_model():
    params = TrainingParams(rng_seed=0)
    model = initialize(
        {"kalassa": 3, "kala": 9, "ssa": 5, "vesi": 2},
        {"kalas": 3, "kala": 8, "s": 5, "vesi": 2},
        [("kalassa", "kalas")],
        params,
    )
    train(model, params)
    return model


class TestSegmentCorpus:
    def test_single_morph_token_unchanged(self):
        model = trained_toy_model()
        out = list(segment_corpus(model, ["vesi vesi"], "a"))
        assert out == ["vesi vesi"]

    def test_stored_analysis_reused(self):
        model = trained_toy_model()
        stored = model.analyses["a"]["kalassa"].morphs
        out = list(segment_corpus(model, ["kalassa"], "a"))
        assert unjoin(out[0]) == "kalassa"
        assert out[0].split(" ") == [
            m + "@@" for m in stored[:-1]
        ] + [stored[-1]]

    def test_empty_line_passes_through(self):
        model = trained_toy_model()
        assert list(segment_corpus(model, ["", "kala", ""], "a")) == ["", "kala", ""]

    def test_tag_tokens_not_segmented(self):
        model = trained_toy_model()
        out = list(segment_corpus(model, ["<to_et> kalassa"], "a"))
        assert out[0].startswith("<to_et> ")

    def test_roundtrip_exact(self):
        model = trained_toy_model()
        lines = [
            "kalassa on kala",
            "",
            " leading and  double  spaces ",
            "unknownwörd kalassa",
        ]
        out = list(segment_corpus(model, lines, "a"))
        assert [unjoin(line) for line in out] == lines

    @given(
        st.lists(
            st.text(alphabet="kalsv üõ", max_size=20).filter(lambda s: "@@" not in s),
            max_size=8,
        )
    )
    def test_roundtrip_property(self, lines):
        model = trained_toy_model.cache
        out = list(segment_corpus(model, lines, "a"))
        assert [unjoin(line) for line in out] == [line.rstrip("\n") for line in lines]


# one trained model shared by the hypothesis case to keep it fast
trained_toy_model.cache = None


def setup_module(module):
    trained_toy_model.cache = trained_toy_model()


class TestJoiner:
    def test_join_morphs_formats(self):
        assert join_morphs(("kala", "ssa"), "@@") == "kala@@ ssa"
        assert join_morphs(("kala",), "@@") == "kala"

    def test_custom_joiner(self):
        model = trained_toy_model()
        config = SegmenterConfig(joiner="+")
        out = list(segment_corpus(model, ["kalassa"], "a", config))
        assert unjoin(out[0], "+") == "kalassa"

    def test_invalid_joiner_rejected(self):
        with pytest.raises(ContractError):
            SegmenterConfig(joiner="")

    def test_joiner_inside_morph_rejected(self):
        with pytest.raises(ContractError):
            join_morphs(("a+b", "c"), "+")


class TestSourceOverride:
    def test_target_analysis_preferred(self):
        model = trained_toy_model()
        source_lex = lexicon_from({"kalassa": 5, "kal": 1})
        result = override_source_segmentation(source_lex, model, "kalassa")
        assert result == model.analyses["a"]["kalassa"]

    def test_language_a_preferred_over_b(self):
        model = trained_toy_model()
        model.analyses["a"]["shared"] = Analysis("shared", ("sha", "red"), 1)
        model.analyses["b"]["shared"] = Analysis("shared", ("shared",), 1)
        result = override_source_segmentation(CountLexicon(), model, "shared")
        assert result.morphs == ("sha", "red")
        del model.analyses["a"]["shared"]
        del model.analyses["b"]["shared"]

    def test_fallback_to_source_viterbi(self):
        model = trained_toy_model()
        source_lex = lexicon_from({"walk": 5, "ing": 5})
        result = override_source_segmentation(source_lex, model, "walking")
        assert result.morphs == ("walk", "ing")


class TestTargetTag:
    def test_known_language(self):
        assert prefix_target_tag("tere", "et") == "<to_et> tere"

    def test_empty_sentence(self):
        assert prefix_target_tag("", "fi") == "<to_fi> "

    def test_unknown_language_rejected(self):
        with pytest.raises(ContractError):
            prefix_target_tag("hello", "sv")

    def test_tag_survives_segmentation(self):
        model = trained_toy_model()
        tagged = prefix_target_tag("kalassa", "et")
        out = list(segment_corpus(model, [tagged], "a"))
        assert out[0].split(" ")[0] == "<to_et>"
