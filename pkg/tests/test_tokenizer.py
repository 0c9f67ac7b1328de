import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vietphon.phonology import PhonemeClass, Syllable, Tone, validate
from vietphon.tokenizer import (
    MAX_RULE_COMPARISONS,
    MultipleToneMarks,
    ParseFailure,
    ParseStats,
    RenderFailure,
    detokenize,
    format_phonemes,
    format_syllable,
    match_component,
    parse_phonemes,
    parse_syllable,
    render_syllable,
    strip_tone,
    tokenize,
)


class TestStripTone:
    def test_kiem(self):
        norm = strip_tone("kiệm")
        assert norm.base_letters == "kiêm"
        assert norm.tone is Tone.MID_GLOTTALIZED_RAISING

    def test_flat_is_absence_of_mark(self):
        norm = strip_tone("ba")
        assert norm.base_letters == "ba"
        assert norm.tone is Tone.FLAT

    def test_hoang(self):
        norm = strip_tone("hoàng")
        assert norm.base_letters == "hoang"
        assert norm.tone is Tone.LOW_FALLING

    def test_letter_diacritics_preserved(self):
        assert strip_tone("đường").base_letters == "đương"
        assert strip_tone("thuở").base_letters == "thuơ"

    def test_decomposed_input(self):
        decomposed = unicodedata.normalize("NFD", "kiệm")
        assert decomposed != "kiệm"
        assert strip_tone(decomposed) == strip_tone("kiệm")

    def test_output_is_composed(self):
        base = strip_tone("biển").base_letters
        assert base == unicodedata.normalize("NFC", base) == "biên"

    def test_multiple_tone_marks(self):
        with pytest.raises(MultipleToneMarks):
            strip_tone("bàá")

    def test_mark_on_any_letter_accepted(self):
        # mark sitting on the glide letter (older typography)
        assert strip_tone("hòa") == strip_tone("hoà")


class TestMatchComponent:
    def test_ngh_longest_prefix(self):
        assert match_component("nghiêm", PhonemeClass.INITIAL) == ("ŋ", "iêm")

    def test_zero_initial(self):
        assert match_component("a", PhonemeClass.INITIAL) == (None, "a")

    def test_glide_with_lookahead(self):
        assert match_component("uyên", PhonemeClass.GLIDE) == ("u̯", "yên")
        assert match_component("oan", PhonemeClass.GLIDE) == ("u̯", "an")

    def test_glide_context_blocks(self):
        # "ua" here is the /uo/ diphthong, not glide + a
        assert match_component("ua", PhonemeClass.GLIDE) == (None, "ua")
        assert match_component("oong", PhonemeClass.GLIDE) == (None, "oong")

    def test_final_requires_exact_consumption(self):
        assert match_component("ng", PhonemeClass.FINAL) == ("ŋ", "")
        assert match_component("ngz", PhonemeClass.FINAL) == (None, "ngz")

    def test_vowel_longest_prefix(self):
        assert match_component("iêm", PhonemeClass.VOWEL) == ("ie", "m")
        assert match_component("oong", PhonemeClass.VOWEL) == ("ɔː", "ng")


class TestParseSyllable:
    def test_hoang(self):
        result = parse_syllable("hoàng")
        assert result.syllable == Syllable(
            initial="h", glide="u̯", vowel="a", final="ŋ", tone=Tone.LOW_FALLING
        )
        assert result.graphemes == ("h", "o", "a", "ng")
        assert result.residue == ""

    def test_may_reads_a_as_short(self):
        s = parse_syllable("máy").syllable
        assert (s.vowel, s.final, s.tone) == ("ă", "i̯", Tone.MID_RAISING)

    def test_parse_failure(self):
        with pytest.raises(ParseFailure):
            parse_syllable("xyz")

    def test_failure_keeps_residue(self):
        with pytest.raises(ParseFailure) as exc:
            parse_syllable("hoangz")
        assert exc.value.residue == "ngz"

    def test_qu_is_initial_plus_glide(self):
        s = parse_syllable("quê").syllable
        assert (s.initial, s.glide, s.vowel) == ("k", "u̯", "e")

    def test_gi_bare(self):
        assert parse_syllable("gì").syllable == Syllable(
            initial="z", vowel="i", tone=Tone.LOW_FALLING
        )

    def test_gi_with_consonant_remainder(self):
        assert parse_syllable("gìn").syllable == Syllable(
            initial="z", vowel="i", final="n", tone=Tone.LOW_FALLING
        )

    def test_gi_with_vowel_remainder(self):
        assert parse_syllable("giếng").syllable == Syllable(
            initial="z", vowel="e", final="ŋ", tone=Tone.MID_RAISING
        )

    def test_zero_initial_words(self):
        assert parse_syllable("ăn").syllable == Syllable(vowel="ă", final="n")
        assert parse_syllable("yên").syllable == Syllable(vowel="ie", final="n")

    def test_empty_word_fails(self):
        with pytest.raises(ParseFailure):
            parse_syllable("")

    def test_digits_fail(self):
        with pytest.raises(ParseFailure):
            parse_syllable("ba3")


class TestTokenize:
    def test_two_words(self):
        assert len(tokenize("ba mẹ")) == 2

    def test_empty(self):
        assert tokenize("") == []

    def test_kien_thuc(self):
        first, second = tokenize("kiến thức")
        assert first == Syllable(initial="k", vowel="ie", final="n", tone=Tone.MID_RAISING)
        assert second == Syllable(initial="tʰ", vowel="ɯ", final="k", tone=Tone.MID_RAISING)

    def test_length_preserved(self, lexicon):
        text = " ".join(lexicon[:257])
        assert len(tokenize(text)) == 257

    def test_failure_carries_word_index(self):
        with pytest.raises(ParseFailure) as exc:
            tokenize("ba mẹ xyz ba")
        assert exc.value.index == 2


class TestRender:
    def test_que(self):
        s = Syllable(initial="k", glide="u̯", vowel="e")
        assert render_syllable(s) == "quê"

    def test_khuya(self):
        s = Syllable(initial="x", glide="u̯", vowel="ie")
        assert render_syllable(s) == "khuya"

    def test_roundtrip_chuyen(self):
        assert render_syllable(parse_syllable("chuyện").syllable) == "chuyện"

    def test_tone_mark_placement(self):
        # strong nucleus letter wins, else first nucleus letter; never the glide
        cases = {"lường": "lường", "của": "của", "chùa": "chùa", "hoà": "hoà",
                 "quý": "quý", "bìa": "bìa", "thuở": "thuở", "khuỵu": "khuỵu"}
        for word, expected in cases.items():
            assert render_syllable(parse_syllable(word).syllable) == expected

    def test_render_failure_on_bad_component(self):
        with pytest.raises(RenderFailure):
            render_syllable(Syllable(vowel="a", initial="w"))

    def test_output_composed(self):
        word = render_syllable(Syllable(initial="k", vowel="ie", final="m",
                                        tone=Tone.MID_GLOTTALIZED_RAISING))
        assert word == "kiệm" == unicodedata.normalize("NFC", word)

    def test_k_spellings(self):
        assert render_syllable(Syllable(initial="k", vowel="i", final="m")) == "kim"
        assert render_syllable(Syllable(initial="k", vowel="a", final="t",
                                        tone=Tone.MID_RAISING)) == "cát"
        assert render_syllable(Syllable(initial="k", glide="u̯", vowel="a", final="n")) == "quan"

    def test_gh_ngh_spellings(self):
        assert render_syllable(Syllable(initial="ɤ", vowel="i")) == "ghi"
        assert render_syllable(Syllable(initial="ɤ", vowel="a")) == "ga"
        assert render_syllable(Syllable(initial="ŋ", vowel="ɛ")) == "nghe"
        assert render_syllable(Syllable(initial="ŋ", vowel="a", final="ɲ")) == "nganh"


class TestDetokenize:
    def test_empty(self):
        assert detokenize([]) == ""

    def test_gieng_nuoc(self):
        assert detokenize(tokenize("giếng nước")) == "giếng nước"

    def test_propagates_index(self):
        bad = Syllable(vowel="a", initial="w")
        with pytest.raises(RenderFailure, match="syllable 1"):
            detokenize([Syllable(vowel="a"), bad])


class TestRoundTrip:
    def test_full_lexicon_identity(self, lexicon):
        mismatches = [w for w in lexicon
                      if render_syllable(parse_syllable(w).syllable) != w]
        assert mismatches == []

    def test_injectivity(self, lexicon):
        seen = {}
        for word in lexicon:
            s = parse_syllable(word).syllable
            assert s not in seen, f"{word} and {seen[s]} collide on {s}"
            seen[s] = word

    def test_nfd_input_parses_identically(self, lexicon):
        for word in lexicon[::97]:
            decomposed = unicodedata.normalize("NFD", word)
            assert parse_syllable(decomposed).syllable == parse_syllable(word).syllable

    def test_validate_holds_on_lexicon(self, lexicon):
        # strict mode on: the bundled lexicon obeys the stop-final tone rule
        for word in lexicon[::53]:
            assert validate(parse_syllable(word).syllable, strict=True) == []


class TestLinearCost:
    def test_comparisons_bounded(self, lexicon):
        stats = ParseStats()
        for word in lexicon:
            parse_syllable(word, stats)
        assert 0 < stats.per_word_max <= MAX_RULE_COMPARISONS

    def test_bound_independent_of_corpus_size(self, lexicon):
        small, large = ParseStats(), ParseStats()
        for word in lexicon[:100]:
            parse_syllable(word, small)
        for word in lexicon:
            parse_syllable(word, large)
        assert large.per_word_max <= MAX_RULE_COMPARISONS
        assert large.per_word_max <= small.per_word_max + 5  # same order, not corpus-scaled


class TestSerialization:
    def test_hoang_format(self):
        assert format_phonemes(tokenize("hoàng")) == "h|u̯|a|ŋ|LowFalling"

    def test_absent_marker(self):
        assert format_syllable(Syllable(vowel="a")) == "∅|∅|a|∅|Flat"

    def test_roundtrip(self, lexicon):
        for word in lexicon[::211]:
            syllables = tokenize(word)
            assert parse_phonemes(format_phonemes(syllables)) == syllables

    def test_malformed_token(self):
        with pytest.raises(ValueError):
            parse_phonemes("b|a|Flat")


@st.composite
def lexicon_words(draw):
    from vietphon.lexicon import load_lexicon

    words = load_lexicon()
    return draw(st.sampled_from(words))


class TestProperties:
    @settings(max_examples=200, deadline=None)
    @given(lexicon_words())
    def test_roundtrip_property(self, word):
        assert render_syllable(parse_syllable(word).syllable) == word

    @settings(max_examples=200, deadline=None)
    @given(lexicon_words())
    def test_base_letters_carry_no_tone_marks(self, word):
        from vietphon.phonology import TONE_BY_MARK

        base = strip_tone(word).base_letters
        for ch in unicodedata.normalize("NFD", base):
            assert ch not in TONE_BY_MARK

    @settings(max_examples=100, deadline=None)
    @given(lexicon_words(), st.sampled_from(list(Tone)))
    def test_retoned_syllables_still_roundtrip(self, word, tone):
        import dataclasses

        from vietphon.phonology import STOP_FINALS, STOP_TONES

        s = parse_syllable(word).syllable
        if s.final in STOP_FINALS and tone not in STOP_TONES:
            return
        retoned = dataclasses.replace(s, tone=tone)
        assert parse_syllable(render_syllable(retoned)).syllable == retoned
