"""Text ↔ phoneme conversion for Vietnamese syllables.

Parsing strips the tone mark, then matches the initial, glide, vowel, and
final in that fixed order by greedy longest-prefix lookup in the rule tables.
Rendering is the inverse: each one-to-many phoneme is resolved to its written
form by a pure context function, then the tone mark is attached and the result
canonically composed.  All functions are pure; the tables are immutable.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass

from .phonology import (
    PhonemeClass,
    Syllable,
    Tone,
    TONE_BY_MARK,
    inventory,
    validate,
)


class TokenizeError(ValueError):
    """Base class for word-level conversion failures."""


class MultipleToneMarks(TokenizeError):
    """More than one tone mark in a single word; the word is not Vietnamese."""

    def __init__(self, word: str):
        super().__init__(f"multiple tone marks in {word!r}")
        self.word = word


class ParseFailure(TokenizeError):
    """The word is not a well-formed Vietnamese syllable."""

    def __init__(self, word: str, residue: str, index: int | None = None):
        at = f" (word {index})" if index is not None else ""
        super().__init__(f"cannot parse {word!r}{at}: unmatched {residue!r}")
        self.word = word
        self.residue = residue
        self.index = index


class RenderFailure(ValueError):
    """No written form exists for a component combination."""


@dataclass(frozen=True)
class NormalizedWord:
    """A word with its tone mark removed, canonically composed."""

    base_letters: str
    tone: Tone


@dataclass(frozen=True)
class ParseResult:
    syllable: Syllable
    consumed: str  # the original word
    residue: str  # empty on success
    graphemes: tuple[str, str, str, str] = ("", "", "", "")  # matched written forms


@dataclass
class ParseStats:
    """Operation counter for the linear-cost bound.

    ``comparisons`` counts every rule entry tested while parsing one word:
    tone-mark lookups, candidate prefix matches, and the final-table lookup.
    """

    comparisons: int = 0
    per_word_max: int = 0

    def _start_word(self):
        self._word_start = self.comparisons

    def _end_word(self):
        used = self.comparisons - getattr(self, "_word_start", 0)
        self.per_word_max = max(self.per_word_max, used)


#: documented upper bound on rule comparisons per word (total rule-table size)
MAX_RULE_COMPARISONS = 58

_TONE_MARKS = frozenset(TONE_BY_MARK)


def strip_tone(word: str) -> NormalizedWord:
    """Extract the single tone mark from a word, wherever it sits.

    Letter diacritics (breve, circumflex, horn, stroke) are preserved; the
    output is recomposed to NFC.  Raises MultipleToneMarks on two or more
    marks, which signals a non-Vietnamese word to corpus filtering.
    """
    tone = None
    kept = []
    for ch in unicodedata.normalize("NFD", word):
        if ch in _TONE_MARKS:
            if tone is not None:
                raise MultipleToneMarks(word)
            tone = TONE_BY_MARK[ch]
        else:
            kept.append(ch)
    return NormalizedWord(unicodedata.normalize("NFC", "".join(kept)), tone or Tone.FLAT)


def _bucket_by_first_letter(rules):
    buckets: dict[str, list] = {}
    for rule in rules:
        buckets.setdefault(rule.written_form[0], []).append(rule)
    return buckets


_INITIALS = _bucket_by_first_letter(inventory(PhonemeClass.INITIAL))
_GLIDES = inventory(PhonemeClass.GLIDE)
_GLIDE_U_RULE = next(r for r in _GLIDES if r.written_form == "u")
_VOWELS = _bucket_by_first_letter(inventory(PhonemeClass.VOWEL))
_FINALS = {r.written_form: r for r in inventory(PhonemeClass.FINAL)}

_VOWEL_FIRST_LETTERS = frozenset(_VOWELS)

# parse-side context predicates, keyed by the rule's context tag
_CONTEXTS = {
    "followed-by-u": lambda after: after.startswith("u"),
    "before-ê-y-â-ơ": lambda after: after[:1] in ("ê", "y", "â", "ơ"),
    "before-a-ă-e": lambda after: after[:1] in ("a", "ă", "e"),
    "before-final-y-or-u": lambda after: False,  # resolved after the final is known
}


def _match(word: str, rules, stats: ParseStats | None):
    for rule in rules:
        if stats is not None:
            stats.comparisons += 1
        if not word.startswith(rule.written_form):
            continue
        if rule.context and not _CONTEXTS[rule.context](word[len(rule.written_form):]):
            continue
        return rule, word[len(rule.written_form):]
    return None, word


def match_component(word: str, phoneme_class: PhonemeClass,
                    stats: ParseStats | None = None) -> tuple[str | None, str]:
    """Longest-prefix rule match in one class: (phoneme, remainder).

    Returns (None, word) unchanged when no rule matches.  Candidates are
    indexed by first letter, so the scan is bounded by the largest bucket
    regardless of input size.
    """
    if phoneme_class is PhonemeClass.FINAL:
        if stats is not None:
            stats.comparisons += 1
        rule = _FINALS.get(word)
        return (rule.ipa, "") if rule is not None else (None, word)
    if phoneme_class is PhonemeClass.GLIDE:
        rule, rest = _match(word, _GLIDES, stats)
    else:
        buckets = _INITIALS if phoneme_class is PhonemeClass.INITIAL else _VOWELS
        rule, rest = _match(word, buckets.get(word[:1], ()), stats)
    return (rule.ipa, rest) if rule is not None else (None, word)


def parse_syllable(word: str, stats: ParseStats | None = None) -> ParseResult:
    """Decompose one word into its Syllable, or raise ParseFailure.

    Contextual read-side rules beyond the plain tables:
      - an initial written "q" always takes the following "u" as the glide;
      - "gi" with no following vowel letter re-uses its "i" as the nucleus
        ("gì", "gìn");
      - written "a" reads as /ă/ before a final written "y" or "u".
    The final must consume the entire remainder exactly.
    """
    if stats is not None:
        stats._start_word()
    try:
        normalized = strip_tone(word)
        if stats is not None and normalized.tone is not Tone.FLAT:
            stats.comparisons += 1  # the tone-mark table lookup
        rest = normalized.base_letters
        if not rest:
            raise ParseFailure(word, rest)

        init_rule, rest = _match(rest, _INITIALS.get(rest[:1], ()), stats)
        glide_rule = None
        if init_rule is not None and init_rule.written_form == "q":
            # the q context guarantees a following u; it is always the glide
            glide_rule, rest = _GLIDE_U_RULE, rest[1:]
            if stats is not None:
                stats.comparisons += 1
        elif init_rule is not None and init_rule.written_form == "gi" and rest[:1] not in _VOWEL_FIRST_LETTERS:
            rest = "i" + rest  # the written i serves as both initial letter and nucleus
        if glide_rule is None:
            glide_rule, rest = _match(rest, _GLIDES, stats)

        vowel_rule, rest = _match(rest, _VOWELS.get(rest[:1], ()), stats)
        if vowel_rule is None:
            raise ParseFailure(word, rest)

        final_rule = None
        if rest:
            if stats is not None:
                stats.comparisons += 1
            final_rule = _FINALS.get(rest)
            if final_rule is None:
                raise ParseFailure(word, rest)

        vowel_ipa = vowel_rule.ipa
        if vowel_rule.written_form == "a" and final_rule is not None and final_rule.written_form in ("y", "u"):
            vowel_ipa = "ă"

        syllable = Syllable(
            vowel=vowel_ipa,
            initial=init_rule.ipa if init_rule else None,
            glide=glide_rule.ipa if glide_rule else None,
            final=final_rule.ipa if final_rule else None,
            tone=normalized.tone,
        )
        problems = validate(syllable)
        if problems:  # unreachable from the tables; guards future edits
            raise ParseFailure(word, "; ".join(problems))
        return ParseResult(
            syllable=syllable,
            consumed=word,
            residue="",
            graphemes=(
                init_rule.written_form if init_rule else "",
                glide_rule.written_form if glide_rule else "",
                vowel_rule.written_form,
                final_rule.written_form if final_rule else "",
            ),
        )
    finally:
        if stats is not None:
            stats._end_word()


def tokenize(transcript: str, stats: ParseStats | None = None) -> list[Syllable]:
    """One Syllable per whitespace-separated word, order preserved.

    Expects pre-cleaned lowercase words (see corpus.clean_words).  The first
    unparseable word aborts with its index on the ParseFailure.
    """
    syllables = []
    for index, word in enumerate(transcript.split()):
        try:
            syllables.append(parse_syllable(word, stats).syllable)
        except MultipleToneMarks:
            raise
        except ParseFailure as exc:
            raise ParseFailure(word, exc.residue, index) from None
    return syllables


# ---------------------------------------------------------------------------
# Rendering: phonemes back to the written form
# ---------------------------------------------------------------------------

_INITIAL_FORMS = {
    "b": "b", "t": "t", "tʰ": "th", "f": "ph", "d": "đ", "z": "gi", "j": "d",
    "s": "x", "ʂ": "s", "c͡ɕ": "ch", "t͡ʂ": "tr", "ɲ": "nh", "l": "l", "r": "r",
    "x": "kh", "v": "v", "m": "m", "n": "n", "h": "h",
}
_VOWEL_FORMS = {
    "a": "a", "ă": "ă", "ə̆": "â", "ɛ": "e", "e": "ê", "i": "i", "ɔ": "o",
    "ɔː": "oo", "o": "ô", "ə": "ơ", "u": "u", "ɯ": "ư",
}
_FINAL_FORMS = {"m": "m", "n": "n", "ŋ": "ng", "ɲ": "nh", "p": "p", "t": "t", "k": "c", "c": "ch"}

#: vowels that select "k"/"gh"/"ngh" spellings for a directly preceding initial
_FRONT_VOWELS = frozenset({"i", "e", "ɛ", "ie"})

#: initials whose bare /i/ syllable is conventionally y-spelled (lexical
#: choice; the stated i/y rule alone cannot produce both "thi" and "lý")
_Y_SPELLED_INITIALS = frozenset({"k", "l", "m", "h"})

#: nucleus letters that keep the tone mark when a plainer letter follows
_MARK_PREFERRED = frozenset("êôơăâư")


def _final_form(syllable: Syllable) -> str:
    final = syllable.final
    if final is None:
        return ""
    if final == "i̯":
        return "y" if syllable.vowel in ("ă", "ə̆") else "i"
    if final == "u̯":
        return "o" if syllable.vowel in ("a", "ɛ") else "u"
    return _FINAL_FORMS[final]


def _nucleus_form(syllable: Syllable, final_form: str) -> str:
    vowel = syllable.vowel
    if vowel == "ie":
        if syllable.glide:
            return "yê" if final_form else "ya"
        if final_form:
            # zero-initial /ie/ is y-spelled ("yên"), not "iê"
            return "iê" if syllable.initial else "yê"
        return "ia"
    if vowel == "uo":
        return "uô" if final_form else "ua"
    if vowel == "ɯə":
        return "ươ" if final_form else "ưa"
    if vowel == "ă":
        return "a" if final_form in ("y", "u") else "ă"
    if vowel == "i":
        if syllable.glide:
            return "y"
        if not final_form and (syllable.initial is None or syllable.initial in _Y_SPELLED_INITIALS):
            return "y"
        return "i"
    return _VOWEL_FORMS[vowel]


def _initial_form(syllable: Syllable, nucleus_form: str) -> str:
    initial = syllable.initial
    if initial is None:
        return ""
    if initial == "k":
        if syllable.glide:
            return "q"
        return "k" if syllable.vowel in _FRONT_VOWELS else "c"
    if initial in ("ɤ", "ŋ"):
        base = "g" if initial == "ɤ" else "ng"
        if syllable.glide is None and syllable.vowel in _FRONT_VOWELS and nucleus_form[:1] != "y":
            return base + "h"
        return base
    return _INITIAL_FORMS[initial]


def _glide_form(syllable: Syllable, nucleus_form: str) -> str:
    if syllable.glide is None:
        return ""
    if syllable.initial == "k":
        return "u"  # after written q the glide is always u ("quà", "que")
    return "o" if nucleus_form[:1] in ("a", "ă", "e") else "u"


def _attach_tone(nucleus_form: str, tone: Tone) -> str:
    if not tone.mark:
        return nucleus_form
    position = 0
    for i, letter in enumerate(nucleus_form):
        if letter in _MARK_PREFERRED:
            position = i
    return nucleus_form[: position + 1] + tone.mark + nucleus_form[position + 1:]


def render_syllable(syllable: Syllable) -> str:
    """Written form of a syllable under the one-to-many disambiguation rules.

    The tone mark lands on the last strong nucleus letter (ê ô ơ ă â ư) if one
    exists, else on the first nucleus letter; glides never carry it.  Output
    is canonically composed.
    """
    problems = validate(syllable)
    if problems:
        raise RenderFailure("; ".join(problems))
    final = _final_form(syllable)
    nucleus = _nucleus_form(syllable, final)
    initial = _initial_form(syllable, nucleus)
    glide = _glide_form(syllable, nucleus)
    if initial == "gi" and not glide and nucleus.startswith("i"):
        initial = "g"  # the shared i: "gì", "gìn"
    word = initial + glide + _attach_tone(nucleus, syllable.tone) + final
    return unicodedata.normalize("NFC", word)


def detokenize(syllables) -> str:
    """Space-joined written forms; inverse of tokenize on valid input."""
    words = []
    for index, syllable in enumerate(syllables):
        try:
            words.append(render_syllable(syllable))
        except RenderFailure as exc:
            raise RenderFailure(f"syllable {index}: {exc}") from None
    return " ".join(words)


# ---------------------------------------------------------------------------
# Wire format: "initial|glide|vowel|final|tone", one syllable per token
# ---------------------------------------------------------------------------

ABSENT = "∅"


def format_syllable(syllable: Syllable) -> str:
    return "|".join(
        (
            syllable.initial or ABSENT,
            syllable.glide or ABSENT,
            syllable.vowel,
            syllable.final or ABSENT,
            syllable.tone.label,
        )
    )


def format_phonemes(syllables) -> str:
    """One utterance as a line of space-separated syllable tokens."""
    return " ".join(format_syllable(s) for s in syllables)


def parse_syllable_token(token: str) -> Syllable:
    parts = token.split("|")
    if len(parts) != 5:
        raise ValueError(f"malformed syllable token: {token!r}")
    initial, glide, vowel, final, tone = parts
    return Syllable(
        vowel=vowel,
        initial=None if initial == ABSENT else initial,
        glide=None if glide == ABSENT else glide,
        final=None if final == ABSENT else final,
        tone=Tone.from_label(tone),
    )


def parse_phonemes(line: str) -> list[Syllable]:
    return [parse_syllable_token(token) for token in line.split()]
