"""Vietnamese phoneme inventories, the syllable model, and structural validation.

The grapheme rule table ships as a versioned TSV inside the package and is the
single source of truth: the tokenizer matches against it, the vocabulary is
built from it, and the bundled syllable list is generated from it.  All tables
are immutable after import and safe for concurrent reads.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources

RULES_VERSION = "1"


class Tone(enum.Enum):
    """The six lexical tones, keyed by name and combining mark.

    Contour strings are IPA tone letters; the flat tone carries the
    conventional mid-level contour since it is written with no mark.
    """

    FLAT = ("Flat", "", "˧˧")
    LOW_FALLING = ("LowFalling", "̀", "˨˨˩˩")
    MID_RAISING = ("MidRaising", "́", "˧˧˥˥")
    MID_FALLING = ("MidFalling", "̉", "˧˧˩˩")
    MID_GLOTTALIZED_FALLING = ("MidGlottalizedFalling", "̃", "˧˧ʔ˥˥")
    MID_GLOTTALIZED_RAISING = ("MidGlottalizedRaising", "̣", "˧˧ʔ˩˩")

    def __init__(self, label: str, mark: str, contour: str):
        self.label = label
        self.mark = mark
        self.contour = contour

    @classmethod
    def from_label(cls, label: str) -> "Tone":
        try:
            return _TONE_BY_LABEL[label]
        except KeyError:
            raise ValueError(f"unknown tone label: {label!r}") from None


_TONE_BY_LABEL = {t.label: t for t in Tone}

#: combining mark -> tone, for the five marked tones (a strict bijection)
TONE_BY_MARK = {t.mark: t for t in Tone if t.mark}


class PhonemeClass(enum.Enum):
    INITIAL = "initial"
    GLIDE = "glide"
    VOWEL = "vowel"
    FINAL = "final"


@dataclass(frozen=True)
class GraphemeRule:
    """One written form of one phoneme, with an optional parse-side context."""

    written_form: str
    ipa: str
    phoneme_class: PhonemeClass
    kind: str = ""  # "monophthong" / "diphthong" for vowels, "" otherwise
    context: str = ""  # context tag; "" means unconditional
    tag: str = "core"
    note: str = ""

    @property
    def match_priority(self) -> int:
        return len(self.written_form)


def _load_rules() -> tuple[GraphemeRule, ...]:
    text = resources.files("vietphon.data").joinpath("grapheme_rules.tsv").read_text("utf-8")
    rules = []
    version = None
    for line in text.splitlines():
        if line.startswith("# version:"):
            version = line.split(":", 1)[1].strip()
        if not line or line.startswith("#"):
            continue
        cls, kind, form, ipa, context, tag, note = line.split("\t")
        rules.append(
            GraphemeRule(
                written_form=form,
                ipa=ipa,
                phoneme_class=PhonemeClass(cls),
                kind="" if kind == "-" else kind,
                context="" if context == "-" else context,
                tag=tag,
                note="" if note == "-" else note,
            )
        )
    if version != RULES_VERSION:
        raise RuntimeError(f"rule table version {version!r} != expected {RULES_VERSION!r}")
    return tuple(rules)


RULES: tuple[GraphemeRule, ...] = _load_rules()


def inventory(phoneme_class: PhonemeClass, kind: str | None = None) -> list[GraphemeRule]:
    """Full rule table for one class, longest written form first."""
    rules = [r for r in RULES if r.phoneme_class is phoneme_class]
    if kind is not None:
        rules = [r for r in rules if r.kind == kind]
    return sorted(rules, key=lambda r: (-r.match_priority, r.written_form, r.tag))


def rules_text() -> str:
    """The shipped rule table, verbatim, for CLI audit dumps."""
    return resources.files("vietphon.data").joinpath("grapheme_rules.tsv").read_text("utf-8")


def _ipa_set(phoneme_class: PhonemeClass) -> frozenset[str]:
    return frozenset(r.ipa for r in RULES if r.phoneme_class is phoneme_class)


INITIAL_IPAS = _ipa_set(PhonemeClass.INITIAL)
GLIDE_IPAS = _ipa_set(PhonemeClass.GLIDE)
VOWEL_IPAS = _ipa_set(PhonemeClass.VOWEL)
FINAL_IPAS = _ipa_set(PhonemeClass.FINAL)

#: finals that are stops; in strict mode they only combine with the two
#: checked tones (standard Vietnamese phonotactics)
STOP_FINALS = frozenset({"p", "t", "k", "c"})
STOP_TONES = frozenset({Tone.MID_RAISING, Tone.MID_GLOTTALIZED_RAISING})


@dataclass(frozen=True)
class Syllable:
    """Five-field phonemic decomposition of one Vietnamese word.

    Components are IPA strings from the rule table; the vowel nucleus is
    compulsory, everything else may be absent.
    """

    vowel: str
    initial: str | None = None
    glide: str | None = None
    final: str | None = None
    tone: Tone = Tone.FLAT

    def __post_init__(self):
        if not self.vowel:
            raise ValueError("missing nucleus: a syllable requires a vowel")

    @property
    def rhyme(self) -> tuple[str | None, str, str | None]:
        return (self.glide, self.vowel, self.final)


def validate(syllable: Syllable, strict: bool = False) -> list[str]:
    """Check structural invariants; returns a list of violations (empty = ok).

    Strict mode additionally enforces the stop-final tone restriction, which
    holds for the bundled lexicon but is not part of the core rule listing.
    """
    violations = []
    if not syllable.vowel:
        violations.append("missing nucleus")
    elif syllable.vowel not in VOWEL_IPAS:
        violations.append(f"unknown vowel: {syllable.vowel!r}")
    if syllable.initial is not None and syllable.initial not in INITIAL_IPAS:
        violations.append(f"unknown initial: {syllable.initial!r}")
    if syllable.glide is not None and syllable.glide not in GLIDE_IPAS:
        violations.append(f"unknown glide: {syllable.glide!r}")
    if syllable.final is not None and syllable.final not in FINAL_IPAS:
        violations.append(f"unknown final: {syllable.final!r}")
    if not isinstance(syllable.tone, Tone):
        violations.append(f"unknown tone: {syllable.tone!r}")
    elif strict and syllable.final in STOP_FINALS and syllable.tone not in STOP_TONES:
        violations.append("stop-final tone: stop finals require MidRaising or MidGlottalizedRaising")
    return violations


# ---------------------------------------------------------------------------
# Closed rhyme table
#
# Every (glide, vowel, final) combination with an attested written form in the
# standard orthography.  The lexicon generator and the vocabulary builder both
# consume this table.  Finals are listed per nucleus; "-" is the open rhyme.
# ---------------------------------------------------------------------------

_PLAIN_RHYMES = {
    "a": "- i̯ u̯ m n ŋ ɲ p t k c",
    "ă": "i̯ u̯ m n ŋ p t k",
    "ə̆": "i̯ u̯ m n ŋ p t k",
    "ɛ": "- u̯ m n ŋ p t k",
    "e": "- u̯ m n ŋ ɲ p t k c",
    "i": "- u̯ m n ɲ p t c",
    "ɔ": "- i̯ m n ŋ p t k",
    "ɔː": "ŋ k",
    "o": "- i̯ m n ŋ p t k",
    "ə": "- i̯ m n p t",
    "u": "- i̯ m n ŋ p t k",
    "ɯ": "- i̯ u̯ ŋ t k",
    "ie": "- u̯ m n ŋ p t k",
    "uo": "- i̯ m n ŋ t k",
    "ɯə": "- i̯ u̯ m n ŋ p t k",
}

_GLIDE_RHYMES = {
    "a": "- i̯ m n ŋ ɲ t k c",
    "ă": "i̯ m n ŋ t k",
    "ɛ": "- u̯ n t",
    "ə̆": "i̯ n ŋ t",
    "e": "- n ɲ c",
    "ə": "-",
    "i": "- u̯ ɲ t c",
    "ie": "- n t",
    "o": "k",
}


def _expand(spec: dict[str, str], glide: str | None):
    for vowel, finals in spec.items():
        for f in finals.split():
            yield (glide, vowel, None if f == "-" else f)


#: all structurally valid (glide, vowel, final) triples, in a stable order
RHYMES: tuple[tuple[str | None, str, str | None], ...] = tuple(
    list(_expand(_PLAIN_RHYMES, None)) + list(_expand(_GLIDE_RHYMES, "u̯"))
)
