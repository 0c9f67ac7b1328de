"""Token spaces for the three syllabic components and id-vector coding.

Each syllable encodes as (initial id, rhyme id, tone id).  Ids are assigned
lexicographically by token string, so two builds from the same lexicon are
bit-identical; BOS/EOS/PAD occupy the first three ids of every space because
the downstream decoder is autoregressive.
"""

from __future__ import annotations

from dataclasses import dataclass

from .phonology import INITIAL_IPAS, RHYMES, Syllable, Tone
from .tokenizer import ABSENT, parse_syllable

BOS = "<bos>"
EOS = "<eos>"
PAD = "<pad>"
CONTROL_TOKENS = (BOS, EOS, PAD)

#: nominal space sizes of the reference tokenizer design; the computed sizes
#: are reported next to them (note the stated total differs from the
#: component sum 22 + 145 + 6 = 173)
DESIGN_COUNTS = {"initials": 22, "rhymes": 145, "tones": 6, "total": 163}


class UnknownComponent(KeyError):
    """A syllable component has no token in the vocabulary."""

    def __init__(self, space: str, token: str):
        super().__init__(f"{space} token {token!r} not in vocabulary")
        self.space = space
        self.token = token


class IdOutOfRange(IndexError):
    def __init__(self, space: str, token_id: int, size: int):
        super().__init__(f"{space} id {token_id} out of range [0, {size})")
        self.space = space
        self.token_id = token_id


def rhyme_token(glide: str | None, vowel: str, final: str | None) -> str:
    return f"{glide or ABSENT}|{vowel}|{final or ABSENT}"


def split_rhyme_token(token: str) -> tuple[str | None, str, str | None]:
    glide, vowel, final = token.split("|")
    return (None if glide == ABSENT else glide, vowel, None if final == ABSENT else final)


@dataclass(frozen=True)
class Vocabulary:
    initial_tokens: tuple[str, ...]
    rhyme_tokens: tuple[str, ...]
    tone_tokens: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "_initial_ids", {t: i for i, t in enumerate(self.initial_tokens)})
        object.__setattr__(self, "_rhyme_ids", {t: i for i, t in enumerate(self.rhyme_tokens)})
        object.__setattr__(self, "_tone_ids", {t: i for i, t in enumerate(self.tone_tokens)})

    def _lookup(self, space: str, ids: dict, token: str) -> int:
        try:
            return ids[token]
        except KeyError:
            raise UnknownComponent(space, token) from None

    def encode(self, syllable: Syllable) -> tuple[int, int, int]:
        return (
            self._lookup("initial", self._initial_ids, syllable.initial or ABSENT),
            self._lookup("rhyme", self._rhyme_ids, rhyme_token(*syllable.rhyme)),
            self._lookup("tone", self._tone_ids, syllable.tone.label),
        )

    def decode(self, ids: tuple[int, int, int]) -> Syllable:
        init_id, rhyme_id, tone_id = ids
        spaces = (
            ("initial", init_id, self.initial_tokens),
            ("rhyme", rhyme_id, self.rhyme_tokens),
            ("tone", tone_id, self.tone_tokens),
        )
        for space, token_id, tokens in spaces:
            if not 0 <= token_id < len(tokens):
                raise IdOutOfRange(space, token_id, len(tokens))
            if tokens[token_id] in CONTROL_TOKENS:
                raise UnknownComponent(space, tokens[token_id])
        initial = self.initial_tokens[init_id]
        glide, vowel, final = split_rhyme_token(self.rhyme_tokens[rhyme_id])
        return Syllable(
            vowel=vowel,
            initial=None if initial == ABSENT else initial,
            glide=glide,
            final=final,
            tone=Tone.from_label(self.tone_tokens[tone_id]),
        )

    @property
    def content_counts(self) -> dict[str, int]:
        n = len(CONTROL_TOKENS)
        return {
            "initials": len(self.initial_tokens) - n,
            "rhymes": len(self.rhyme_tokens) - n,
            "tones": len(self.tone_tokens) - n,
        }


def build_vocab(lexicon: list[str] | None = None) -> Vocabulary:
    """Token spaces from the closed rhyme table plus rhymes observed in a lexicon.

    With the bundled lexicon the observed rhymes are exactly the closed table;
    the union keeps the contract explicit.  Raises ParseFailure on any
    unparseable lexicon word.
    """
    rhymes = {rhyme_token(g, v, f) for g, v, f in RHYMES}
    initials = {ABSENT}
    if lexicon:
        for word in lexicon:
            s = parse_syllable(word).syllable
            rhymes.add(rhyme_token(*s.rhyme))
            if s.initial:
                initials.add(s.initial)
    initials |= INITIAL_IPAS
    return Vocabulary(
        initial_tokens=CONTROL_TOKENS + tuple(sorted(initials)),
        rhyme_tokens=CONTROL_TOKENS + tuple(sorted(rhymes)),
        tone_tokens=CONTROL_TOKENS + tuple(sorted(t.label for t in Tone)),
    )


def vocab_report(vocab: Vocabulary) -> dict:
    """Computed space sizes next to the nominal design counts.

    The ∅ initial is an extension (zero-initial syllables need it); content
    totals are reported with and without it so the comparison against the
    design counts is explicit.
    """
    counts = vocab.content_counts
    computed_core_initials = counts["initials"] - 1  # minus the ∅ extension
    computed_total = computed_core_initials + counts["rhymes"] + counts["tones"]
    design_sum = DESIGN_COUNTS["initials"] + DESIGN_COUNTS["rhymes"] + DESIGN_COUNTS["tones"]
    return {
        "computed": {
            "initials": computed_core_initials,
            "initials_with_empty": counts["initials"],
            "rhymes": counts["rhymes"],
            "tones": counts["tones"],
            "content_total": computed_total,
            "content_total_with_empty": computed_total + 1,
        },
        "design": dict(DESIGN_COUNTS),
        "notes": [
            "the ∅ initial is an extension beyond the 22 nominal initials",
            f"nominal components sum to {design_sum}, the stated total is {DESIGN_COUNTS['total']}",
            f"computed rhyme count {counts['rhymes']} vs nominal {DESIGN_COUNTS['rhymes']}",
        ],
    }


def save_vocab(vocab: Vocabulary, path) -> None:
    """Plain-text table: space, id, token — bit-exact across platforms."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for space, tokens in (
            ("initial", vocab.initial_tokens),
            ("rhyme", vocab.rhyme_tokens),
            ("tone", vocab.tone_tokens),
        ):
            for token_id, token in enumerate(tokens):
                fh.write(f"{space}\t{token_id}\t{token}\n")


def load_vocab(path) -> Vocabulary:
    spaces: dict[str, list[str]] = {"initial": [], "rhyme": [], "tone": []}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            space, token_id, token = line.rstrip("\n").split("\t")
            if int(token_id) != len(spaces[space]):
                raise ValueError(f"non-contiguous id {token_id} for {space}")
            spaces[space].append(token)
    return Vocabulary(
        initial_tokens=tuple(spaces["initial"]),
        rhyme_tokens=tuple(spaces["rhyme"]),
        tone_tokens=tuple(spaces["tone"]),
    )
