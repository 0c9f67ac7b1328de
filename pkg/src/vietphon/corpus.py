"""Transcript manifest ingestion, non-Vietnamese detection, and filtering.

Manifests are JSONL with fields {id, transcript, split}; unknown fields
(audio paths etc.) pass through untouched.  A word counts as Vietnamese when
it parses as a syllable AND renders back to itself — the round-trip guard
rejects pseudo-parses and spelling variants outside the canonical orthography.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass, field

from .tokenizer import TokenizeError, parse_syllable, render_syllable

_STRIP_CHARS = "".join(
    (
        "!\"#$%&'()*+,./:;<=>?@[\\]^_`{|}~",
        "‘’“”…«»–—¡¿",
    )
)

#: published non-Vietnamese transcript percentages for two public Vietnamese
#: ASR corpora, for informative comparison only (this toolkit's parse-based
#: verdict is not guaranteed to match the original counting rule)
REFERENCE_CONTAMINATION = {
    "vivos": {"train": 0.87, "test": 0.79, "overall": 0.70},
    "lsvsc": {"train": 9.19, "dev": 9.98, "test": 8.89, "overall": 9.24},
}


class MalformedManifestLine(ValueError):
    def __init__(self, line_number: int, reason: str):
        super().__init__(f"manifest line {line_number}: {reason}")
        self.line_number = line_number


def clean_words(raw: str) -> list[str]:
    """Cleaned lowercase words from one raw token or phrase.

    Case-folds, splits hyphenated compounds, strips surrounding punctuation,
    and recomposes to NFC.  Empty results are dropped.
    """
    words = []
    for piece in raw.lower().replace("-", " ").split():
        piece = unicodedata.normalize("NFC", piece.strip(_STRIP_CHARS))
        if piece:
            words.append(piece)
    return words


def is_vietnamese_word(word: str) -> bool:
    """True iff the word parses and renders back to itself (round-trip guard)."""
    try:
        result = parse_syllable(word)
    except TokenizeError:
        return False
    return render_syllable(result.syllable) == unicodedata.normalize("NFC", word)


def offending_words(transcript: str) -> list[str]:
    """The cleaned words of a transcript that are not Vietnamese syllables."""
    return [w for w in clean_words(transcript) if not is_vietnamese_word(w)]


@dataclass
class TranscriptRecord:
    utterance_id: str
    transcript: str
    split: str = ""
    verdict: str = ""  # "vietnamese" | "contains_non_vietnamese"
    offending: list[str] = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def classify(self) -> "TranscriptRecord":
        self.offending = offending_words(self.transcript)
        self.verdict = "contains_non_vietnamese" if self.offending else "vietnamese"
        return self

    def to_json(self) -> str:
        payload = {"id": self.utterance_id, "transcript": self.transcript}
        if self.split:
            payload["split"] = self.split
        payload.update(self.extras)
        if self.verdict == "contains_non_vietnamese":
            payload["non_vietnamese_words"] = self.offending
        return json.dumps(payload, ensure_ascii=False)


def parse_manifest_line(line: str, line_number: int) -> TranscriptRecord:
    try:
        payload = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedManifestLine(line_number, f"invalid JSON ({exc.msg})") from None
    if not isinstance(payload, dict):
        raise MalformedManifestLine(line_number, "expected a JSON object")
    for key in ("id", "transcript"):
        if key not in payload:
            raise MalformedManifestLine(line_number, f"missing field {key!r}")
    return TranscriptRecord(
        utterance_id=str(payload.pop("id")),
        transcript=str(payload.pop("transcript")),
        split=str(payload.pop("split", "")),
        extras=payload,
    )


def load_manifest(lines) -> list[TranscriptRecord]:
    records = []
    for line_number, line in enumerate(lines, start=1):
        line = line.strip()
        if line:
            records.append(parse_manifest_line(line, line_number))
    return records


@dataclass(frozen=True)
class SplitStats:
    total: int
    flagged: int

    @property
    def percent(self) -> float:
        return 100.0 * self.flagged / self.total if self.total else 0.0


@dataclass(frozen=True)
class CorpusStats:
    splits: dict[str, SplitStats]
    overall: SplitStats

    def as_dict(self) -> dict:
        def row(s: SplitStats) -> dict:
            return {"total": s.total, "flagged": s.flagged, "percent": s.percent}

        return {
            "splits": {name: row(s) for name, s in sorted(self.splits.items())},
            "overall": row(self.overall),
        }


def filter_manifest(records: list[TranscriptRecord]):
    """Partition records into (kept, discarded, stats); classifies in place."""
    kept, discarded = [], []
    totals: dict[str, list[int]] = {}
    for record in records:
        record.classify()
        split = record.split or "(unsplit)"
        bucket = totals.setdefault(split, [0, 0])
        bucket[0] += 1
        if record.verdict == "contains_non_vietnamese":
            bucket[1] += 1
            discarded.append(record)
        else:
            kept.append(record)
    stats = CorpusStats(
        splits={name: SplitStats(t, f) for name, (t, f) in totals.items()},
        overall=SplitStats(len(records), len(discarded)),
    )
    return kept, discarded, stats
