"""Edit-distance error rates: CER, WER, PER, and the per-component PER split.

All rates are (substitutions + deletions + insertions) / reference length
under a minimum-cost unit-weight alignment.  PER aligns hypothesis syllables
against reference syllables and then scores the initial, rhyme, and tone
streams against that single alignment, so the three streams stay synchronized
with the tuple-per-step decoder output; a flat mode that aligns each stream
independently is available behind a flag.
"""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass
from typing import Sequence

from .tokenizer import tokenize


@dataclass(frozen=True)
class ErrorRateReport:
    substitutions: int
    deletions: int
    insertions: int
    reference_length: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def rate(self) -> float:
        """Error rate; 0 for empty-vs-empty, +inf when only the reference is empty."""
        if self.reference_length == 0:
            return 0.0 if self.errors == 0 else math.inf
        return self.errors / self.reference_length

    def as_dict(self) -> dict:
        rate = self.rate
        return {
            "substitutions": self.substitutions,
            "deletions": self.deletions,
            "insertions": self.insertions,
            "reference_length": self.reference_length,
            "rate": "undefined" if math.isinf(rate) else rate,
        }

    def __add__(self, other: "ErrorRateReport") -> "ErrorRateReport":
        return ErrorRateReport(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.reference_length + other.reference_length,
        )


ZERO_REPORT = ErrorRateReport(0, 0, 0, 0)


def align(ref: Sequence, hyp: Sequence) -> list[tuple[str, int, int]]:
    """One optimal alignment as (op, ref_index, hyp_index) steps.

    Ops are "match", "sub", "del" (reference token missing from the
    hypothesis), and "ins" (extra hypothesis token); the index that does not
    apply is -1.  Cost ties break substitution > deletion > insertion.
    """
    m, n = len(ref), len(hyp)
    dist = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dist[i][0] = i
    for j in range(1, n + 1):
        dist[0][j] = j
    for i in range(1, m + 1):
        row, prev = dist[i], dist[i - 1]
        for j in range(1, n + 1):
            same = ref[i - 1] == hyp[j - 1]
            row[j] = min(prev[j - 1] + (0 if same else 1), prev[j] + 1, row[j - 1] + 1)

    ops = []
    i, j = m, n
    while i > 0 or j > 0:
        here = dist[i][j]
        if i > 0 and j > 0:
            same = ref[i - 1] == hyp[j - 1]
            if dist[i - 1][j - 1] + (0 if same else 1) == here:
                ops.append(("match" if same else "sub", i - 1, j - 1))
                i, j = i - 1, j - 1
                continue
        if i > 0 and dist[i - 1][j] + 1 == here:
            ops.append(("del", i - 1, -1))
            i -= 1
            continue
        ops.append(("ins", -1, j - 1))
        j -= 1
    ops.reverse()
    return ops


def edit_distance(ref: Sequence, hyp: Sequence) -> tuple[int, int, int, int]:
    """Levenshtein distance with unit costs: (distance, S, D, I)."""
    s = d = i_ = 0
    for op, _, _ in align(ref, hyp):
        if op == "sub":
            s += 1
        elif op == "del":
            d += 1
        elif op == "ins":
            i_ += 1
    return s + d + i_, s, d, i_


def _report(ref: Sequence, hyp: Sequence) -> ErrorRateReport:
    _, s, d, i_ = edit_distance(ref, hyp)
    return ErrorRateReport(s, d, i_, len(ref))


def wer(ref: str, hyp: str) -> ErrorRateReport:
    """Word error rate over whitespace-separated words."""
    return _report(ref.split(), hyp.split())


def cer(ref: str, hyp: str, include_spaces: bool = False) -> ErrorRateReport:
    """Character error rate over canonically composed characters.

    Inter-word spaces are excluded by default; pass include_spaces=True to
    count them as characters.
    """

    def chars(text: str) -> list[str]:
        text = unicodedata.normalize("NFC", text)
        return list(text) if include_spaces else [c for c in text if not c.isspace()]

    return _report(chars(ref), chars(hyp))


@dataclass(frozen=True)
class PerReport:
    initial: ErrorRateReport
    rhyme: ErrorRateReport
    tone: ErrorRateReport
    overall: ErrorRateReport

    def as_dict(self) -> dict:
        return {
            "per_i": self.initial.as_dict(),
            "per_r": self.rhyme.as_dict(),
            "per_t": self.tone.as_dict(),
            "per": self.overall.as_dict(),
        }

    def __add__(self, other: "PerReport") -> "PerReport":
        return PerReport(
            self.initial + other.initial,
            self.rhyme + other.rhyme,
            self.tone + other.tone,
            self.overall + other.overall,
        )


ZERO_PER = PerReport(ZERO_REPORT, ZERO_REPORT, ZERO_REPORT, ZERO_REPORT)

_COMPONENTS = (
    ("initial", lambda s: s.initial),
    ("rhyme", lambda s: s.rhyme),
    ("tone", lambda s: s.tone),
)


def per_components(ref: str, hyp: str, alignment: str = "tuple") -> PerReport:
    """Component-wise phoneme error rates and their aggregate.

    "tuple" mode (default) aligns whole syllables once and scores each
    component stream against that alignment: a deleted or inserted syllable
    counts in all three streams.  "flat" mode aligns the three streams
    independently.  The aggregate is the length-weighted mean of the streams,
    computed from the summed counts so the identity is exact.
    """
    ref_syls = tokenize(ref)
    hyp_syls = tokenize(hyp)
    parts: dict[str, ErrorRateReport] = {}
    if alignment == "tuple":
        ops = align(ref_syls, hyp_syls)
        for name, pick in _COMPONENTS:
            s = d = i_ = 0
            for op, ri, hi in ops:
                if op == "del":
                    d += 1
                elif op == "ins":
                    i_ += 1
                elif pick(ref_syls[ri]) != pick(hyp_syls[hi]):
                    s += 1
            parts[name] = ErrorRateReport(s, d, i_, len(ref_syls))
    elif alignment == "flat":
        for name, pick in _COMPONENTS:
            parts[name] = _report([pick(s) for s in ref_syls], [pick(s) for s in hyp_syls])
    else:
        raise ValueError(f"unknown alignment mode: {alignment!r}")
    overall = parts["initial"] + parts["rhyme"] + parts["tone"]
    return PerReport(parts["initial"], parts["rhyme"], parts["tone"], overall)


def per(ref: str, hyp: str, alignment: str = "tuple") -> ErrorRateReport:
    """Aggregate phoneme error rate over the three component streams."""
    return per_components(ref, hyp, alignment).overall


def score_pairs(pairs, include_spaces: bool = False, alignment: str = "tuple",
                with_per: bool = True) -> dict:
    """Corpus-level report over (ref, hyp) pairs; counts accumulate per metric."""
    total_cer = ZERO_REPORT
    total_wer = ZERO_REPORT
    total_per = ZERO_PER
    n = 0
    for ref, hyp in pairs:
        total_cer += cer(ref, hyp, include_spaces)
        total_wer += wer(ref, hyp)
        if with_per:
            total_per += per_components(ref, hyp, alignment)
        n += 1
    report = {"utterances": n, "cer": total_cer.as_dict(), "wer": total_wer.as_dict()}
    if with_per:
        report.update(total_per.as_dict())
    return report
