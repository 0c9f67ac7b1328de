"""Command-line entry point for all pipelines.

Exit codes: 0 success, 1 data error (reported on stderr with context),
2 usage error.  All I/O is UTF-8; decomposed input is accepted unless
--no-nfd-ok is given, output is always canonically composed.
"""

from __future__ import annotations

import argparse
import json
import sys
import unicodedata

from . import corpus, head, lexicon, metrics, phonology, tokenizer, vocab

#: one flag default per documented design decision; snapshot-tested
FLAG_DEFAULTS = {
    "strict": False,
    "cer_include_spaces": False,
    "per_alignment": "tuple",
    "residual": "normalized",
    "nfd_ok": True,
}


class DataError(Exception):
    """Wraps data-level failures with file/line context for stderr."""


def _read_lines(path: str):
    if path == "-":
        return sys.stdin.read().splitlines()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise DataError(str(exc)) from None


def _open_out(path: str | None):
    return sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="\n")


def _check_composed(line: str, lineno: int, source: str, nfd_ok: bool):
    if not nfd_ok and unicodedata.normalize("NFC", line) != line:
        raise DataError(f"{source}:{lineno}: input is not canonically composed (--no-nfd-ok)")


def _cmd_tokenize(args) -> int:
    out = _open_out(args.output)
    for lineno, line in enumerate(_read_lines(args.input), start=1):
        _check_composed(line, lineno, args.input, args.nfd_ok)
        words = []
        for token in line.split():
            words.extend(corpus.clean_words(token))
        try:
            syllables = tokenizer.tokenize(" ".join(words))
        except tokenizer.TokenizeError as exc:
            raise DataError(f"{args.input}:{lineno}: {exc}") from None
        if args.strict:
            for index, syllable in enumerate(syllables):
                problems = phonology.validate(syllable, strict=True)
                if problems:
                    raise DataError(f"{args.input}:{lineno}: word {index}: {'; '.join(problems)}")
        print(tokenizer.format_phonemes(syllables), file=out)
    return 0


def _cmd_detokenize(args) -> int:
    out = _open_out(args.output)
    for lineno, line in enumerate(_read_lines(args.input), start=1):
        try:
            print(tokenizer.detokenize(tokenizer.parse_phonemes(line)), file=out)
        except (ValueError, KeyError) as exc:
            raise DataError(f"{args.input}:{lineno}: {exc}") from None
    return 0


def _cmd_roundtrip(args) -> int:
    words = lexicon.load_lexicon() if args.input is None else [
        w for line in _read_lines(args.input) for w in line.split()
    ]
    mismatches = []
    for word in words:
        try:
            rendered = tokenizer.render_syllable(tokenizer.parse_syllable(word).syllable)
        except (tokenizer.TokenizeError, tokenizer.RenderFailure) as exc:
            mismatches.append(f"{word}\t{exc}")
            continue
        if rendered != unicodedata.normalize("NFC", word):
            mismatches.append(f"{word}\t{rendered}")
    for line in mismatches:
        print(line, file=sys.stderr)
    print(f"{len(words)} words, {len(mismatches)} mismatches")
    return 1 if mismatches else 0


def _cmd_vocab(args) -> int:
    words = lexicon.load_lexicon() if args.lexicon is None else [
        w for line in _read_lines(args.lexicon) for w in line.split()
    ]
    try:
        built = vocab.build_vocab(words)
    except tokenizer.TokenizeError as exc:
        raise DataError(str(exc)) from None
    if args.output:
        vocab.save_vocab(built, args.output)
    print(json.dumps(vocab.vocab_report(built), ensure_ascii=False, indent=2))
    return 0


def _cmd_rules(args) -> int:
    print(phonology.rules_text(), end="")
    return 0


def _cmd_score(args) -> int:
    if args.pairs:
        pairs = []
        for lineno, line in enumerate(_read_lines(args.pairs), start=1):
            if not line.strip():
                continue
            try:
                payload = json.loads(line)
                pairs.append((payload["ref"], payload["hyp"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise DataError(f"{args.pairs}:{lineno}: bad pair line ({exc})") from None
    else:
        refs = _read_lines(args.ref)
        hyps = _read_lines(args.hyp)
        if len(refs) != len(hyps):
            raise DataError(f"{args.ref}: {len(refs)} lines vs {args.hyp}: {len(hyps)} lines")
        pairs = list(zip(refs, hyps))
    try:
        report = metrics.score_pairs(
            pairs,
            include_spaces=args.cer_include_spaces,
            alignment=args.per_alignment,
            with_per=not args.no_per,
        )
    except tokenizer.TokenizeError as exc:
        raise DataError(f"PER tokenization failed: {exc} (use --no-per to skip)") from None
    print(json.dumps(report, ensure_ascii=False, indent=2))
    return 0


def _cmd_filter(args) -> int:
    try:
        records = corpus.load_manifest(_read_lines(args.manifest))
    except corpus.MalformedManifestLine as exc:
        raise DataError(f"{args.manifest}: {exc}") from None
    kept, discarded, stats = corpus.filter_manifest(records)
    if args.output:
        with _open_out(args.output) as fh:
            for record in kept:
                print(record.to_json(), file=fh)
    if args.discard_file:
        with _open_out(args.discard_file) as fh:
            for record in discarded:
                print(record.to_json(), file=fh)
    payload = stats.as_dict()
    if args.expected_stats:
        payload["reference"] = {
            "dataset": args.expected_stats,
            "percent": corpus.REFERENCE_CONTAMINATION[args.expected_stats],
            "note": "informative comparison only; verdicts here are parse-based",
        }
    print(json.dumps(payload, ensure_ascii=False, indent=2))
    return 0


def _cmd_demo_head(args) -> int:
    if args.dump_params:
        params = head.init_params(head.HeadConfig(dim=4, v_init=8, v_rhyme=10), seed=args.seed)
        head.save_params(params, args.dump_params)
    if args.load_params:
        try:
            params = head.load_params(args.load_params)
        except (OSError, ValueError) as exc:
            raise DataError(f"{args.load_params}: {exc}") from None
        rng_ids = [[0, 0, 0]]
        targets = {h: [0] for h in head.HEADS}
        report = head.grad_check(params, rng_ids, targets, residual=args.residual)
        print(json.dumps(report.as_dict(), indent=2))
        return 0 if report.passed else 1
    summary = head.run_grad_suite(
        n_configs=args.configs, base_seed=args.seed, residual=args.residual
    )
    print(json.dumps(summary, indent=2))
    return 0 if summary["passed"] else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vietphon",
                                     description="Vietnamese phonemic analysis toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tokenize", help="text to phoneme lines (init|glide|vowel|final|tone)")
    p.add_argument("input", nargs="?", default="-", help="text file, one utterance per line")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--strict", action="store_true", default=FLAG_DEFAULTS["strict"],
                   help="also enforce the stop-final tone restriction")
    p.add_argument("--nfd-ok", action=argparse.BooleanOptionalAction,
                   default=FLAG_DEFAULTS["nfd_ok"], help="accept decomposed input")
    p.set_defaults(func=_cmd_tokenize)

    p = sub.add_parser("detokenize", help="phoneme lines back to text")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=_cmd_detokenize)

    p = sub.add_parser("roundtrip", help="parse+render self-check over a word list")
    p.add_argument("input", nargs="?", default=None,
                   help="word list file (default: bundled lexicon)")
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("vocab", help="build the token spaces, report counts")
    p.add_argument("--lexicon", default=None, help="word list (default: bundled lexicon)")
    p.add_argument("-o", "--output", default=None, help="write the token table here")
    p.set_defaults(func=_cmd_vocab)

    p = sub.add_parser("rules", help="dump the grapheme rule table for audit")
    p.set_defaults(func=_cmd_rules)

    p = sub.add_parser("score", help="CER/WER/PER report for reference vs hypothesis")
    p.add_argument("--ref", help="reference transcript file")
    p.add_argument("--hyp", help="hypothesis transcript file")
    p.add_argument("--pairs", help='JSONL file of {"ref": ..., "hyp": ...} lines')
    p.add_argument("--cer-include-spaces", action="store_true",
                   default=FLAG_DEFAULTS["cer_include_spaces"])
    p.add_argument("--per-alignment", choices=("tuple", "flat"),
                   default=FLAG_DEFAULTS["per_alignment"])
    p.add_argument("--no-per", action="store_true", help="skip PER (unparseable transcripts)")
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("filter", help="drop manifest records with non-Vietnamese words")
    p.add_argument("manifest", help="JSONL manifest with id/transcript/split fields")
    p.add_argument("-o", "--output", default=None, help="kept records (JSONL)")
    p.add_argument("--discard-file", default=None, help="rejected records (JSONL)")
    p.add_argument("--expected-stats", choices=sorted(corpus.REFERENCE_CONTAMINATION),
                   default=None, help="also print published reference percentages")
    p.set_defaults(func=_cmd_filter)

    p = sub.add_parser("demo-head", help="run the gradient verification suite")
    p.add_argument("--configs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--residual", choices=("normalized", "input"),
                   default=FLAG_DEFAULTS["residual"])
    p.add_argument("--dump-params", default=None, help="write a seeded toy parameter file")
    p.add_argument("--load-params", default=None, help="gradient-check a parameter file")
    p.set_defaults(func=_cmd_demo_head)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "score" and not args.pairs and not (args.ref and args.hyp):
        parser.error("score requires --pairs or both --ref and --hyp")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
