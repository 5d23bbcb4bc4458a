"""Command-line interface.

Every command is deterministic given identical inputs, flags, and seeds.
Errors exit nonzero with a single machine-readable JSON line on stderr.
Flags take precedence over values from an optional JSON config file
(--config), which takes precedence over built-in defaults.
"""

from __future__ import annotations

import argparse
import collections
import json
import logging
import sys

from . import bpe, cognates, segmenter, serialization, trainer
from .errors import CogsegError
from .model import EDIT_MODES

_logger = logging.getLogger(__name__)

# Characters that would collide with the file formats or segment markers.
RESERVED_SUBSTRINGS = ("|", "@@")

_UNSET = object()


def validate_token(token: str) -> str:
    if any(ch.isspace() for ch in token):
        raise CogsegError("token %r contains whitespace" % token)
    for bad in RESERVED_SUBSTRINGS:
        if bad in token:
            raise CogsegError("token %r contains reserved %r" % (token, bad))
    return token


def load_word_counts(path) -> dict[str, int]:
    """Count whitespace-separated tokens of a UTF-8 text file."""
    counts: collections.Counter = collections.Counter()
    with open(path, encoding="utf-8") as stream:
        for line in stream:
            for token in line.split():
                counts[validate_token(token)] += 1
    if not counts:
        raise CogsegError("corpus %s contains no tokens" % path)
    return dict(counts)


def load_count_table(path) -> dict[str, int]:
    """Read a word<TAB>count table."""
    table = {}
    with open(path, encoding="utf-8") as stream:
        for lineno, line in enumerate(stream, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise CogsegError("%s:%d: expected word<TAB>count" % (path, lineno))
            table[fields[0]] = int(fields[1])
    return table


def _resolved(args, key, default):
    """flags > config file > defaults."""
    value = getattr(args, key)
    if value is not _UNSET:
        return value
    config = getattr(args, "_config", {})
    if key in config:
        return config[key]
    return default


def _training_params(args) -> trainer.TrainingParams:
    return trainer.TrainingParams(
        alpha=float(_resolved(args, "alpha", 0.01)),
        edit_weight=float(_resolved(args, "edit_weight", 10.0)),
        max_epochs=int(_resolved(args, "max_epochs", 15)),
        convergence_threshold=float(_resolved(args, "convergence", 1e-5)),
        rng_seed=int(_resolved(args, "seed", 0)),
        dampening=_resolved(args, "dampening", "none"),
        edit_mode=_resolved(args, "edit_mode", "full"),
    )


def _add_training_flags(sub, with_edits: bool):
    sub.add_argument("--alpha", type=float, default=_UNSET)
    sub.add_argument("--seed", type=int, default=_UNSET)
    sub.add_argument("--max-epochs", type=int, default=_UNSET, dest="max_epochs")
    sub.add_argument("--convergence", type=float, default=_UNSET)
    sub.add_argument("--dampening", choices=("none", "log"), default=_UNSET)
    sub.add_argument("--config", default=None)
    sub.add_argument("--out", required=True)
    if with_edits:
        sub.add_argument("--edit-weight", type=float, default=_UNSET, dest="edit_weight")
        sub.add_argument("--edit-mode", choices=EDIT_MODES, default=_UNSET, dest="edit_mode")


def cmd_extract_cognates(args):
    pairs = cognates.read_pairs_tsv(args.pairs)
    result = cognates.extract(pairs, min_count=args.min_count, short_len=args.short_len)
    cognates.write_pairs_tsv(args.out, result)
    _logger.info("kept %d of %d pairs", len(result), len(pairs))


def cmd_train(args):
    params = _training_params(args)
    corpus_a = load_word_counts(args.corpus_a)
    corpus_b = load_word_counts(args.corpus_b)
    pair_rows = cognates.read_pairs_tsv(args.cognates) if args.cognates else []
    pairs = [(p.word_a, p.word_b) for p in pair_rows]
    model = trainer.initialize(corpus_a, corpus_b, pairs, params)
    report = trainer.train(model, params)
    serialization.save_model(model, args.out)
    _logger.info(
        "trained %d epochs, final cost %.4f", report.epochs_run, report.final_cost
    )


def cmd_train_mono(args):
    params = _training_params(args)
    corpus = load_word_counts(args.corpus)
    model = trainer.initialize(corpus, {}, [], params)
    report = trainer.train(model, params)
    serialization.save_model(model, args.out)
    _logger.info(
        "trained %d epochs, final cost %.4f", report.epochs_run, report.final_cost
    )


def cmd_segment(args):
    model = serialization.load_model(args.model)
    config = segmenter.SegmenterConfig(joiner=args.joiner)
    for line in segmenter.segment_corpus(model, sys.stdin, args.lang, config):
        sys.stdout.write(line + "\n")


def cmd_segment_source(args):
    source = serialization.load_model(args.source_model)
    cognate_model = serialization.load_model(args.cognate_model)
    config = segmenter.SegmenterConfig(joiner=args.joiner)
    for lineno, line in enumerate(sys.stdin, 1):
        line = line.rstrip("\n")
        out = []
        for token in line.split(" "):
            if not token or segmenter.TAG_PATTERN.match(token):
                out.append(token)
                continue
            analysis = None
            for language in ("a", "b"):
                analysis = cognate_model.analyses[language].get(token)
                if analysis is not None:
                    break
            if analysis is None:
                # Stored source analyses first, then Viterbi fallback.
                analysis = source.analyses["a"].get(token)
            if analysis is None:
                analysis = segmenter.viterbi_segment(source.lexicons["a"], token, config)
            out.append(segmenter.join_morphs(analysis.morphs, config.joiner))
        sys.stdout.write(" ".join(out) + "\n")


def cmd_prep_tag(args):
    targets = tuple(args.targets.split(","))
    for line in sys.stdin:
        sys.stdout.write(
            segmenter.prefix_target_tag(line.rstrip("\n"), args.lang, targets) + "\n"
        )


def cmd_bpe_train(args):
    tables = {}
    for index, path in enumerate(args.counts.split(",")):
        tables["lang%d" % index] = load_count_table(path)
    if len(tables) > 1:
        counts = bpe.balance_counts(tables)
    else:
        counts = bpe.BalancedCounts(tables=tables, scales={k: 1.0 for k in tables})
    table = bpe.train_bpe(counts, args.vocab)
    bpe.save_merges(args.out, table)
    _logger.info("learned %d merges%s", len(table.merges),
                 " (truncated)" if table.truncated else "")


def cmd_bpe_apply(args):
    table = bpe.load_merges(args.merges)
    joiner = args.joiner
    for line in sys.stdin:
        line = line.rstrip("\n")
        out = []
        for token in line.split(" "):
            if not token:
                out.append(token)
                continue
            pieces = bpe.apply_bpe(table, token)
            out.append(segmenter.join_morphs(tuple(pieces), joiner))
        sys.stdout.write(" ".join(out) + "\n")


def cmd_report_edits(args):
    model = serialization.load_model(args.model)
    for edit, count in serialization.report_edits(model, args.top, args.direction):
        sys.stdout.write("%s\t%d\n" % (edit, count))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cogseg",
        description="Bilingual subword segmentation toolkit: linked-lexicon "
        "training, cognate extraction, corpus segmentation, and a balanced "
        "BPE baseline.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-cognates", help="filter aligned pairs to a cognate list")
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--min-count", type=int, default=2, dest="min_count")
    p.add_argument("--short-len", type=int, default=4, dest="short_len")
    p.set_defaults(func=cmd_extract_cognates)

    p = sub.add_parser("train", help="train the bilingual model")
    p.add_argument("--corpus-a", required=True, dest="corpus_a")
    p.add_argument("--corpus-b", required=True, dest="corpus_b")
    p.add_argument("--cognates", default=None)
    _add_training_flags(p, with_edits=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("train-mono", help="train a single-language model")
    p.add_argument("--corpus", required=True)
    _add_training_flags(p, with_edits=False)
    p.set_defaults(func=cmd_train_mono, edit_weight=_UNSET, edit_mode=_UNSET)

    p = sub.add_parser("segment", help="segment stdin with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--lang", required=True, choices=("a", "b"))
    p.add_argument("--joiner", default=segmenter.DEFAULT_JOINER)
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser(
        "segment-source",
        help="segment source text, reusing target-side analyses where present",
    )
    p.add_argument("--source-model", required=True, dest="source_model")
    p.add_argument("--cognate-model", required=True, dest="cognate_model")
    p.add_argument("--joiner", default=segmenter.DEFAULT_JOINER)
    p.set_defaults(func=cmd_segment_source)

    p = sub.add_parser("prep-tag", help="prefix the target-language tag")
    p.add_argument("--lang", required=True)
    p.add_argument("--targets", default="et,fi")
    p.set_defaults(func=cmd_prep_tag)

    p = sub.add_parser("bpe-train", help="train balanced BPE merges")
    p.add_argument("--counts", required=True, help="comma-separated count TSVs")
    p.add_argument("--vocab", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bpe_train)

    p = sub.add_parser("bpe-apply", help="apply BPE merges to stdin")
    p.add_argument("--merges", required=True)
    p.add_argument("--joiner", default=segmenter.DEFAULT_JOINER)
    p.set_defaults(func=cmd_bpe_apply)

    p = sub.add_parser("report-edits", help="most frequent learned edits")
    p.add_argument("--model", required=True)
    p.add_argument("--top", type=int, default=30)
    p.add_argument("--direction", choices=("ab", "ba"), default="ab")
    p.set_defaults(func=cmd_report_edits)
    return parser


def main(argv=None) -> int:
    for stream in (sys.stdin, sys.stdout, sys.stderr):
        if hasattr(stream, "reconfigure"):
            stream.reconfigure(encoding="utf-8")
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as stream:
            args._config = json.load(stream)
    else:
        args._config = {}
    try:
        args.func(args)
    except (CogsegError, OSError) as exc:
        sys.stderr.write(
            json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
