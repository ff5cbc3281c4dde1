"""Command-line interface: index, mine, rank, eval.

Configuration comes from an optional JSON config file plus flags; flags
win. Exit codes: 0 success, 1 usage/configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .corpus import WordPair
from .evaluation import DataError, format_class_table, format_report_table
from .pipeline import PipelineConfig, UsageError, run_eval, run_index, run_mine, run_rank

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _ArgumentParser(argparse.ArgumentParser):
    """Raise instead of exiting so usage problems map to exit code 1."""

    def error(self, message):
        raise UsageError(message)


def _add_common_flags(parser) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--output-dir", help="artifact directory (default relmine-out)")
    parser.add_argument("--workers", type=int, help="parallel workers for phrase search")
    parser.add_argument("--seed", type=int, help="seed for the random ranker")
    parser.add_argument("--min-pair-freq", type=int, help="drop patterns seen with fewer pair lists")
    parser.add_argument("--svd-rank", type=int, help="number of singular vectors to keep")
    parser.add_argument("--ranker", help="ranker name, or 'all' for the comparison grid (eval only)")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="relmine", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="tokenize a corpus and build the positional index")
    _add_common_flags(p_index)
    p_index.add_argument("--corpus", help="corpus directory or file")
    p_index.add_argument("--corpus-format", choices=("dir", "lines"),
                         help="directory of files, or single file with one document per line")

    p_mine = sub.add_parser("mine", help="find phrases and build the pattern matrix for a pair set")
    _add_common_flags(p_mine)
    p_mine.add_argument("--pairs", required=True, help="word pairs file")
    p_mine.add_argument("--pairs-format", choices=("pairs", "analogies", "nounmod"), default="pairs",
                        help="pairs file layout (default: two words per line)")
    p_mine.add_argument("--lexicon", help="noun lexicon file, one lemma per line")

    p_rank = sub.add_parser("rank", help="export the two ranked pattern lists for one pair")
    _add_common_flags(p_rank)
    p_rank.add_argument("word_x", help="first member of the pair")
    p_rank.add_argument("word_y", help="second member of the pair")
    p_rank.add_argument("--top", type=int, default=10, help="rows of each list to print (default 10)")
    p_rank.add_argument("--out", help="output TSV path (default under the output directory)")

    p_eval = sub.add_parser("eval", help="run an evaluation task over mined artifacts")
    _add_common_flags(p_eval)
    p_eval.add_argument("--task", required=True, choices=("analogies", "nounmod"))
    p_eval.add_argument("--data", required=True, help="task data file")

    return parser


def _config_from_args(args) -> PipelineConfig:
    config = PipelineConfig.from_file(args.config) if args.config else PipelineConfig()
    overrides = {
        "output_dir": args.output_dir,
        "workers": args.workers,
        "seed": args.seed,
        "min_pair_freq": args.min_pair_freq,
        "svd_rank": args.svd_rank,
        "ranker": args.ranker,
    }
    for name in ("corpus", "corpus_format", "lexicon"):
        if hasattr(args, name):
            overrides[name] = getattr(args, name)
    config = config.with_overrides(**overrides)
    config.validate()
    return config


def _cmd_index(args) -> int:
    config = _config_from_args(args)
    stats = run_index(config)
    print(f"indexed {stats['documents']} documents, {stats['tokens']} tokens, "
          f"{stats['vocabulary']} vocabulary types -> {config.index_path}")
    return EXIT_OK


def _cmd_mine(args) -> int:
    config = _config_from_args(args)
    artifacts = run_mine(config, args.pairs, args.pairs_format)
    m = artifacts.manifest
    print(f"pairs: {m['pairs']['input']} read, {m['pairs']['with_phrases']} with phrases")
    print(f"patterns: {m['patterns']['before_filter']} generated, "
          f"{m['patterns']['after_filter']} kept (min pair freq {config.min_pair_freq})")
    print(f"matrix: {m['matrix']['rows']}x{m['matrix']['cols']}, "
          f"density {100 * m['matrix']['density']:.4f}%, svd rank {m['svd']['rank_used']}")
    print(f"artifacts written to {config.out}")
    return EXIT_OK


def _cmd_rank(args) -> int:
    config = _config_from_args(args)
    pair = WordPair(args.word_x.lower(), args.word_y.lower())
    out_path = run_rank(config, pair, args.out)
    print(f"ranked lists for {pair} ({config.ranker}) -> {out_path}")
    shown = 0
    with open(out_path, encoding="utf-8") as handle:
        current = None
        for line in handle:
            _pair, _direction, orientation, rank, score, pattern = line.rstrip("\n").split("\t")
            if orientation != current:
                current = orientation
                shown = 0
                print(f"  [{orientation}]")
            if shown < args.top:
                print(f"    {rank:>4}  {float(score):.6g}  {pattern}")
                shown += 1
    return EXIT_OK


def _cmd_eval(args) -> int:
    config = _config_from_args(args)
    reports = run_eval(config, args.task, args.data)
    print(format_report_table(reports))
    if args.task == "nounmod" and len(reports) == 1 and reports[0].per_class:
        print()
        print(format_class_table(reports[0]))
    print(f"report written to {config.out / f'eval-{args.task}.json'}")
    return EXIT_OK


_COMMANDS = {
    "index": _cmd_index,
    "mine": _cmd_mine,
    "rank": _cmd_rank,
    "eval": _cmd_eval,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            level=logging.DEBUG if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        return _COMMANDS[args.command](args)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
