"""Staged pipeline with persisted intermediate artifacts and a manifest.

Phrase search dominates run time on real corpora, so every stage writes
its outputs under the configured output directory and later stages reload
them instead of recomputing. The manifest records the configuration and
the counts needed to reproduce or sanity-check a run.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from . import corpus as corpus_mod
from .corpus import (MAX_GAP, MIN_GAP, NounLexicon, Orientation, PositionalIndex, WordPair,
                     find_phrases)
from .evaluation import (DataError, EvalReport, classify_noun_modifiers, evaluate_analogies,
                         parse_analogy_file, parse_noun_modifier_file)
from .matrix import (PairPatternMatrix, RowCosines, SvdFactors, build_matrix, load_matrix,
                     log_entropy_transform, row_cosines, save_matrix, truncated_svd)
from .patterns import (DEFAULT_MIN_PAIR_FREQ, Pattern, PatternStats, accumulate_stats,
                       dump_patterns, filter_patterns, load_pattern_freqs)
from .pertinence import (RANKERS, ConditionalTable, Ranker, ScoringContext,
                         conditional_probabilities, get_ranker, pertinence_scores,
                         ranked_lists_for_pair, write_ranked_lists)

logger = logging.getLogger(__name__)

MANIFEST_FORMAT = "relmine-manifest"
MANIFEST_VERSION = 1


class UsageError(Exception):
    """Bad flags, configuration, or command usage."""


@dataclass
class PipelineConfig:
    corpus: str | None = None
    corpus_format: str = "dir"  # "dir" (file per document) or "lines" (line per document)
    lexicon: str | None = None
    output_dir: str = "relmine-out"
    min_pair_freq: int = DEFAULT_MIN_PAIR_FREQ
    svd_rank: int = 300
    ranker: str = "pertinence"
    seed: int = 0
    workers: int = 1
    # Windows always allow one to three intervening tokens.
    min_gap: int = field(default=MIN_GAP, repr=False)
    max_gap: int = field(default=MAX_GAP, repr=False)

    def validate(self) -> None:
        if self.min_pair_freq < 1:
            raise UsageError(f"min pair frequency must be >= 1, got {self.min_pair_freq}")
        if self.svd_rank < 1:
            raise UsageError(f"svd rank must be >= 1, got {self.svd_rank}")
        if self.workers < 1:
            raise UsageError(f"workers must be >= 1, got {self.workers}")
        if self.corpus_format not in ("dir", "lines"):
            raise UsageError(f"corpus format must be 'dir' or 'lines', got {self.corpus_format!r}")
        if self.ranker != "all":
            try:
                get_ranker(self.ranker)
            except ValueError as err:
                raise UsageError(str(err)) from None

    @classmethod
    def from_file(cls, path) -> "PipelineConfig":
        try:
            with open(path, encoding="utf-8") as handle:
                payload = json.load(handle)
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}") from None
        except json.JSONDecodeError as err:
            raise UsageError(f"config file {path} is not valid JSON: {err}") from None
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(payload) - known
        if unknown:
            raise UsageError(f"unknown config keys in {path}: {', '.join(sorted(unknown))}")
        return cls(**payload)

    def with_overrides(self, **overrides) -> "PipelineConfig":
        """Return a copy with the non-None overrides applied (flags win)."""
        changes = {key: value for key, value in overrides.items() if value is not None}
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}

    @property
    def out(self) -> Path:
        return Path(self.output_dir)

    @property
    def index_path(self) -> Path:
        return self.out / "index.json"


def read_pairs_file(path, fmt: str = "pairs") -> list[WordPair]:
    """Read the word pairs to mine, deduplicated in first-seen order.

    Formats: "pairs" (two whitespace-separated words per line), "analogies"
    (question blocks; takes every stem and choice), "nounmod" (tab-separated
    modifier/head/label rows).
    """
    if fmt == "analogies":
        raw_pairs = []
        for question in parse_analogy_file(path):
            raw_pairs.append(question.stem)
            raw_pairs.extend(question.choices)
    elif fmt == "nounmod":
        raw_pairs = [item.pair for item in parse_noun_modifier_file(path)]
    elif fmt == "pairs":
        raw_pairs = []
        with open(path, encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                stripped = line.strip()
                if not stripped:
                    continue
                words = stripped.lower().split()
                if len(words) != 2:
                    raise DataError(f"{path}:{lineno}: expected two words per line, got {stripped!r}")
                raw_pairs.append(WordPair(words[0], words[1]))
    else:
        raise UsageError(f"unknown pairs format {fmt!r} (expected pairs, analogies, or nounmod)")
    seen = set()
    pairs = []
    for pair in raw_pairs:
        if pair not in seen:
            seen.add(pair)
            pairs.append(pair)
    return pairs


# Worker-process state for parallel phrase search: the index and lexicon are
# shipped once per worker via the pool initializer instead of per task.
_SEARCH_STATE: dict = {}


def _init_search_worker(index, lexicon, min_gap, max_gap):
    _SEARCH_STATE["args"] = (index, lexicon, min_gap, max_gap)


def _search_one_pair(pair):
    index, lexicon, min_gap, max_gap = _SEARCH_STATE["args"]
    return find_phrases(index, pair, lexicon, min_gap, max_gap)


def find_phrases_many(index, pairs, lexicon, workers: int = 1,
                      min_gap: int = MIN_GAP, max_gap: int = MAX_GAP):
    """Phrase search for many pairs, optionally across processes.

    Results are returned in input pair order, so any worker count yields
    output identical to a sequential run.
    """
    if workers <= 1 or len(pairs) <= 1:
        return [(pair, *find_phrases(index, pair, lexicon, min_gap, max_gap)) for pair in pairs]
    with ProcessPoolExecutor(
        max_workers=workers,
        initializer=_init_search_worker,
        initargs=(index, lexicon, min_gap, max_gap),
    ) as pool:
        results = list(pool.map(_search_one_pair, pairs, chunksize=max(1, len(pairs) // (4 * workers))))
    return [(pair, x_first, y_first) for pair, (x_first, y_first) in zip(pairs, results)]


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(payload, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, ensure_ascii=False, sort_keys=True, indent=2)
        handle.write("\n")


def run_index(config: PipelineConfig) -> dict:
    """Build and persist the positional index; returns corpus statistics."""
    if config.corpus is None:
        raise UsageError("no corpus path configured (set --corpus or the config file)")
    loader = corpus_mod.load_corpus_dir if config.corpus_format == "dir" else corpus_mod.load_corpus_lines
    try:
        documents = loader(config.corpus)
    except FileNotFoundError as err:
        raise DataError(str(err)) from None
    if not documents:
        raise DataError(f"corpus at {config.corpus} contains no non-empty documents")
    index = corpus_mod.build_index(documents)
    config.out.mkdir(parents=True, exist_ok=True)
    index.save(config.index_path)
    stats = {
        "documents": index.num_documents,
        "tokens": index.num_tokens,
        "vocabulary": len(index.postings),
    }
    logger.info("indexed %(documents)d documents, %(tokens)d tokens, %(vocabulary)d types", stats)
    return stats


@dataclass
class MiningArtifacts:
    """Everything mined for one pair set, ready for ranking and evaluation."""

    matrix: PairPatternMatrix
    pattern_pair_freq: dict[Pattern, int]
    transformed: sparse.csr_matrix
    col_weights: np.ndarray
    factors: SvdFactors
    cosines: RowCosines
    conditionals: ConditionalTable
    pertinence: sparse.csr_matrix
    manifest: dict

    def scoring_context(self, seed: int = 0) -> ScoringContext:
        return ScoringContext(
            raw=self.matrix.raw,
            transformed=self.transformed,
            factors=self.factors,
            conditionals=self.conditionals,
            pertinence=self.pertinence,
            row_map=self.matrix.row_map,
            col_map=self.matrix.col_map,
            pattern_pair_freq=self.pattern_pair_freq,
            seed=seed,
        )


def _dump_phrases(searched, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for pair, x_first, y_first in searched:
            for phrases in (x_first, y_first):
                for ph in phrases:
                    mid = " ".join(ph.intervening)
                    handle.write(
                        f"{pair.x}\t{pair.y}\t{ph.orientation.value}\t{ph.first}\t{mid}\t{ph.last}\t{ph.count}\n"
                    )


def _dump_conditionals(table, directory: Path) -> None:
    for name, mat in (
        ("pattern_given_pair", table.pattern_given_pair),
        ("pair_given_pattern", table.pair_given_pattern),
    ):
        coo = mat.tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(directory / f"{name}.tsv", "w", encoding="utf-8") as handle:
            for i in order:
                handle.write(f"{coo.row[i]}\t{coo.col[i]}\t{coo.data[i]!r}\n")


def run_mine(config: PipelineConfig, pairs_path, pairs_format: str = "pairs") -> MiningArtifacts:
    """Mine phrases, patterns, matrix, factors, and conditionals for a pair set."""
    if not config.index_path.is_file():
        raise DataError(f"no index at {config.index_path}; run the index command first")
    index = PositionalIndex.load(config.index_path)
    if config.lexicon is None:
        raise UsageError("no noun lexicon configured (set --lexicon or the config file)")
    try:
        lexicon = NounLexicon.from_file(config.lexicon)
    except FileNotFoundError:
        raise DataError(f"noun lexicon not found: {config.lexicon}") from None
    pairs = read_pairs_file(pairs_path, pairs_format)
    if not pairs:
        raise DataError(f"no word pairs found in {pairs_path}")
    logger.info("searching phrases for %d pairs (workers=%d)", len(pairs), config.workers)
    searched = find_phrases_many(index, pairs, lexicon, config.workers, config.min_gap, config.max_gap)
    stats = accumulate_stats(searched)
    patterns_before = stats.num_patterns
    stats = filter_patterns(stats, config.min_pair_freq)
    matrix = build_matrix(stats)
    transformed, weights = log_entropy_transform(matrix.raw)
    factors = truncated_svd(transformed, config.svd_rank)
    cosines = row_cosines(factors)
    conditionals = conditional_probabilities(matrix.raw)
    pert = pertinence_scores(conditionals, cosines)

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    _dump_phrases(searched, out / "phrases.tsv")
    dump_patterns(stats, out / "patterns.tsv")
    save_matrix(matrix, out)
    factors.save(out / "factors")
    cond_dir = out / "conditionals"
    cond_dir.mkdir(exist_ok=True)
    _dump_conditionals(conditionals, cond_dir)

    artifact_files = [
        out / "phrases.tsv", out / "patterns.tsv", out / "matrix.tsv", out / "rows.tsv",
        out / "cols.tsv", out / "factors" / "u.npy", out / "factors" / "s.npy",
        out / "factors" / "v.npy", cond_dir / "pattern_given_pair.tsv",
        cond_dir / "pair_given_pattern.tsv",
    ]
    manifest = {
        "format": MANIFEST_FORMAT,
        "version": MANIFEST_VERSION,
        "config": config.to_dict(),
        "pairs_file_format": pairs_format,
        "corpus": {
            "documents": index.num_documents,
            "tokens": index.num_tokens,
            "vocabulary": len(index.postings),
        },
        "pairs": {
            "input": len(pairs),
            "with_phrases": len(stats.pairs_with_phrases),
        },
        "patterns": {
            "before_filter": patterns_before,
            "after_filter": stats.num_patterns,
        },
        "matrix": {
            "rows": matrix.raw.shape[0],
            "cols": matrix.raw.shape[1],
            "nonzeros": int(matrix.raw.nnz),
            "density": matrix.density,
        },
        "svd": {"rank_requested": config.svd_rank, "rank_used": factors.k},
        "checksums": {str(p.relative_to(out)): _sha256(p) for p in artifact_files},
    }
    _write_json(manifest, out / "manifest.json")
    logger.info(
        "mined %d -> %d patterns, matrix %dx%d (density %.4f%%), k=%d",
        patterns_before, stats.num_patterns, matrix.raw.shape[0], matrix.raw.shape[1],
        100 * matrix.density, factors.k,
    )
    return MiningArtifacts(
        matrix=matrix,
        pattern_pair_freq=dict(stats.pair_freq),
        transformed=transformed,
        col_weights=weights,
        factors=factors,
        cosines=cosines,
        conditionals=conditionals,
        pertinence=pert,
        manifest=manifest,
    )


def load_artifacts(config: PipelineConfig) -> MiningArtifacts:
    """Reload a mined run. The raw matrix, factors, and pattern frequencies
    come from disk; derived views (transform, conditionals, pertinence) are
    recomputed, which is cheap and exactly reproducible."""
    out = config.out
    manifest_path = out / "manifest.json"
    if not manifest_path.is_file():
        raise DataError(f"no manifest at {manifest_path}; run the mine command first")
    with open(manifest_path, encoding="utf-8") as handle:
        manifest = json.load(handle)
    matrix = load_matrix(out)
    pattern_pair_freq = load_pattern_freqs(out / "patterns.tsv")
    transformed, weights = log_entropy_transform(matrix.raw)
    factors = SvdFactors.load(out / "factors")
    cosines = row_cosines(factors)
    conditionals = conditional_probabilities(matrix.raw)
    pert = pertinence_scores(conditionals, cosines)
    return MiningArtifacts(
        matrix=matrix,
        pattern_pair_freq=pattern_pair_freq,
        transformed=transformed,
        col_weights=weights,
        factors=factors,
        cosines=cosines,
        conditionals=conditionals,
        pertinence=pert,
        manifest=manifest,
    )


def ranked_lists_by_pair(artifacts: MiningArtifacts, ranker: Ranker, pairs,
                         seed: int = 0) -> dict[WordPair, dict | None]:
    """Ranked lists for each requested pair (None for pairs without rows)."""
    ctx = artifacts.scoring_context(seed)
    return {pair: ranked_lists_for_pair(ctx, ranker, pair) for pair in pairs}


def run_rank(config: PipelineConfig, pair: WordPair, out_path=None) -> Path:
    """Export one pair's two ranked lists under the configured ranker."""
    artifacts = load_artifacts(config)
    if config.ranker == "all":
        raise UsageError("the rank command needs a single ranker, not 'all'")
    ranker = get_ranker(config.ranker)
    lists = ranked_lists_by_pair(artifacts, ranker, [pair], config.seed)[pair]
    if lists is None:
        raise DataError(f"pair {pair} has no matrix rows (it never co-occurred in the corpus)")
    if out_path is None:
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in f"{pair.x}_{pair.y}")
        out_path = config.out / f"ranked_{safe}_{ranker.name}.tsv"
    write_ranked_lists([(pair, lists)], out_path)
    return Path(out_path)


def run_eval(config: PipelineConfig, task: str, data_path) -> list[EvalReport]:
    """Evaluate one ranker or the whole grid on a task file."""
    if task not in ("analogies", "nounmod"):
        raise UsageError(f"unknown eval task {task!r} (expected analogies or nounmod)")
    artifacts = load_artifacts(config)
    if task == "analogies":
        questions = parse_analogy_file(data_path)
        if not questions:
            raise DataError(f"no questions found in {data_path}")
        pairs = read_pairs_file(data_path, "analogies")
    else:
        items = parse_noun_modifier_file(data_path)
        if not items:
            raise DataError(f"no labeled pairs found in {data_path}")
        pairs = read_pairs_file(data_path, "nounmod")
    rankers = list(RANKERS) if config.ranker == "all" else [get_ranker(config.ranker)]
    reports = []
    for ranker in rankers:
        lists_by_pair = ranked_lists_by_pair(artifacts, ranker, pairs, config.seed)
        if task == "analogies":
            reports.append(evaluate_analogies(questions, lists_by_pair, ranker.name))
        else:
            reports.append(classify_noun_modifiers(items, lists_by_pair, ranker.name))
    config.out.mkdir(parents=True, exist_ok=True)
    _write_json([report.to_dict() for report in reports], config.out / f"eval-{task}.json")
    return reports
