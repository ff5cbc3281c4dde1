"""Pertinence scoring and the full grid of pattern rankers.

The pertinence of a pattern for a word pair is the expected relational
similarity between that pair and a pair drawn from the pattern's smoothed
conditional distribution p(pair | pattern): patterns whose typical pairs
cluster around the given pair score high, ambiguous patterns score low.
Conditionals come from the raw frequency matrix (before log/entropy);
similarities are row cosines in the truncated SVD space.

Alongside pertinence, this module implements every comparison ranker:
cells of the log-entropy and rank-k reconstructed matrices, the bare
conditional probability, a seeded random ranker, and the tf-idf family
(tf in {f, log(f+1), 1, 0.5+0.5*f/F, 1/f} crossed with idf in
{log(N/n), log((N-n)/n), 1/n, 1}).
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse

from .corpus import Orientation, WordPair
from .matrix import ColMap, Direction, RowCosines, RowMap, SvdFactors
from .patterns import Pattern


@dataclass
class ConditionalTable:
    """Row- and column-normalized conditional probabilities over raw nonzeros.

    `pattern_given_pair[i, j]` is p(P_j | pair_i) = f_ij / row_sum(i);
    `pair_given_pattern[i, j]` is the Bayes-smoothed p(pair_i | P_j) with a
    uniform prior over pairs, i.e. p(P_j | pair_i) normalized per column.
    Both share the raw matrix's sparsity structure exactly.
    """

    pattern_given_pair: sparse.csr_matrix
    pair_given_pattern: sparse.csr_matrix


def conditional_probabilities(raw: sparse.spmatrix) -> ConditionalTable:
    csr = raw.tocsr().astype(np.float64)
    csr.sort_indices()
    row_sums = np.asarray(csr.sum(axis=1)).ravel()
    per_nnz_rows = np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))
    pgp_data = csr.data / row_sums[per_nnz_rows]
    pattern_given_pair = sparse.csr_matrix((pgp_data, csr.indices.copy(), csr.indptr.copy()), shape=csr.shape)
    col_sums = np.bincount(csr.indices, weights=pgp_data, minlength=csr.shape[1])
    pair_given_pattern = sparse.csr_matrix(
        (pgp_data / col_sums[csr.indices], csr.indices.copy(), csr.indptr.copy()), shape=csr.shape
    )
    return ConditionalTable(pattern_given_pair, pair_given_pattern)


def pertinence_from_units(conditionals: ConditionalTable, unit_rows: np.ndarray) -> sparse.csr_matrix:
    """Pertinence at every observed cell, given unit row vectors whose dot
    products are the relational similarities.

    pertinence(i, j) = sum_k p(k | P_j) * sim(i, k), computed only where
    p(i | P_j) > 0. Per column this is one weighted centroid of the
    support's unit rows followed by dot products against them.
    """
    csc = conditionals.pair_given_pattern.tocsc()
    csc.sort_indices()
    out = np.zeros_like(csc.data)
    for j in range(csc.shape[1]):
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        if lo == hi:
            continue
        support = csc.indices[lo:hi]
        centroid = csc.data[lo:hi] @ unit_rows[support]
        out[lo:hi] = unit_rows[support] @ centroid
    np.clip(out, -1.0, 1.0, out=out)
    result = sparse.csc_matrix((out, csc.indices.copy(), csc.indptr.copy()), shape=csc.shape).tocsr()
    result.sort_indices()
    return result


def pertinence_scores(conditionals: ConditionalTable, cosines: RowCosines) -> sparse.csr_matrix:
    return pertinence_from_units(conditionals, cosines.unit_rows())


class RankerKind(Enum):
    PERTINENCE = "pertinence"
    LOG_ENTROPY_CELL = "log-entropy-cell"
    TF_IDF = "tf-idf"
    COND_PROB = "cond-prob"
    SVD_CELL = "svd-cell"
    RANDOM = "random"


class TfVariant(Enum):
    RAW = "f"
    LOG = "log(f+1)"
    ONE = "1.0"
    AUGMENTED = "0.5+0.5*(f/F)"
    INVERSE = "1/f"


class IdfVariant(Enum):
    LOG_RATIO = "log(N/n)"
    LOG_DIFF = "log((N-n)/n)"
    INVERSE = "1/n"
    ONE = "1.0"


@dataclass(frozen=True)
class Ranker:
    name: str
    kind: RankerKind
    tf: TfVariant | None = None
    idf: IdfVariant | None = None

    @property
    def label(self) -> str:
        if self.kind is RankerKind.TF_IDF:
            return f"TF = {self.tf.value}, IDF = {self.idf.value}"
        return {
            RankerKind.PERTINENCE: "pertinence",
            RankerKind.LOG_ENTROPY_CELL: "log and entropy matrix cell",
            RankerKind.COND_PROB: "p(pair|pattern)",
            RankerKind.SVD_CELL: "rank-k reconstructed matrix cell",
            RankerKind.RANDOM: "random",
        }[self.kind]


def _tfidf(name, tf, idf) -> Ranker:
    return Ranker(name, RankerKind.TF_IDF, tf, idf)


# The comparison grid, in its canonical reporting order: pertinence first,
# then the intermediate-matrix and tf-idf baselines.
RANKERS: tuple[Ranker, ...] = (
    Ranker("pertinence", RankerKind.PERTINENCE),
    Ranker("logentropy", RankerKind.LOG_ENTROPY_CELL),
    _tfidf("tfidf-f-pidf", TfVariant.RAW, IdfVariant.LOG_DIFF),
    _tfidf("tfidf-logf-idf", TfVariant.LOG, IdfVariant.LOG_RATIO),
    _tfidf("tfidf-f-idf", TfVariant.RAW, IdfVariant.LOG_RATIO),
    _tfidf("tfidf-logf-pidf", TfVariant.LOG, IdfVariant.LOG_DIFF),
    _tfidf("tfidf-one-invn", TfVariant.ONE, IdfVariant.INVERSE),
    _tfidf("tfidf-f-invn", TfVariant.RAW, IdfVariant.INVERSE),
    _tfidf("tfidf-aug-idf", TfVariant.AUGMENTED, IdfVariant.LOG_RATIO),
    _tfidf("tfidf-logf-invn", TfVariant.LOG, IdfVariant.INVERSE),
    Ranker("condprob", RankerKind.COND_PROB),
    Ranker("svd", RankerKind.SVD_CELL),
    Ranker("random", RankerKind.RANDOM),
    _tfidf("invtf", TfVariant.INVERSE, IdfVariant.ONE),
    _tfidf("rawtf", TfVariant.RAW, IdfVariant.ONE),
)

RANKER_BY_NAME = {ranker.name: ranker for ranker in RANKERS}


def get_ranker(name: str) -> Ranker:
    try:
        return RANKER_BY_NAME[name]
    except KeyError:
        known = ", ".join(sorted(RANKER_BY_NAME))
        raise ValueError(f"unknown ranker {name!r} (known: {known})") from None


@dataclass
class ScoringContext:
    """Everything the rankers need, bundled once per mined pair set."""

    raw: sparse.csr_matrix
    transformed: sparse.csr_matrix
    factors: SvdFactors
    conditionals: ConditionalTable
    pertinence: sparse.csr_matrix
    row_map: RowMap
    col_map: ColMap
    pattern_pair_freq: dict[Pattern, int]
    seed: int = 0

    def __post_init__(self):
        self.n_pairs_total = self.raw.shape[0]
        self.row_max_f = np.asarray(self.raw.max(axis=1).todense(), dtype=np.float64).ravel()


def _random_cell_score(seed: int, row: int, col: int) -> float:
    digest = hashlib.blake2b(f"{seed}:{row}:{col}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") / 2.0**64


def _tf_value(variant: TfVariant, f: float, row_max: float) -> float:
    if variant is TfVariant.RAW:
        return f
    if variant is TfVariant.LOG:
        return math.log(f + 1.0)
    if variant is TfVariant.ONE:
        return 1.0
    if variant is TfVariant.AUGMENTED:
        return 0.5 + 0.5 * (f / row_max)
    return 1.0 / f


def _idf_value(variant: IdfVariant, n: int, total: int) -> float | None:
    """None marks a math-domain exclusion (the pattern leaves this ranker's list)."""
    if variant is IdfVariant.LOG_RATIO:
        return math.log(total / n)
    if variant is IdfVariant.LOG_DIFF:
        if total - n <= 0:
            return None
        return math.log((total - n) / n)
    if variant is IdfVariant.INVERSE:
        return 1.0 / n
    return 1.0


def scores_for_row(ctx: ScoringContext, ranker: Ranker, row: int) -> dict[int, float]:
    """Score every pattern observed with this row under the given ranker.

    The candidate set is identical for all rankers: the columns where the
    raw frequency is nonzero. Only math-domain exclusions (e.g. log 0 in
    the (N-n)/n idf) remove a column for a particular ranker.
    """
    lo, hi = ctx.raw.indptr[row], ctx.raw.indptr[row + 1]
    cols = ctx.raw.indices[lo:hi]
    if ranker.kind is RankerKind.PERTINENCE:
        return dict(zip(cols.tolist(), ctx.pertinence.data[lo:hi].tolist()))
    if ranker.kind is RankerKind.LOG_ENTROPY_CELL:
        return dict(zip(cols.tolist(), ctx.transformed.data[lo:hi].tolist()))
    if ranker.kind is RankerKind.COND_PROB:
        return dict(zip(cols.tolist(), ctx.conditionals.pair_given_pattern.data[lo:hi].tolist()))
    if ranker.kind is RankerKind.SVD_CELL:
        row_vec = ctx.factors.u[row] * ctx.factors.s
        values = ctx.factors.v[cols] @ row_vec
        return dict(zip(cols.tolist(), values.tolist()))
    if ranker.kind is RankerKind.RANDOM:
        return {int(c): _random_cell_score(ctx.seed, row, int(c)) for c in cols}
    scores: dict[int, float] = {}
    f_values = ctx.raw.data[lo:hi]
    row_max = float(ctx.row_max_f[row])
    for col, f in zip(cols.tolist(), f_values.tolist()):
        template, _ = ctx.col_map.key_of(col)
        n = ctx.pattern_pair_freq[template]
        idf = _idf_value(ranker.idf, n, ctx.n_pairs_total)
        if idf is None:
            continue
        scores[col] = _tf_value(ranker.tf, float(f), row_max) * idf
    return scores


@dataclass(frozen=True)
class RankedEntry:
    rank: int
    score: float
    pattern: Pattern
    column: int


@dataclass
class RankedPatternList:
    pair: WordPair
    direction: Direction
    orientation: Orientation
    entries: tuple[RankedEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    def rank_by_column(self) -> dict[int, int]:
        return {entry.column: entry.rank for entry in self.entries}


def assemble_ranked_lists(ctx: ScoringContext, row: int,
                          scores: dict[int, float]) -> dict[Orientation, RankedPatternList]:
    """Split scored columns into the two orientation lists and rank them.

    Original columns read X-first from any row, mirrored columns Y-first.
    Sorting is by decreasing score with ties broken by ascending pattern
    serialization, so reruns are reproducible.
    """
    pair, direction = ctx.row_map.key_of(row)
    buckets: dict[Orientation, list[tuple[float, str, int, Pattern]]] = {
        Orientation.X_FIRST: [],
        Orientation.Y_FIRST: [],
    }
    for col, score in scores.items():
        pattern = ctx.col_map.display_pattern(col)
        orientation = Orientation.Y_FIRST if ctx.col_map.is_mirrored(col) else Orientation.X_FIRST
        buckets[orientation].append((score, pattern.text, col, pattern))
    lists = {}
    for orientation, items in buckets.items():
        items.sort(key=lambda item: (-item[0], item[1]))
        entries = tuple(
            RankedEntry(rank, score, pattern, col)
            for rank, (score, _text, col, pattern) in enumerate(items, start=1)
        )
        lists[orientation] = RankedPatternList(pair, direction, orientation, entries)
    return lists


def ranked_lists_for_row(ctx: ScoringContext, ranker: Ranker,
                         row: int) -> dict[Orientation, RankedPatternList]:
    return assemble_ranked_lists(ctx, row, scores_for_row(ctx, ranker, row))


def ranked_lists_for_pair(ctx: ScoringContext, ranker: Ranker,
                          pair: WordPair) -> dict[Orientation, RankedPatternList] | None:
    """The pair's two ranked lists (from its forward row), or None if the
    pair never co-occurred and has no rows."""
    row = ctx.row_map.get_row(pair, Direction.FORWARD)
    if row is None:
        return None
    return ranked_lists_for_row(ctx, ranker, row)


def write_ranked_lists(lists_by_pair, path) -> None:
    """Export ranked lists as TSV: pair, direction, orientation, rank, score, pattern."""
    with open(path, "w", encoding="utf-8") as handle:
        for pair, lists in lists_by_pair:
            if lists is None:
                continue
            for orientation in (Orientation.X_FIRST, Orientation.Y_FIRST):
                ranked = lists[orientation]
                for entry in ranked.entries:
                    handle.write(
                        f"{pair}\t{ranked.direction.value}\t{orientation.value}"
                        f"\t{entry.rank}\t{entry.score:.12g}\t{entry.pattern.text}\n"
                    )
