"""Sparse pair-by-pattern matrix, log-entropy weighting, truncated SVD, cosines.

Rows come in forward/reversed twins per word pair; columns come in
original/mirrored twins per retained pattern template. The reversed row of
a pair holds the same frequencies with the two orders exchanged, so the
matrix satisfies raw[(p, rev), (T, orig)] == raw[(p, fwd), (T, mirrored)]
for every cell.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import svds

from .corpus import Orientation, WordPair
from .patterns import Pattern, PatternStats

logger = logging.getLogger(__name__)

DEFAULT_SVD_RANK = 300

# Dense SVD is exact and cheap below this size; above it we use the sparse
# iterative solver with a fixed starting vector for determinism.
_DENSE_SVD_MAX_DIM = 400

FACTORS_FORMAT = "relmine-factors"
FACTORS_VERSION = 1
MATRIX_FORMAT = "relmine-matrix"
MATRIX_VERSION = 1


class Direction(Enum):
    FORWARD = "fwd"
    REVERSED = "rev"


class RowMap:
    """Bijection between (pair, direction) and row index.

    Row 2i is pair i forward (X:Y), row 2i+1 the same pair reversed (Y:X),
    in the pairs' input order.
    """

    def __init__(self, pairs):
        self.pairs = tuple(pairs)
        self._index = {}
        for i, pair in enumerate(self.pairs):
            self._index[(pair, Direction.FORWARD)] = 2 * i
            self._index[(pair, Direction.REVERSED)] = 2 * i + 1

    def __len__(self) -> int:
        return 2 * len(self.pairs)

    def row_of(self, pair: WordPair, direction: Direction) -> int:
        return self._index[(pair, direction)]

    def get_row(self, pair: WordPair, direction: Direction):
        return self._index.get((pair, direction))

    def key_of(self, row: int) -> tuple[WordPair, Direction]:
        pair = self.pairs[row // 2]
        return pair, Direction.FORWARD if row % 2 == 0 else Direction.REVERSED

    def __contains__(self, pair: WordPair) -> bool:
        return (pair, Direction.FORWARD) in self._index


class ColMap:
    """Bijection between (canonical template, mirrored flag) and column index.

    Templates are sorted by serialization; column 2t is the original
    ("X ... Y") reading of template t and column 2t+1 the mirrored
    ("Y ... X") reading.
    """

    def __init__(self, templates):
        self.templates = tuple(sorted(templates, key=lambda p: p.text))
        self._index = {pattern: i for i, pattern in enumerate(self.templates)}

    def __len__(self) -> int:
        return 2 * len(self.templates)

    def col_of(self, template: Pattern, mirrored: bool) -> int:
        return 2 * self._index[template] + (1 if mirrored else 0)

    def key_of(self, col: int) -> tuple[Pattern, bool]:
        return self.templates[col // 2], col % 2 == 1

    def display_pattern(self, col: int) -> Pattern:
        """The pattern as seen from a forward row: original columns read
        X-first, mirrored columns read Y-first."""
        template, mirrored = self.key_of(col)
        return template.swapped() if mirrored else template

    def is_mirrored(self, col: int) -> bool:
        return col % 2 == 1


@dataclass
class PairPatternMatrix:
    raw: sparse.csr_matrix
    row_map: RowMap
    col_map: ColMap

    @property
    def density(self) -> float:
        rows, cols = self.raw.shape
        return self.raw.nnz / (rows * cols) if rows and cols else 0.0

    def zero_rows(self) -> np.ndarray:
        """Boolean mask of rows that lost every pattern to filtering."""
        return np.asarray(self.raw.sum(axis=1)).ravel() == 0


def build_matrix(stats: PatternStats) -> PairPatternMatrix:
    """Assemble the doubled/mirrored sparse frequency matrix from stats.

    Each f(pair, orientation, template) lands in two cells: the matching
    row/column reading for the forward row, and the exchanged reading for
    the reversed row.
    """
    if not stats.pattern_freq or not stats.pairs_with_phrases:
        raise ValueError(
            "no pair/pattern co-occurrences to build a matrix from "
            "(no pair co-occurred, or filtering removed every pattern)"
        )
    row_map = RowMap(stats.pairs_with_phrases)
    col_map = ColMap(stats.pair_freq.keys())
    rows, cols, values = [], [], []
    for (pair, orientation, template), f in stats.pattern_freq.items():
        mirrored = orientation is Orientation.Y_FIRST
        rows.append(row_map.row_of(pair, Direction.FORWARD))
        cols.append(col_map.col_of(template, mirrored))
        values.append(f)
        rows.append(row_map.row_of(pair, Direction.REVERSED))
        cols.append(col_map.col_of(template, not mirrored))
        values.append(f)
    raw = sparse.coo_matrix(
        (values, (rows, cols)), shape=(len(row_map), len(col_map)), dtype=np.int64
    ).tocsr()
    raw.sort_indices()
    matrix = PairPatternMatrix(raw, row_map, col_map)
    logger.info(
        "built %dx%d matrix, %d nonzeros, density %.4f%%",
        raw.shape[0], raw.shape[1], raw.nnz, 100.0 * matrix.density,
    )
    return matrix


def log_entropy_transform(raw: sparse.spmatrix) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Apply log and entropy weighting to a nonnegative count matrix.

    Each nonzero cell f becomes w_j * log(f + 1), where w_j = 1 - H_j/log(rows)
    and H_j is the entropy of column j's cell distribution. Concentrated
    columns keep full weight, uniform columns are zeroed out. Returns the
    transformed matrix (same sparsity structure) and the per-column weights.
    """
    csc = raw.tocsc().astype(np.float64)
    csc.sort_indices()
    n_rows, n_cols = csc.shape
    log_rows = math.log(n_rows) if n_rows > 1 else 0.0
    weights = np.zeros(n_cols)
    data = csc.data
    new_data = np.zeros_like(data)
    for j in range(n_cols):
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        if lo == hi:
            continue
        vals = data[lo:hi]
        probs = vals / vals.sum()
        entropy = float(-(probs * np.log(probs)).sum())
        w = 1.0 - entropy / log_rows if log_rows > 0.0 else 1.0
        w = max(w, 0.0)
        weights[j] = w
        new_data[lo:hi] = w * np.log1p(vals)
    transformed = sparse.csc_matrix((new_data, csc.indices.copy(), csc.indptr.copy()), shape=csc.shape)
    return transformed.tocsr(), weights


@dataclass
class SvdFactors:
    """Truncated factor triple: u (rows x k), s (k,) nonincreasing, v (cols x k)."""

    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    @property
    def k(self) -> int:
        return len(self.s)

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.s) @ self.v.T

    def save(self, directory) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        np.save(directory / "u.npy", self.u)
        np.save(directory / "s.npy", self.s)
        np.save(directory / "v.npy", self.v)
        meta = {
            "format": FACTORS_FORMAT,
            "version": FACTORS_VERSION,
            "k": self.k,
            "rows": int(self.u.shape[0]),
            "cols": int(self.v.shape[0]),
        }
        with open(directory / "meta.json", "w", encoding="utf-8") as handle:
            json.dump(meta, handle, sort_keys=True, separators=(",", ":"))
            handle.write("\n")

    @classmethod
    def load(cls, directory) -> "SvdFactors":
        directory = Path(directory)
        with open(directory / "meta.json", encoding="utf-8") as handle:
            meta = json.load(handle)
        if meta.get("format") != FACTORS_FORMAT or meta.get("version") != FACTORS_VERSION:
            raise ValueError(f"unsupported factors file in {directory}")
        return cls(
            np.load(directory / "u.npy"),
            np.load(directory / "s.npy"),
            np.load(directory / "v.npy"),
        )


def truncated_svd(matrix: sparse.spmatrix, k: int = DEFAULT_SVD_RANK) -> SvdFactors:
    """Top-k singular triple of a sparse matrix, singular values nonincreasing.

    k is clamped to min(rows, cols) with a warning when it exceeds the
    matrix dimensions, and trailing numerically-zero singular values are
    dropped so the effective k never exceeds the rank.
    """
    if matrix.nnz == 0:
        raise ValueError("cannot factor an all-zero matrix")
    if k < 1:
        raise ValueError(f"svd rank must be >= 1, got {k}")
    k_max = min(matrix.shape)
    if k > k_max:
        logger.warning("svd rank %d exceeds min(matrix dims) %d; clamping", k, k_max)
        k = k_max
    if k >= k_max or k_max <= _DENSE_SVD_MAX_DIM:
        u, s, vt = np.linalg.svd(np.asarray(matrix.todense(), dtype=np.float64), full_matrices=False)
        u, s, vt = u[:, :k], s[:k], vt[:k]
    else:
        # Fixed starting vector keeps the iterative solver reproducible.
        v0 = np.random.default_rng(2718281828).standard_normal(k_max)
        u, s, vt = svds(matrix.astype(np.float64), k=k, v0=v0)
        order = np.argsort(-s)
        u, s, vt = u[:, order], s[order], vt[order]
    if s[0] > 0:
        keep = int(np.sum(s > s[0] * 1e-12))
    else:
        keep = 1
    keep = max(keep, 1)
    return SvdFactors(np.ascontiguousarray(u[:, :keep]), s[:keep], np.ascontiguousarray(vt[:keep].T))


class RowCosines:
    """Pairwise cosine similarities between rows of u*s.

    Rows whose projected vector is numerically zero are defined to have
    similarity 0 against everything, themselves included.
    """

    def __init__(self, factors: SvdFactors):
        scaled = factors.u * factors.s
        norms = np.linalg.norm(scaled, axis=1)
        cutoff = norms.max() * 1e-12 if norms.size and norms.max() > 0 else 0.0
        nonzero = norms > cutoff
        safe = np.where(nonzero, norms, 1.0)
        self._unit = np.where(nonzero[:, None], scaled / safe[:, None], 0.0)
        self.zero_rows = ~nonzero

    @property
    def num_rows(self) -> int:
        return self._unit.shape[0]

    def unit_rows(self) -> np.ndarray:
        """Unit-normalized row vectors (zero rows stay zero); cosines are dots."""
        return self._unit

    def sim(self, a: int, b: int) -> float:
        n = self.num_rows
        if not (0 <= a < n and 0 <= b < n):
            raise IndexError(f"row index out of range: sim({a}, {b}) on {n} rows")
        value = float(self._unit[a] @ self._unit[b])
        return min(1.0, max(-1.0, value))


def row_cosines(factors: SvdFactors) -> RowCosines:
    return RowCosines(factors)


def save_matrix(matrix: PairPatternMatrix, directory) -> None:
    """Persist the raw matrix as coordinate TSV plus row/column map sidecars."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    coo = matrix.raw.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(directory / "matrix.tsv", "w", encoding="utf-8") as handle:
        handle.write(f"# {MATRIX_FORMAT} v{MATRIX_VERSION} rows={coo.shape[0]} cols={coo.shape[1]}\n")
        for i in order:
            handle.write(f"{coo.row[i]}\t{coo.col[i]}\t{coo.data[i]}\n")
    with open(directory / "rows.tsv", "w", encoding="utf-8") as handle:
        for row in range(len(matrix.row_map)):
            pair, direction = matrix.row_map.key_of(row)
            handle.write(f"{row}\t{pair.x}\t{pair.y}\t{direction.value}\n")
    with open(directory / "cols.tsv", "w", encoding="utf-8") as handle:
        for col in range(len(matrix.col_map)):
            template, mirrored = matrix.col_map.key_of(col)
            flag = "mirrored" if mirrored else "original"
            handle.write(f"{col}\t{template.text}\t{flag}\n")


def load_matrix(directory) -> PairPatternMatrix:
    directory = Path(directory)
    pairs = []
    with open(directory / "rows.tsv", encoding="utf-8") as handle:
        for line in handle:
            row, x, y, direction = line.rstrip("\n").split("\t")
            if direction == Direction.FORWARD.value:
                pairs.append(WordPair(x, y))
    templates = []
    with open(directory / "cols.tsv", encoding="utf-8") as handle:
        for line in handle:
            _col, text, flag = line.rstrip("\n").split("\t")
            if flag == "original":
                templates.append(Pattern.parse(text))
    row_map = RowMap(pairs)
    col_map = ColMap(templates)
    rows, cols, values = [], [], []
    with open(directory / "matrix.tsv", encoding="utf-8") as handle:
        header = handle.readline()
        if not header.startswith(f"# {MATRIX_FORMAT} v{MATRIX_VERSION}"):
            raise ValueError(f"unsupported matrix file in {directory}")
        for line in handle:
            r, c, v = line.split("\t")
            rows.append(int(r))
            cols.append(int(c))
            values.append(int(v))
    raw = sparse.coo_matrix(
        (values, (rows, cols)), shape=(len(row_map), len(col_map)), dtype=np.int64
    ).tocsr()
    raw.sort_indices()
    return PairPatternMatrix(raw, row_map, col_map)
