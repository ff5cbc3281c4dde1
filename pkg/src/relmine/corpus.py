"""Corpus ingestion, positional indexing, and windowed pair-phrase search.

A corpus is a sequence of tokenized documents. The positional index maps
each token to the sorted list of (document id, position) slots where it
occurs, and keeps the documents themselves so that matched windows can be
read back out. Phrase search finds, for a word pair, every window in which
one member's surface forms and the other's are separated by one to three
intervening tokens, in both orders.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from collections import Counter, defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

MIN_GAP = 1
MAX_GAP = 3

INDEX_FORMAT = "relmine-index"
INDEX_VERSION = 1


class Orientation(Enum):
    """Which pair member comes first in a phrase or pattern."""

    X_FIRST = "XY"
    Y_FIRST = "YX"

    def flipped(self) -> "Orientation":
        return Orientation.Y_FIRST if self is Orientation.X_FIRST else Orientation.X_FIRST


@dataclass(frozen=True, order=True)
class WordPair:
    x: str
    y: str

    def reversed(self) -> "WordPair":
        return WordPair(self.y, self.x)

    def __str__(self) -> str:
        return f"{self.x}:{self.y}"


@dataclass(frozen=True)
class Document:
    doc_id: int
    tokens: tuple[str, ...]


def tokenize(text: str) -> list[str]:
    """Lowercase and split on whitespace, trimming non-alphanumeric edges.

    Internal punctuation (apostrophes, hyphens, ...) is preserved; chunks
    that are left empty after trimming are dropped.
    """
    tokens = []
    for chunk in text.lower().split():
        start, end = 0, len(chunk)
        while start < end and not chunk[start].isalnum():
            start += 1
        while end > start and not chunk[end - 1].isalnum():
            end -= 1
        if end > start:
            tokens.append(chunk[start:end])
    return tokens


class NounLexicon:
    """Set of lowercase noun lemmas used to guess whether a word is a noun."""

    def __init__(self, nouns=()):
        self.nouns = frozenset(w.lower() for w in nouns)

    @classmethod
    def from_file(cls, path) -> "NounLexicon":
        """Load one lemma per line, UTF-8; blank lines are skipped."""
        words = []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                word = line.strip().lower()
                if word:
                    words.append(word)
        return cls(words)

    def __contains__(self, word: str) -> bool:
        return word in self.nouns

    def __len__(self) -> int:
        return len(self.nouns)


class PositionalIndex:
    """Immutable positional index over a tokenized corpus.

    Postings are strictly sorted (doc id, position) lists. The documents
    themselves are retained; postings are derived data, so persistence
    stores only the documents and rebuilds postings on load.
    """

    def __init__(self, documents: dict[int, tuple[str, ...]]):
        self.documents = documents
        postings: dict[str, list[tuple[int, int]]] = defaultdict(list)
        for doc_id in sorted(documents):
            for pos, token in enumerate(documents[doc_id]):
                postings[token].append((doc_id, pos))
        self.postings = dict(postings)
        self._sorted_vocab = sorted(self.postings)

    @property
    def vocabulary(self) -> set[str]:
        return set(self.postings)

    def __contains__(self, token: str) -> bool:
        return token in self.postings

    def tokens_with_prefix(self, prefix: str) -> list[str]:
        """All vocabulary tokens starting with `prefix`, sorted."""
        out = []
        start = bisect_left(self._sorted_vocab, prefix)
        for i in range(start, len(self._sorted_vocab)):
            token = self._sorted_vocab[i]
            if not token.startswith(prefix):
                break
            out.append(token)
        return out

    @property
    def num_documents(self) -> int:
        return len(self.documents)

    @property
    def num_tokens(self) -> int:
        return sum(len(tokens) for tokens in self.documents.values())

    def save(self, path) -> None:
        """Write the index as versioned JSON (documents only, postings derived)."""
        payload = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "documents": [[doc_id, list(self.documents[doc_id])] for doc_id in sorted(self.documents)],
        }
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, ensure_ascii=False, separators=(",", ":"))
            handle.write("\n")

    @classmethod
    def load(cls, path) -> "PositionalIndex":
        with open(path, encoding="utf-8") as handle:
            payload = json.load(handle)
        if payload.get("format") != INDEX_FORMAT:
            raise ValueError(f"not a {INDEX_FORMAT} file: {path}")
        if payload.get("version") != INDEX_VERSION:
            raise ValueError(f"unsupported index version {payload.get('version')!r} in {path}")
        documents = {int(doc_id): tuple(tokens) for doc_id, tokens in payload["documents"]}
        return cls(documents)


def build_index(documents) -> PositionalIndex:
    """Build a positional index; duplicate document ids are rejected."""
    table: dict[int, tuple[str, ...]] = {}
    for doc in documents:
        if doc.doc_id in table:
            raise ValueError(f"duplicate document id: {doc.doc_id}")
        if not doc.tokens:
            raise ValueError(f"document {doc.doc_id} has no tokens")
        for token in doc.tokens:
            if not token or any(c.isspace() for c in token):
                raise ValueError(f"document {doc.doc_id} contains an invalid token: {token!r}")
        table[doc.doc_id] = tuple(doc.tokens)
    return PositionalIndex(table)


def load_corpus_dir(path) -> list[Document]:
    """One document per UTF-8 file in `path`, ordered by file name.

    Files that tokenize to nothing are skipped.
    """
    root = Path(path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {path}")
    documents = []
    for file_path in sorted(p for p in root.iterdir() if p.is_file()):
        tokens = tokenize(file_path.read_text(encoding="utf-8"))
        if tokens:
            documents.append(Document(len(documents), tuple(tokens)))
    return documents


def load_corpus_lines(path) -> list[Document]:
    """One document per non-empty line of a single UTF-8 file."""
    file_path = Path(path)
    if not file_path.is_file():
        raise FileNotFoundError(f"corpus file not found: {path}")
    documents = []
    with open(file_path, encoding="utf-8") as handle:
        for line in handle:
            tokens = tokenize(line)
            if tokens:
                documents.append(Document(len(documents), tuple(tokens)))
    return documents


def is_likely_noun(word: str, lexicon: NounLexicon) -> bool:
    """True iff the word, or the word with a plural -s/-es removed, is in the lexicon."""
    if word in lexicon:
        return True
    if word.endswith("es") and word[:-2] in lexicon:
        return True
    if word.endswith("s") and word[:-1] in lexicon:
        return True
    return False


def expand_word_forms(word: str, noun: bool, index: PositionalIndex) -> set[str]:
    """Surface forms of `word` admitted as matches, intersected with the vocabulary.

    Nouns vary only in pluralization: the word itself, +s, +es, and the word
    with a trailing -s/-es removed. Other words match liberally by prefix on
    a stem of length max(4, len-2).
    """
    if noun:
        candidates = {word, word + "s", word + "es"}
        if word.endswith("es"):
            candidates.add(word[:-2])
        if word.endswith("s"):
            candidates.add(word[:-1])
        return {form for form in candidates if form and form in index}
    stem = word[: max(4, len(word) - 2)]
    return set(index.tokens_with_prefix(stem))


@dataclass(frozen=True)
class Phrase:
    """A deduplicated surface window: first token, 1-3 intervening tokens, last token."""

    pair: WordPair
    orientation: Orientation
    first: str
    intervening: tuple[str, ...]
    last: str
    count: int

    def __post_init__(self):
        if not MIN_GAP <= len(self.intervening) <= MAX_GAP:
            raise ValueError(f"phrase gap must be {MIN_GAP}..{MAX_GAP}, got {len(self.intervening)}")
        if self.count < 1:
            raise ValueError("phrase occurrence count must be positive")

    @property
    def surface(self) -> tuple[str, ...]:
        return (self.first,) + self.intervening + (self.last,)


def _positions_by_doc(index: PositionalIndex, forms) -> dict[int, list[int]]:
    by_doc: dict[int, list[int]] = defaultdict(list)
    for form in sorted(forms):
        for doc_id, pos in index.postings.get(form, ()):
            by_doc[doc_id].append(pos)
    for positions in by_doc.values():
        positions.sort()
    return by_doc


def _scan_windows(index, pair, orientation, first_forms, last_forms,
                  exclude_same_surface, min_gap, max_gap) -> list[Phrase]:
    if not first_forms or not last_forms:
        return []
    first_pos = _positions_by_doc(index, first_forms)
    last_pos = _positions_by_doc(index, last_forms)
    counts: Counter[tuple] = Counter()
    for doc_id in sorted(first_pos.keys() & last_pos.keys()):
        tokens = index.documents[doc_id]
        lasts = last_pos[doc_id]
        for p1 in first_pos[doc_id]:
            lo = bisect_left(lasts, p1 + min_gap + 1)
            hi = bisect_right(lasts, p1 + max_gap + 1)
            for p2 in lasts[lo:hi]:
                if exclude_same_surface and tokens[p1] == tokens[p2]:
                    continue
                counts[(tokens[p1], tuple(tokens[p1 + 1:p2]), tokens[p2])] += 1
    return [
        Phrase(pair, orientation, first, mid, last, n)
        for (first, mid, last), n in sorted(counts.items())
    ]


def find_phrases(index: PositionalIndex, pair: WordPair, lexicon: NounLexicon,
                 min_gap: int = MIN_GAP, max_gap: int = MAX_GAP) -> tuple[list[Phrase], list[Phrase]]:
    """Find all co-occurrence windows of a pair, one phrase list per order.

    Returns (x_first, y_first) lists, each sorted by surface form with
    occurrence counts aggregated over all (document, start) matches. When
    the two members' admitted form sets overlap, a window can legitimately
    satisfy both orders and then appears in both lists. For an identical
    pair (x == y), windows whose matched endpoints are the same surface
    token are excluded.
    """
    x_forms = expand_word_forms(pair.x, is_likely_noun(pair.x, lexicon), index)
    y_forms = expand_word_forms(pair.y, is_likely_noun(pair.y, lexicon), index)
    same = pair.x == pair.y
    x_first = _scan_windows(index, pair, Orientation.X_FIRST, x_forms, y_forms, same, min_gap, max_gap)
    y_first = _scan_windows(index, pair, Orientation.Y_FIRST, y_forms, x_forms, same, min_gap, max_gap)
    return x_first, y_first
