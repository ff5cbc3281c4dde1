"""Wildcard pattern generation and frequency bookkeeping.

Every phrase yields 2^m patterns for m intervening tokens: each middle
token is either kept literally or replaced by a single-token wildcard,
while the endpoints become X/Y markers bound to the pair's members.

Two frequencies drive everything downstream. Pattern frequency f is local:
how often a pattern was generated for one pair in one order, weighted by
phrase occurrence counts. Pair frequency n is global: how many of the
2-per-pair phrase lists contain the pattern at all. Both are keyed by the
canonical (X-first) template, so "Y such as the X" and "X such as the Y"
are the same pattern observed in opposite orders.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .corpus import Orientation, Phrase, WordPair

X_SLOT = "X"
Y_SLOT = "Y"
WILDCARD = "*"

DEFAULT_MIN_PAIR_FREQ = 10


@dataclass(frozen=True, order=True)
class Pattern:
    """A slot sequence: X/Y markers at the ends, literals or wildcards between.

    Corpus tokens are lowercase and never bare "X", "Y", or "*", so the
    single-space serialization is unambiguous and doubles as identity.
    """

    slots: tuple[str, ...]

    def __post_init__(self):
        if len(self.slots) < 3:
            raise ValueError("pattern needs at least one middle slot")
        ends = {self.slots[0], self.slots[-1]}
        if ends != {X_SLOT, Y_SLOT}:
            raise ValueError(f"pattern must be delimited by X and Y markers: {self.slots}")

    @property
    def orientation(self) -> Orientation:
        return Orientation.X_FIRST if self.slots[0] == X_SLOT else Orientation.Y_FIRST

    @property
    def num_middle(self) -> int:
        return len(self.slots) - 2

    def swapped(self) -> "Pattern":
        """The same template with X and Y markers exchanged."""
        swap = {X_SLOT: Y_SLOT, Y_SLOT: X_SLOT}
        return Pattern(tuple(swap.get(slot, slot) for slot in self.slots))

    def canonical(self) -> "Pattern":
        """X-first form; identity for patterns already in that order."""
        return self if self.orientation is Orientation.X_FIRST else self.swapped()

    @property
    def text(self) -> str:
        return " ".join(self.slots)

    @classmethod
    def parse(cls, text: str) -> "Pattern":
        return cls(tuple(text.split(" ")))

    def __str__(self) -> str:
        return self.text


def generate_patterns(phrase: Phrase) -> set[Pattern]:
    """All 2^m keep-or-wildcard combinations of a phrase's middle tokens.

    The endpoint markers follow the phrase's order: an X-first phrase gives
    "X ... Y" patterns, a Y-first phrase gives "Y ... X" patterns.
    """
    if phrase.orientation is Orientation.X_FIRST:
        first_marker, last_marker = X_SLOT, Y_SLOT
    else:
        first_marker, last_marker = Y_SLOT, X_SLOT
    middle = phrase.intervening
    out = set()
    for mask in range(2 ** len(middle)):
        slots = [first_marker]
        for i, token in enumerate(middle):
            slots.append(WILDCARD if mask >> i & 1 else token)
        slots.append(last_marker)
        out.add(Pattern(tuple(slots)))
    return out


@dataclass
class PatternStats:
    """Pattern frequency f and pair frequency n over a set of searched pairs.

    `pattern_freq` maps (pair, orientation, canonical template) to the
    occurrence-weighted generation count; `pair_freq` maps each template to
    the number of those (pair, orientation) lists containing it. Pairs that
    produced at least one phrase are recorded so matrix rows survive even
    if filtering later removes all their patterns.
    """

    pattern_freq: dict[tuple[WordPair, Orientation, Pattern], int] = field(default_factory=dict)
    pair_freq: dict[Pattern, int] = field(default_factory=dict)
    pairs_with_phrases: tuple[WordPair, ...] = ()

    @property
    def num_patterns(self) -> int:
        return len(self.pair_freq)


def accumulate_stats(searched) -> PatternStats:
    """Tally pattern and pair frequencies from per-pair phrase lists.

    `searched` is a sequence of (pair, x_first_phrases, y_first_phrases)
    triples as produced by phrase search. Each phrase contributes its
    occurrence count to f for every pattern it generates; n counts the
    lists in which each template shows up at all.
    """
    freq: Counter = Counter()
    pairs_kept = []
    for pair, x_first, y_first in searched:
        if x_first or y_first:
            pairs_kept.append(pair)
        for orientation, phrases in ((Orientation.X_FIRST, x_first), (Orientation.Y_FIRST, y_first)):
            for phrase in phrases:
                for pattern in generate_patterns(phrase):
                    freq[(pair, orientation, pattern.canonical())] += phrase.count
    pair_freq = Counter(template for (_, _, template) in freq)
    return PatternStats(dict(freq), dict(pair_freq), tuple(pairs_kept))


def filter_patterns(stats: PatternStats, min_pair_freq: int = DEFAULT_MIN_PAIR_FREQ) -> PatternStats:
    """Drop every pattern whose pair frequency is below the threshold."""
    if min_pair_freq < 1:
        raise ValueError(f"min pair frequency must be >= 1, got {min_pair_freq}")
    kept = {p: n for p, n in stats.pair_freq.items() if n >= min_pair_freq}
    freq = {key: f for key, f in stats.pattern_freq.items() if key[2] in kept}
    return PatternStats(freq, kept, stats.pairs_with_phrases)


def dump_patterns(stats: PatternStats, path) -> None:
    """Write the retained patterns as TSV: pattern, orientation, pair frequency."""
    with open(path, "w", encoding="utf-8") as handle:
        for pattern in sorted(stats.pair_freq, key=lambda p: p.text):
            handle.write(f"{pattern.text}\t{pattern.orientation.value}\t{stats.pair_freq[pattern]}\n")


def load_pattern_freqs(path) -> dict[Pattern, int]:
    """Read a pattern dump back into a template -> pair frequency map."""
    out: dict[Pattern, int] = {}
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            text, _orientation, n = line.rstrip("\n").split("\t")
            out[Pattern.parse(text)] = int(n)
    return out
