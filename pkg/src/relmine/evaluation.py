"""Evaluation harnesses: multiple-choice analogies and noun-modifier classes.

Analogy questions are answered by intersecting the stem's ranked pattern
lists with each choice's, orientation against like orientation; a shared
pattern scores the average of its two 1-based ranks, lower is better, and
the guess is the choice holding the lowest-scoring shared pattern.
Noun-modifier pairs are classified by a single nearest neighbour under
leave-one-out cross-validation, with the same average-rank score as the
distance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Orientation, WordPair
from .patterns import Pattern
from .pertinence import RankedPatternList

NOUN_MODIFIER_CLASSES = ("causality", "participant", "quality", "spatial", "temporality")


class DataError(Exception):
    """Malformed task or input data file."""


@dataclass(frozen=True)
class AnalogyQuestion:
    stem: WordPair
    choices: tuple[WordPair, ...]
    answer: int

    def __post_init__(self):
        if len(self.choices) != 5:
            raise ValueError(f"analogy question needs exactly 5 choices, got {len(self.choices)}")
        if not 0 <= self.answer < 5:
            raise ValueError(f"answer index out of range: {self.answer}")


@dataclass(frozen=True)
class LabeledNounModifier:
    modifier: str
    head: str
    label: str

    def __post_init__(self):
        if self.label not in NOUN_MODIFIER_CLASSES:
            raise ValueError(f"unknown noun-modifier class: {self.label}")

    @property
    def pair(self) -> WordPair:
        return WordPair(self.modifier, self.head)


def _parse_pair_line(line: str, path, lineno: int) -> WordPair:
    words = line.split()
    if len(words) != 2:
        raise DataError(f"{path}:{lineno}: expected two words, got {line!r}")
    return WordPair(words[0].lower(), words[1].lower())


def parse_analogy_file(path) -> list[AnalogyQuestion]:
    """Parse blank-line-separated blocks: stem, five choices, "answer: k".

    The answer may be an index 0-4 or a letter a-e.
    """
    questions = []
    block: list[tuple[int, str]] = []
    with open(path, encoding="utf-8") as handle:
        lines = list(enumerate(handle, start=1))
    lines.append((len(lines) + 1, ""))
    for lineno, raw_line in lines:
        line = raw_line.strip()
        if line:
            block.append((lineno, line))
            continue
        if not block:
            continue
        if len(block) != 7:
            raise DataError(
                f"{path}:{block[0][0]}: question block needs 7 lines "
                f"(stem, 5 choices, answer), got {len(block)}"
            )
        stem = _parse_pair_line(block[0][1], path, block[0][0])
        choices = tuple(_parse_pair_line(text, path, ln) for ln, text in block[1:6])
        ans_lineno, ans_line = block[6]
        if not ans_line.lower().startswith("answer:"):
            raise DataError(f"{path}:{ans_lineno}: expected 'answer: <k>', got {ans_line!r}")
        token = ans_line.split(":", 1)[1].strip().lower()
        if token in "abcde" and len(token) == 1:
            answer = ord(token) - ord("a")
        else:
            try:
                answer = int(token)
            except ValueError:
                raise DataError(f"{path}:{ans_lineno}: bad answer {token!r}") from None
        if not 0 <= answer < 5:
            raise DataError(f"{path}:{ans_lineno}: answer index out of range: {answer}")
        questions.append(AnalogyQuestion(stem, choices, answer))
        block = []
    return questions


def parse_noun_modifier_file(path) -> list[LabeledNounModifier]:
    """Parse tab-separated lines: modifier, head, class label."""
    items = []
    with open(path, encoding="utf-8") as handle:
        for lineno, raw_line in enumerate(handle, start=1):
            line = raw_line.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split("\t")
            if len(fields) != 3:
                raise DataError(f"{path}:{lineno}: expected modifier<TAB>head<TAB>label, got {line!r}")
            modifier, head, label = (f.strip().lower() for f in fields)
            if label not in NOUN_MODIFIER_CLASSES:
                raise DataError(f"{path}:{lineno}: unknown class {label!r}")
            items.append(LabeledNounModifier(modifier, head, label))
    return items


@dataclass(frozen=True)
class SharedPattern:
    score: float
    pattern: Pattern
    orientation: Orientation


PairLists = dict[Orientation, RankedPatternList]


def _rank_index(lists: PairLists) -> dict[Orientation, dict[Pattern, int]]:
    return {
        orientation: {entry.pattern: entry.rank for entry in lists[orientation].entries}
        for orientation in (Orientation.X_FIRST, Orientation.Y_FIRST)
    }


def _best_shared(index_a, index_b) -> SharedPattern | None:
    best: tuple[float, str, Pattern, Orientation] | None = None
    for orientation in (Orientation.X_FIRST, Orientation.Y_FIRST):
        ranks_a, ranks_b = index_a[orientation], index_b[orientation]
        if len(ranks_b) < len(ranks_a):
            ranks_a, ranks_b = ranks_b, ranks_a
        for pattern, rank_a in ranks_a.items():
            rank_b = ranks_b.get(pattern)
            if rank_b is None:
                continue
            score = (rank_a + rank_b) / 2.0
            key = (score, pattern.text, pattern, orientation)
            if best is None or key[:2] < best[:2]:
                best = key
    if best is None:
        return None
    return SharedPattern(best[0], best[2], best[3])


def shared_pattern_score(lists_a: PairLists, lists_b: PairLists) -> SharedPattern | None:
    """Best (lowest) average-rank pattern shared by two pairs' ranked lists.

    Lists are intersected orientation against like orientation. Returns
    None when the pairs share no pattern in either orientation; ties are
    broken by ascending pattern serialization.
    """
    return _best_shared(_rank_index(lists_a), _rank_index(lists_b))


@dataclass
class SolvedQuestion:
    guess: int | None
    best: SharedPattern | None
    choice_scores: tuple[SharedPattern | None, ...]

    @property
    def skipped(self) -> bool:
        return self.guess is None


def solve_question(question: AnalogyQuestion, lists_by_pair) -> SolvedQuestion:
    """Guess the choice with the lowest-scoring shared pattern.

    `lists_by_pair` maps each pair to its ranked lists, or None for pairs
    without matrix rows. A stem without rows is skipped outright; choices
    without rows or without any shared pattern rank below every scored
    choice; when nothing is scored the question is skipped.
    """
    stem_lists = lists_by_pair.get(question.stem)
    if stem_lists is None:
        return SolvedQuestion(None, None, (None,) * 5)
    stem_index = _rank_index(stem_lists)
    choice_scores = []
    for choice in question.choices:
        choice_lists = lists_by_pair.get(choice)
        choice_scores.append(
            None if choice_lists is None else _best_shared(stem_index, _rank_index(choice_lists))
        )
    best_index, best_shared = None, None
    for i, shared in enumerate(choice_scores):
        if shared is None:
            continue
        if best_shared is None or shared.score < best_shared.score:
            best_index, best_shared = i, shared
    return SolvedQuestion(best_index, best_shared, tuple(choice_scores))


@dataclass
class ClassMetrics:
    precision: float
    recall: float
    f_measure: float
    size: int


@dataclass
class EvalReport:
    """Precision/recall/F in percent, plus raw counts.

    Precision is correct out of answered, recall correct out of all items,
    F the harmonic mean. A report with zero answered items carries
    precision 0 with `precision_undefined` set.
    """

    task: str
    ranker: str
    total: int
    answered: int
    correct: int
    precision: float
    recall: float
    f_measure: float
    precision_undefined: bool = False
    per_class: dict[str, ClassMetrics] = field(default_factory=dict)

    @property
    def skipped(self) -> int:
        return self.total - self.answered

    def to_dict(self) -> dict:
        payload = {
            "task": self.task,
            "ranker": self.ranker,
            "total": self.total,
            "answered": self.answered,
            "skipped": self.skipped,
            "correct": self.correct,
            "precision": self.precision,
            "recall": self.recall,
            "f_measure": self.f_measure,
            "precision_undefined": self.precision_undefined,
        }
        if self.per_class:
            payload["per_class"] = {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f_measure": m.f_measure,
                    "size": m.size,
                }
                for name, m in self.per_class.items()
            }
        return payload


def _prf(correct: int, answered: int, total: int) -> tuple[float, float, float]:
    precision = 100.0 * correct / answered if answered else 0.0
    recall = 100.0 * correct / total if total else 0.0
    f_measure = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f_measure


def evaluate_analogies(questions, lists_by_pair, ranker_name: str) -> EvalReport:
    total = len(questions)
    answered = correct = 0
    for question in questions:
        solved = solve_question(question, lists_by_pair)
        if solved.skipped:
            continue
        answered += 1
        if solved.guess == question.answer:
            correct += 1
    precision, recall, f_measure = _prf(correct, answered, total)
    return EvalReport(
        task="analogies", ranker=ranker_name, total=total, answered=answered,
        correct=correct, precision=precision, recall=recall, f_measure=f_measure,
        precision_undefined=answered == 0,
    )


def classify_noun_modifiers(items, lists_by_pair, ranker_name: str) -> EvalReport:
    """1-NN leave-one-out classification by best-shared-pattern distance.

    For each item the nearest neighbour is the other item minimizing the
    shared-pattern score (no overlap counts as infinite distance; exact
    ties go to the smallest item index). Items with no overlap against any
    neighbour are left unanswered.
    """
    n = len(items)
    indexes = [
        None if lists_by_pair.get(item.pair) is None else _rank_index(lists_by_pair[item.pair])
        for item in items
    ]
    predictions: list[str | None] = [None] * n
    for i in range(n):
        if indexes[i] is None:
            continue
        best_score, best_j = None, None
        for j in range(n):
            if j == i or indexes[j] is None:
                continue
            shared = _best_shared(indexes[i], indexes[j])
            if shared is None:
                continue
            if best_score is None or shared.score < best_score:
                best_score, best_j = shared.score, j
        if best_j is not None:
            predictions[i] = items[best_j].label
    answered = sum(1 for p in predictions if p is not None)
    correct = sum(1 for item, p in zip(items, predictions) if p == item.label)
    precision, recall, f_measure = _prf(correct, answered, n)
    per_class = {}
    for cls in NOUN_MODIFIER_CLASSES:
        size = sum(1 for item in items if item.label == cls)
        if size == 0:
            continue
        predicted = sum(1 for p in predictions if p == cls)
        cls_correct = sum(1 for item, p in zip(items, predictions) if p == cls and item.label == cls)
        cls_p = 100.0 * cls_correct / predicted if predicted else 0.0
        cls_r = 100.0 * cls_correct / size
        cls_f = 2 * cls_p * cls_r / (cls_p + cls_r) if cls_p + cls_r > 0 else 0.0
        per_class[cls] = ClassMetrics(cls_p, cls_r, cls_f, size)
    return EvalReport(
        task="nounmod", ranker=ranker_name, total=n, answered=answered,
        correct=correct, precision=precision, recall=recall, f_measure=f_measure,
        precision_undefined=answered == 0, per_class=per_class,
    )


def format_report_table(reports) -> str:
    """Human-readable grid, one row per ranker."""
    lines = [f"{'algorithm':<42}{'prec':>7}{'rec':>7}{'F':>7}"]
    for report in reports:
        lines.append(
            f"{report.ranker:<42}{report.precision:>7.1f}{report.recall:>7.1f}{report.f_measure:>7.1f}"
        )
    return "\n".join(lines)


def format_class_table(report: EvalReport) -> str:
    lines = [f"{'class':<16}{'prec':>7}{'rec':>7}{'F':>7}{'size':>7}"]
    for name in sorted(report.per_class):
        m = report.per_class[name]
        lines.append(f"{name:<16}{m.precision:>7.1f}{m.recall:>7.1f}{m.f_measure:>7.1f}{m.size:>7d}")
    lines.append(
        f"{'all':<16}{report.precision:>7.1f}{report.recall:>7.1f}{report.f_measure:>7.1f}{report.total:>7d}"
    )
    return "\n".join(lines)
