"""Deterministic synthetic corpora for demos and end-to-end checks.

The analogy corpus is engineered so the stem and the correct choice share
a hypernym-style "such as the" phrasing that is unique to them, while the
distractors co-occur through their own phrasings plus a noisier "known as
the" variant. The noise makes the wildcard siblings of the hypernym
pattern ambiguous across dissimilar pairs, so pertinence singles out the
exact pattern at the top of both pairs' lists.
"""

from __future__ import annotations

from pathlib import Path

ANALOGY_STEM = ("ostrich", "bird")
ANALOGY_CHOICES = (
    ("lion", "cat"),       # the solution
    ("goose", "flock"),
    ("ewe", "sheep"),
    ("cub", "bear"),
    ("primate", "monkey"),
)
ANALOGY_ANSWER = 0

_FILLER_WORDS = (
    "sun valley river stone meadow cloud harvest lantern bridge orchard "
    "window garden winter summer thunder whisper journey mountain harbor "
    "forest"
).split()


def analogy_sentences() -> list[str]:
    """Around two hundred single-sentence documents, deterministic order.

    Only the stem and the solution occur in the exact "such as the"
    phrasing. The distractors occur in their own short phrasings plus in
    "known as the", "such that the", and "such as one" variants, which
    spread every wildcard sibling of "Y such as the X" over dissimilar
    pairs without ever touching the exact pattern.
    """
    sentences = []
    sentences += ["bird such as the ostrich"] * 12
    sentences += ["cat such as the lion"] * 12
    distractor_own = [
        "goose lives in flock",
        "ewe is a sheep",
        "cub grows into bear",
        "primate like the monkey",
    ]
    for sentence in distractor_own:
        sentences += [sentence] * 8
    distractor_noise = []
    for x, y in ANALOGY_CHOICES[1:]:
        distractor_noise += [
            f"{y} known as the {x}",
            f"{y} such that the {x}",
            f"{y} such as one {x}",
        ]
    for sentence in distractor_noise:
        sentences += [sentence] * 6
    for i in range(72):
        a = _FILLER_WORDS[i % len(_FILLER_WORDS)]
        b = _FILLER_WORDS[(i * 7 + 3) % len(_FILLER_WORDS)]
        sentences.append(f"the {a} rests beyond the {b} tonight")
    return sentences


def analogy_lexicon() -> list[str]:
    pair_words = [w for pair in (ANALOGY_STEM, *ANALOGY_CHOICES) for w in pair]
    return sorted(set(pair_words) | set(_FILLER_WORDS))


def analogy_questions_text() -> str:
    lines = [f"{ANALOGY_STEM[0]} {ANALOGY_STEM[1]}"]
    lines += [f"{x} {y}" for x, y in ANALOGY_CHOICES]
    lines.append(f"answer: {ANALOGY_ANSWER}")
    return "\n".join(lines) + "\n"


def analogy_pairs() -> list[tuple[str, str]]:
    return [ANALOGY_STEM, *ANALOGY_CHOICES]


NOUN_MOD_ITEMS = (
    # (modifier, head, label); gap lengths differ per class so overlap
    # exists only within a class and the 1-NN structure is hand-checkable.
    ("flu", "virus", "causality"),
    ("rain", "cloud", "causality"),
    ("student", "protest", "participant"),
    ("worker", "strike", "participant"),
    ("copper", "coin", "quality"),
    ("wool", "coat", "quality"),
)


def noun_modifier_sentences() -> list[str]:
    sentences = []
    class_templates = {
        "causality": "{head} causes {modifier}",
        "participant": "{head} led by {modifier}",
        "quality": "{head} is made of {modifier}",
    }
    for modifier, head, label in NOUN_MOD_ITEMS:
        sentence = class_templates[label].format(modifier=modifier, head=head)
        sentences += [sentence] * 6
    for i in range(30):
        a = _FILLER_WORDS[(i * 3 + 1) % len(_FILLER_WORDS)]
        sentences.append(f"a quiet {a} waits near the shore")
    return sentences


def noun_modifier_lexicon() -> list[str]:
    words = {w for modifier, head, _ in NOUN_MOD_ITEMS for w in (modifier, head)}
    return sorted(words | set(_FILLER_WORDS))


def noun_modifier_items_text() -> str:
    return "".join(f"{m}\t{h}\t{label}\n" for m, h, label in NOUN_MOD_ITEMS)


def write_analogy_demo(directory) -> dict[str, Path]:
    """Write corpus, lexicon, pairs and question files; returns their paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": directory / "corpus.txt",
        "lexicon": directory / "nouns.txt",
        "questions": directory / "questions.txt",
        "pairs": directory / "pairs.txt",
    }
    paths["corpus"].write_text("\n".join(analogy_sentences()) + "\n", encoding="utf-8")
    paths["lexicon"].write_text("\n".join(analogy_lexicon()) + "\n", encoding="utf-8")
    paths["questions"].write_text(analogy_questions_text(), encoding="utf-8")
    paths["pairs"].write_text("".join(f"{x} {y}\n" for x, y in analogy_pairs()), encoding="utf-8")
    return paths


def write_noun_modifier_demo(directory) -> dict[str, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "corpus": directory / "corpus.txt",
        "lexicon": directory / "nouns.txt",
        "items": directory / "nounmod.tsv",
    }
    paths["corpus"].write_text("\n".join(noun_modifier_sentences()) + "\n", encoding="utf-8")
    paths["lexicon"].write_text("\n".join(noun_modifier_lexicon()) + "\n", encoding="utf-8")
    paths["items"].write_text(noun_modifier_items_text(), encoding="utf-8")
    return paths
