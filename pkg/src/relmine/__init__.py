"""relmine: mine and rank lexico-syntactic patterns for word-pair relations.

Given word pairs and a plain-text corpus, the pipeline finds every short
phrase joining a pair, generalizes the phrases into wildcard patterns,
embeds pairs in a truncated-SVD space of pattern co-occurrences, and ranks
each pair's patterns by pertinence: the expected relational similarity
between the pair and the pairs typically found with the pattern.
"""

from .corpus import (Document, NounLexicon, Orientation, Phrase, PositionalIndex, WordPair,
                     build_index, expand_word_forms, find_phrases, is_likely_noun, tokenize)
from .evaluation import (AnalogyQuestion, EvalReport, LabeledNounModifier,
                         classify_noun_modifiers, evaluate_analogies, shared_pattern_score,
                         solve_question)
from .matrix import (ColMap, Direction, PairPatternMatrix, RowMap, SvdFactors, build_matrix,
                     log_entropy_transform, row_cosines, truncated_svd)
from .patterns import (Pattern, PatternStats, accumulate_stats, filter_patterns,
                       generate_patterns)
from .pertinence import (RANKERS, ConditionalTable, Ranker, ScoringContext,
                         conditional_probabilities, get_ranker, pertinence_scores,
                         ranked_lists_for_pair)
from .pipeline import MiningArtifacts, PipelineConfig, run_eval, run_index, run_mine, run_rank

__version__ = "0.1.0"
