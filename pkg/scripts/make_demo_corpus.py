#!/usr/bin/env python3
"""Write the bundled synthetic demo data to a directory.

Usage:
    python scripts/make_demo_corpus.py [DEST]

Creates DEST/analogy/ (corpus, noun lexicon, pairs, questions) and
DEST/nounmod/ (corpus, noun lexicon, labeled pairs). Default DEST is
./demo-data.
"""

import sys
from pathlib import Path

from relmine.synth import write_analogy_demo, write_noun_modifier_demo


def main() -> int:
    dest = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo-data")
    analogy_paths = write_analogy_demo(dest / "analogy")
    nounmod_paths = write_noun_modifier_demo(dest / "nounmod")
    for name, path in {**analogy_paths, **nounmod_paths}.items():
        print(f"{name:>10}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
