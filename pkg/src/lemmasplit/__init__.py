"""Lemma-disjoint re-splitting and evaluation tools for morphological inflection data."""
from pathlib import Path

__version__ = "0.1.0"

# German noun paradigms (134 lemmas x 8 cells) in UniMorph format
SAMPLE_DATA = Path(__file__).with_name("data") / "deu.tsv"
