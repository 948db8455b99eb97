"""Synthetic corpora for exercising the splitter and the memorization gap."""
from __future__ import annotations

import random

from .corpus import LanguageDataset, Triplet

PLURAL_ALLOMORPHS = ("er", "en", "s")
PLURAL_CASES = ("NOM", "ACC", "DAT", "GEN")

_ONSETS = "bdfgklmnprstvz"
_VOWELS = "aeiou"


def _lemma(rnd: random.Random) -> str:
    syllables = rnd.randint(2, 3)
    return "".join(rnd.choice(_ONSETS) + rnd.choice(_VOWELS) for _ in range(syllables)) + rnd.choice(
        "dknrt"
    )


def plural_case_form(plural: str, case: str) -> str:
    # dative plural adds -n unless the plural already ends in -n or -s
    if case == "DAT" and not plural.endswith(("n", "s")):
        return plural + "n"
    return plural


def allomorphy_corpus(n_lemmas: int = 300, seed: int = 0, language: str = "syn") -> LanguageDataset:
    """German-style noun plurals.

    Every lemma draws one of ``PLURAL_ALLOMORPHS`` uniformly at random, so
    the allomorph cannot be predicted from the lemma's shape.  Each table has
    the four plural case cells, all built from the plural stem.
    """
    rnd = random.Random(seed)
    lemmas: list[str] = []
    seen = set()
    while len(lemmas) < n_lemmas:
        lemma = _lemma(rnd)
        if lemma not in seen:
            seen.add(lemma)
            lemmas.append(lemma)
    triplets = []
    for lemma in lemmas:
        plural = lemma + rnd.choice(PLURAL_ALLOMORPHS)
        for case in PLURAL_CASES:
            triplets.append(Triplet(lemma, plural_case_form(plural, case), ("N", case, "PL")))
    return LanguageDataset(language, "synthetic", tuple(triplets))


def random_dataset(
    rnd: random.Random,
    n_lemmas: tuple[int, int] = (5, 200),
    table_size: tuple[int, int] = (1, 40),
    language: str | None = None,
) -> LanguageDataset:
    """Random tables with random sizes; records are distinct and interleaved."""
    n = rnd.randint(*n_lemmas)
    triplets = []
    for i in range(n):
        lemma = f"l{i}{rnd.choice(_VOWELS)}"
        for j in range(rnd.randint(*table_size)):
            triplets.append(Triplet(lemma, f"{lemma}x{j}", ("T", f"S{j}")))
    rnd.shuffle(triplets)
    return LanguageDataset(language or f"r{rnd.randrange(10**6)}", "misc", tuple(triplets))
