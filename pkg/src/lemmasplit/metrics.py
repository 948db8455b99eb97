"""Exact-match accuracy and Levenshtein distance over prediction files."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .corpus import FormatError, LanguageDataset, _decode, bundle_key, nfc
from .splitter import Mode


class LengthMismatchError(ValueError):
    def __init__(self, gold: int, predicted: int):
        self.gold = gold
        self.predicted = predicted
        super().__init__(f"gold has {gold} items but predictions have {predicted}")


class AlignmentError(ValueError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"prediction line {line}: {message}")


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over code points.

    Bit-parallel (Myers 1999 / Hyyrö 2001): one column of the DP matrix is
    packed into an int, so each character of ``b`` costs a handful of big-int
    operations regardless of ``len(a)``.
    """
    if a == b:
        return 0
    # common affixes never contribute
    lo = 0
    while lo < len(a) and lo < len(b) and a[lo] == b[lo]:
        lo += 1
    hi = 0
    while hi < len(a) - lo and hi < len(b) - lo and a[-1 - hi] == b[-1 - hi]:
        hi += 1
    a = a[lo : len(a) - hi]
    b = b[lo : len(b) - hi]
    if not a:
        return len(b)
    if not b:
        return len(a)

    m = len(a)
    peq: dict[str, int] = {}
    for i, ch in enumerate(a):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    full = (1 << m) - 1
    top = 1 << (m - 1)
    pv, mv, score = full, 0, m
    for ch in b:
        eq = peq.get(ch, 0)
        xv = eq | mv
        xh = (((eq & pv) + pv) ^ pv) | eq
        ph = mv | (~(xh | pv) & full)
        mh = pv & xh
        if ph & top:
            score += 1
        elif mh & top:
            score -= 1
        ph = ((ph << 1) | 1) & full
        mh = (mh << 1) & full
        pv = mh | (~(xv | ph) & full)
        mv = ph & xv
    return score


@dataclass(frozen=True)
class EvalResult:
    language: str
    system: str
    split_mode: Mode
    accuracy: float
    mean_edit_distance: float
    n: int

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "system": self.system,
            "split_mode": Mode(self.split_mode).value,
            "accuracy": self.accuracy,
            "mean_edit_distance": self.mean_edit_distance,
            "n": self.n,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EvalResult":
        return cls(
            language=d["language"],
            system=d["system"],
            split_mode=Mode(d["split_mode"]),
            accuracy=float(d["accuracy"]),
            mean_edit_distance=float(d["mean_edit_distance"]),
            n=int(d["n"]),
        )


def evaluate(
    gold: LanguageDataset,
    predictions: Sequence[str],
    system: str,
    split_mode: Mode | str,
    normalize: bool = True,
) -> EvalResult:
    """Score predictions against gold forms by position."""
    golds = [t.form for t in gold.triplets]
    if len(golds) != len(predictions):
        raise LengthMismatchError(len(golds), len(predictions))
    correct = 0
    total_ed = 0
    for g, p in zip(golds, predictions):
        if normalize:
            g, p = nfc(g), nfc(p)
        if g == p:
            correct += 1
        else:
            total_ed += levenshtein(g, p)
    n = len(golds)
    return EvalResult(
        language=gold.language,
        system=system,
        split_mode=Mode(split_mode),
        accuracy=correct / n if n else 0.0,
        mean_edit_distance=total_ed / n if n else 0.0,
        n=n,
    )


@dataclass(frozen=True)
class PredictionLine:
    form: str
    lemma: str | None = None
    features: str | None = None


def parse_predictions(data: bytes | str) -> list[PredictionLine]:
    """Read a prediction file: 3-column UniMorph TSV or bare forms, one per line.

    Blank lines are skipped, as in gold files.
    """
    out = []
    for lineno, raw in enumerate(_decode(data).split("\n"), start=1):
        line = raw.removesuffix("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) == 3:
            out.append(PredictionLine(fields[1], fields[0], fields[2]))
        elif len(fields) == 1:
            out.append(PredictionLine(fields[0]))
        else:
            raise FormatError(lineno, f"expected 1 or 3 tab-separated fields, got {len(fields)}")
    return out


def read_predictions(path: str | Path) -> list[PredictionLine]:
    return parse_predictions(Path(path).read_bytes())


def check_alignment(
    gold: LanguageDataset, predictions: Sequence[PredictionLine], normalize: bool = True
) -> None:
    """Raise if a 3-column prediction disagrees with gold on lemma or features."""
    if len(gold.triplets) != len(predictions):
        raise LengthMismatchError(len(gold.triplets), len(predictions))
    for i, (g, p) in enumerate(zip(gold.triplets, predictions), start=1):
        if p.lemma is None:
            continue
        lemma = nfc(p.lemma) if normalize else p.lemma
        if lemma != g.lemma or bundle_key(p.features) != bundle_key(g.features):
            raise AlignmentError(
                i, f"expected {g.lemma!r} {g.bundle}, found {p.lemma!r} {p.features}"
            )


def write_results(results: Sequence[EvalResult]) -> str:
    if len(results) == 1:
        return json.dumps(results[0].to_dict(), indent=2, ensure_ascii=False) + "\n"
    return json.dumps([r.to_dict() for r in results], indent=2, ensure_ascii=False) + "\n"


def load_results(path: str | Path) -> list[EvalResult]:
    """Load EvalResults from a JSON object, a JSON list, or JSON lines."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        data = [json.loads(line) for line in text.splitlines() if line.strip()]
    if isinstance(data, dict):
        data = [data]
    return [EvalResult.from_dict(d) for d in data]
