"""Prefix/suffix transduction-rule inflector with an optional memorization mode.

Rules come from aligning each training lemma with its form on their longest
common substring: whatever precedes the shared stem is a prefix rewrite,
whatever follows it is a suffix rewrite.

With ``memorize=True`` the model additionally keeps

* an exact ``(lemma, bundle) -> form`` table, and
* every training form of every training lemma, which is used to pick among
  the candidate rules for an unseen cell of a known lemma: the candidate
  sharing the longest common substring with one of the lemma's known forms
  wins.  This is the lemma-specific shortcut that a form split leaks and a
  lemma split removes.
"""
from __future__ import annotations

import json
import warnings
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import LanguageDataset, bundle_key
from .splitter import EmptyDatasetError


class MemoConflictWarning(UserWarning):
    pass


def longest_common_substring(a: str, b: str) -> tuple[int, int, int]:
    """Return ``(start_in_a, start_in_b, length)``.

    Ties go to the leftmost start in ``a``, then the leftmost start in ``b``.
    Length 0 (and starts 0, 0) when the strings share no character.
    """
    best = (0, 0, 0)
    prev = [0] * (len(b) + 1)
    for i, ca in enumerate(a, start=1):
        cur = [0] * (len(b) + 1)
        for j, cb in enumerate(b, start=1):
            if ca == cb:
                cur[j] = prev[j - 1] + 1
                n = cur[j]
                start = (i - n, j - n)
                if n > best[2] or (n == best[2] and start < best[:2]):
                    best = (start[0], start[1], n)
        prev = cur
    return best


@dataclass(frozen=True)
class TransductionRule:
    bundle: str
    lemma_prefix: str
    form_prefix: str
    lemma_suffix: str
    form_suffix: str
    support: int = 1

    @property
    def edit(self) -> tuple[str, str, str, str]:
        return (self.lemma_prefix, self.form_prefix, self.lemma_suffix, self.form_suffix)

    def matches(self, lemma: str) -> bool:
        return (
            len(lemma) >= len(self.lemma_prefix) + len(self.lemma_suffix)
            and lemma.startswith(self.lemma_prefix)
            and lemma.endswith(self.lemma_suffix)
        )

    def apply(self, lemma: str) -> str:
        stem = lemma[len(self.lemma_prefix) : len(lemma) - len(self.lemma_suffix)]
        return self.form_prefix + stem + self.form_suffix

    def to_dict(self) -> dict:
        return {
            "lemma_prefix": self.lemma_prefix,
            "form_prefix": self.form_prefix,
            "lemma_suffix": self.lemma_suffix,
            "form_suffix": self.form_suffix,
            "support": self.support,
        }


def extract_rule(lemma: str, form: str, bundle: Iterable[str] | str) -> TransductionRule:
    key = bundle_key(bundle)
    i, j, n = longest_common_substring(lemma, form)
    if n == 0:
        return TransductionRule(key, "", "", lemma, form)
    return TransductionRule(key, lemma[:i], form[:j], lemma[i + n :], form[j + n :])


def rule_order(rule: TransductionRule):
    return (-len(rule.lemma_suffix), -rule.support, rule.edit)


@dataclass(frozen=True)
class RuleModel:
    rules: dict[str, tuple[TransductionRule, ...]]
    memo: dict[tuple[str, str], str] | None = None
    # lemma -> forms seen in training, in order; present iff memo is
    paradigms: dict[str, tuple[str, ...]] | None = None

    @property
    def memorize(self) -> bool:
        return self.memo is not None

    def to_dict(self) -> dict:
        out: dict = {
            "memorize": self.memorize,
            "rules": {b: [r.to_dict() for r in rs] for b, rs in sorted(self.rules.items())},
        }
        if self.memo is not None:
            out["memo"] = [
                {"lemma": lemma, "bundle": b, "form": f}
                for (lemma, b), f in sorted(self.memo.items())
            ]
            out["paradigms"] = {k: list(v) for k, v in sorted(self.paradigms.items())}
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "RuleModel":
        rules = {
            b: tuple(TransductionRule(b, **r) for r in rs) for b, rs in d["rules"].items()
        }
        memo = paradigms = None
        if d.get("memorize"):
            memo = {(m["lemma"], m["bundle"]): m["form"] for m in d.get("memo", [])}
            paradigms = {k: tuple(v) for k, v in d.get("paradigms", {}).items()}
        return cls(rules, memo, paradigms)

    def save(self, path: str | Path) -> None:
        from ._io import atomic_write

        atomic_write(path, json.dumps(self.to_dict(), indent=1, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "RuleModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train(dataset: LanguageDataset, memorize: bool = False) -> RuleModel:
    if not dataset.triplets:
        raise EmptyDatasetError(f"{dataset.language}: cannot train on an empty dataset")
    support: dict[tuple, int] = defaultdict(int)
    for t in dataset.triplets:
        r = extract_rule(t.lemma, t.form, t.features)
        support[(r.bundle, r.edit)] += 1

    by_bundle: dict[str, list[TransductionRule]] = defaultdict(list)
    for (b, edit), n in support.items():
        by_bundle[b].append(TransductionRule(b, *edit, support=n))
    rules = {b: tuple(sorted(rs, key=rule_order)) for b, rs in by_bundle.items()}

    if not memorize:
        return RuleModel(rules)

    memo: dict[tuple[str, str], str] = {}
    paradigms: dict[str, list[str]] = defaultdict(list)
    conflicts = []
    for t in dataset.triplets:
        key = (t.lemma, bundle_key(t.features))
        if key in memo and memo[key] != t.form:
            conflicts.append((key, memo[key], t.form))
        memo[key] = t.form
        if t.form not in paradigms[t.lemma]:
            paradigms[t.lemma].append(t.form)
    if conflicts:
        (lemma, b), old, new = conflicts[0]
        warnings.warn(
            f"{len(conflicts)} conflicting memo entries, last wins "
            f"(e.g. {lemma} {b}: {old!r} -> {new!r})",
            MemoConflictWarning,
            stacklevel=2,
        )
    return RuleModel(rules, memo, {k: tuple(v) for k, v in paradigms.items()})


def predict(model: RuleModel, lemma: str, bundle: Iterable[str] | str) -> str:
    """Inflect ``lemma``; falls back to copying it when nothing applies."""
    key = bundle_key(bundle)
    if model.memo is not None and (lemma, key) in model.memo:
        return model.memo[(lemma, key)]
    candidates = [r for r in model.rules.get(key, ()) if r.matches(lemma)]
    if not candidates:
        return lemma
    known = model.paradigms.get(lemma) if model.paradigms else None
    if not known:
        return candidates[0].apply(lemma)

    best, best_score = None, -1
    seen = set()
    for r in candidates:
        form = r.apply(lemma)
        if form in seen:
            continue
        seen.add(form)
        score = max(longest_common_substring(form, k)[2] for k in known)
        if score > best_score:
            best, best_score = form, score
    return best


def predict_dataset(model: RuleModel, dataset: LanguageDataset) -> list[str]:
    return [predict(model, t.lemma, t.features) for t in dataset.triplets]
