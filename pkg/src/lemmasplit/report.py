"""Aggregation of evaluation results by system, language family and train size.

All averages are macro averages: each language counts once, whatever its
size.  Family aggregates average over a family's languages per system first,
then over systems.
"""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import asdict, dataclass
from statistics import fmean
from typing import Iterable, Mapping, Sequence

from .metrics import EvalResult
from .splitter import Mode

MISC = "misc"
DROP_CSV_HEADER = ("language", "family", "system", "train_examples", "form_acc", "lemma_acc", "drop")


class MissingFamilyError(KeyError):
    def __init__(self, languages: Iterable[str]):
        self.languages = sorted(set(languages))
        super().__init__(f"no family assigned for: {', '.join(self.languages)}")


class PairMismatchError(ValueError):
    def __init__(self, only_form: Iterable, only_lemma: Iterable):
        self.only_form = sorted(only_form)
        self.only_lemma = sorted(only_lemma)
        super().__init__(
            f"(language, system) pairs differ: only in form results {self.only_form}, "
            f"only in lemma results {self.only_lemma}"
        )


def merge_small_families(
    family_map: Mapping[str, str], languages: Iterable[str], min_languages: int = 3
) -> dict[str, str]:
    """Map each language to its family, or to ``misc`` when the family is too small."""
    languages = set(languages)
    missing = [lang for lang in languages if lang not in family_map]
    if missing:
        raise MissingFamilyError(missing)
    members: dict[str, set[str]] = defaultdict(set)
    for lang in languages:
        members[family_map[lang]].add(lang)
    return {
        lang: fam if len(members[fam]) >= min_languages else MISC
        for lang in languages
        for fam in [family_map[lang]]
    }


@dataclass(frozen=True)
class FamilyAggregate:
    family: str
    mode: Mode
    mean_accuracy_across_systems: float
    best_system: str
    best_accuracy: float
    n_languages: int
    system_means: dict[str, float]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["mode"] = Mode(self.mode).value
        return d


def _family_order(name: str):
    return (name == MISC, name)


def aggregate_by_family(
    results: Sequence[EvalResult],
    family_map: Mapping[str, str],
    min_languages: int = 3,
) -> list[FamilyAggregate]:
    assigned = merge_small_families(family_map, (r.language for r in results), min_languages)
    # family, mode, system -> language -> accuracy
    cells: dict[tuple[str, Mode, str], dict[str, float]] = defaultdict(dict)
    langs: dict[tuple[str, Mode], set[str]] = defaultdict(set)
    for r in results:
        fam = assigned[r.language]
        mode = Mode(r.split_mode)
        cells[(fam, mode, r.system)][r.language] = r.accuracy
        langs[(fam, mode)].add(r.language)

    out = []
    for fam, mode in sorted(langs, key=lambda k: (_family_order(k[0]), k[1].value)):
        system_means = {
            system: fmean(accs.values())
            for (f, m, system), accs in sorted(cells.items())
            if f == fam and m == mode
        }
        best = min(system_means, key=lambda s: (-system_means[s], s))
        out.append(
            FamilyAggregate(
                family=fam,
                mode=mode,
                mean_accuracy_across_systems=fmean(system_means.values()),
                best_system=best,
                best_accuracy=system_means[best],
                n_languages=len(langs[(fam, mode)]),
                system_means=system_means,
            )
        )
    return out


def format_family_table(
    aggregates: Sequence[FamilyAggregate], abbreviations: Mapping[str, str] | None = None
) -> str:
    """Render ``mean (best)_system`` cells, one row per family, form then lemma."""
    abbreviations = abbreviations or {}
    rows: dict[str, dict[Mode, str]] = defaultdict(dict)
    for a in aggregates:
        tag = abbreviations.get(a.best_system, a.best_system)
        rows[a.family][Mode(a.mode)] = (
            f"{a.mean_accuracy_across_systems:.2f} ({a.best_accuracy:.2f})_{tag}"
        )
    width = max([len("family")] + [len(f) for f in rows])
    lines = [f"{'family':<{width}}\tform\tlemma"]
    for fam in sorted(rows, key=_family_order):
        cells = rows[fam]
        lines.append(
            f"{fam:<{width}}\t{cells.get(Mode.FORM, '-')}\t{cells.get(Mode.LEMMA, '-')}"
        )
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class DropRecord:
    language: str
    family: str
    system: str
    train_examples: int
    form_accuracy: float
    lemma_accuracy: float

    @property
    def drop(self) -> float:
        return self.form_accuracy - self.lemma_accuracy

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "family": self.family,
            "system": self.system,
            "train_examples": self.train_examples,
            "form_acc": self.form_accuracy,
            "lemma_acc": self.lemma_accuracy,
            "drop": self.drop,
        }


@dataclass(frozen=True)
class DropReport:
    records: tuple[DropRecord, ...]
    system_drop: dict[str, float]
    overall_drop: float

    def to_dict(self) -> dict:
        return {
            "records": [r.to_dict() for r in self.records],
            "macro_average_drop": {"systems": self.system_drop, "overall": self.overall_drop},
        }


def drop_records(
    form: Sequence[EvalResult],
    lemma: Sequence[EvalResult],
    train_sizes: Mapping[str, int],
    family_map: Mapping[str, str] | None = None,
    min_languages: int = 3,
) -> DropReport:
    """Pair form-split and lemma-split results per (language, system).

    ``train_sizes`` holds form-split training example counts per language.
    Without a family map every record is filed under ``misc``.
    """
    f_by = {(r.language, r.system): r for r in form}
    l_by = {(r.language, r.system): r for r in lemma}
    if f_by.keys() != l_by.keys():
        raise PairMismatchError(f_by.keys() - l_by.keys(), l_by.keys() - f_by.keys())
    languages = {lang for lang, _ in f_by}
    missing = sorted(languages - set(train_sizes))
    if missing:
        raise ValueError(f"no train size for: {', '.join(missing)}")
    families = (
        merge_small_families(family_map, languages, min_languages)
        if family_map is not None
        else dict.fromkeys(languages, MISC)
    )

    records = tuple(
        DropRecord(
            language=lang,
            family=families[lang],
            system=system,
            train_examples=int(train_sizes[lang]),
            form_accuracy=f_by[(lang, system)].accuracy,
            lemma_accuracy=l_by[(lang, system)].accuracy,
        )
        for lang, system in sorted(f_by)
    )
    per_system: dict[str, list[float]] = defaultdict(list)
    for r in records:
        per_system[r.system].append(r.drop)
    return DropReport(
        records,
        {s: fmean(d) for s, d in sorted(per_system.items())},
        fmean(r.drop for r in records) if records else 0.0,
    )


def drop_csv(report: DropReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(DROP_CSV_HEADER)
    for r in report.records:
        d = r.to_dict()
        w.writerow([d[k] for k in DROP_CSV_HEADER])
    return buf.getvalue()


@dataclass(frozen=True)
class SystemSummary:
    system: str
    mode: Mode
    accuracy: float
    mean_edit_distance: float
    n_languages: int


def summarize_systems(results: Sequence[EvalResult]) -> list[SystemSummary]:
    """Per-system macro averages of accuracy and edit distance, per split mode."""
    groups: dict[tuple[str, Mode], list[EvalResult]] = defaultdict(list)
    for r in results:
        groups[(r.system, Mode(r.split_mode))].append(r)
    return [
        SystemSummary(
            system,
            mode,
            fmean(r.accuracy for r in rs),
            fmean(r.mean_edit_distance for r in rs),
            len({r.language for r in rs}),
        )
        for (system, mode), rs in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
    ]


def to_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"
