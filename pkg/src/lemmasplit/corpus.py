"""UniMorph TSV reading and writing, plus lemma grouping.

A UniMorph file holds one ``lemma<TAB>form<TAB>tag;tag;...`` record per line.
SIGMORPHON shared-task splits reuse the format under ``<lang>.trn``,
``<lang>.dev`` and ``<lang>.tst``.
"""
from __future__ import annotations

import hashlib
import unicodedata
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

SPLIT_SUFFIXES = {"train": ".trn", "dev": ".dev", "test": ".tst"}


class CorpusError(ValueError):
    """Base class for malformed-input errors."""


class DecodeError(CorpusError):
    def __init__(self, offset: int, reason: str = "invalid UTF-8"):
        self.offset = offset
        super().__init__(f"{reason} at byte offset {offset}")


class FormatError(CorpusError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class EmptyFieldError(FormatError):
    pass


class DuplicateTripletWarning(UserWarning):
    pass


def nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Triplet:
    """One (lemma, features, form) record.

    ``features`` keeps the original tag order for serialization; equality and
    hashing treat the bundle as a set.
    """

    lemma: str
    form: str
    features: tuple[str, ...] = field(compare=False)
    feature_set: frozenset[str] = field(init=False, repr=False)
    feature_key: str = field(init=False, repr=False, compare=False)
    _hash: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.lemma.strip():
            raise ValueError("empty lemma")
        if not self.form.strip():
            raise ValueError("empty form")
        feats = tuple(self.features)
        if not feats or any(not t for t in feats):
            raise ValueError("empty feature tag")
        if len(set(feats)) != len(feats):
            raise ValueError(f"duplicate feature tag in {';'.join(feats)}")
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "feature_set", frozenset(feats))
        object.__setattr__(self, "feature_key", ";".join(sorted(feats)))
        object.__setattr__(self, "_hash", hash((self.lemma, self.form, self.feature_set)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def bundle(self) -> str:
        return ";".join(self.features)

    def to_line(self) -> str:
        return f"{self.lemma}\t{self.form}\t{self.bundle}"

    def sort_key(self) -> tuple[str, str, str]:
        return (self.lemma, self.form, self.feature_key)


def bundle_key(features: Iterable[str] | str) -> str:
    """Order-insensitive key for a feature bundle (case-sensitive)."""
    if isinstance(features, str):
        features = features.split(";")
    return ";".join(sorted(set(features)))


@dataclass(frozen=True)
class InflectionTable:
    lemma: str
    triplets: tuple[Triplet, ...]

    @property
    def slots(self) -> list[tuple[tuple[str, ...], str]]:
        return [(t.features, t.form) for t in self.triplets]

    def __len__(self) -> int:
        return len(self.triplets)


@dataclass(frozen=True)
class LanguageDataset:
    language: str
    family: str = "misc"
    triplets: tuple[Triplet, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "triplets", tuple(self.triplets))

    def __len__(self) -> int:
        return len(self.triplets)

    def replace(self, triplets: Iterable[Triplet]) -> "LanguageDataset":
        return LanguageDataset(self.language, self.family, tuple(triplets))


@dataclass(frozen=True)
class StatsRecord:
    language: str
    triplets: int
    tables: int
    min_table_size: int
    mean_table_size: float
    max_table_size: int
    distinct_bundles: int

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "triplets": self.triplets,
            "tables": self.tables,
            "min_table_size": self.min_table_size,
            "mean_table_size": self.mean_table_size,
            "max_table_size": self.max_table_size,
            "distinct_bundles": self.distinct_bundles,
        }


def _decode(data: bytes | str) -> str:
    if isinstance(data, str):
        return data
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DecodeError(exc.start, exc.reason) from None
    return text.removeprefix("\ufeff")


def parse_unimorph(
    data: bytes | str,
    language: str,
    family: str = "misc",
    normalize: bool = True,
) -> LanguageDataset:
    """Parse UniMorph TSV content into a dataset, keeping input order.

    Blank lines are skipped.  Identical repeated records are kept and a
    ``DuplicateTripletWarning`` names the line numbers involved.
    """
    text = _decode(data)
    triplets = []
    first_seen: dict[Triplet, int] = {}
    duplicates: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        line = raw.removesuffix("\r")
        if not line.strip():
            continue
        if normalize:
            line = nfc(line)
        fields = line.split("\t")
        if len(fields) != 3:
            raise FormatError(lineno, f"expected 3 tab-separated fields, got {len(fields)}")
        lemma, form, feats = fields
        if not lemma.strip():
            raise EmptyFieldError(lineno, "empty lemma")
        if not form.strip():
            raise EmptyFieldError(lineno, "empty form")
        if not feats.strip():
            raise EmptyFieldError(lineno, "empty features")
        tags = feats.split(";")
        if any(not t for t in tags):
            raise EmptyFieldError(lineno, f"empty tag in {feats!r}")
        if len(set(tags)) != len(tags):
            raise FormatError(lineno, f"duplicate tag in {feats!r}")
        trip = Triplet(lemma, form, tuple(tags))
        if trip in first_seen:
            duplicates.append((first_seen[trip], lineno))
        else:
            first_seen[trip] = lineno
        triplets.append(trip)
    if duplicates:
        shown = ", ".join(f"{a}/{b}" for a, b in duplicates[:10])
        more = "" if len(duplicates) <= 10 else f" (+{len(duplicates) - 10} more)"
        warnings.warn(
            f"{language}: {len(duplicates)} duplicate triplet(s), first/repeat lines {shown}{more}",
            DuplicateTripletWarning,
            stacklevel=2,
        )
    return LanguageDataset(language, family, tuple(triplets))


def serialize_unimorph(triplets: LanguageDataset | Iterable[Triplet]) -> str:
    if isinstance(triplets, LanguageDataset):
        triplets = triplets.triplets
    return "".join(t.to_line() + "\n" for t in triplets)


def language_from_path(path: str | Path) -> str:
    return Path(path).name.split(".")[0]


def read_dataset(
    path: str | Path,
    language: str | None = None,
    family: str = "misc",
    normalize: bool = True,
) -> LanguageDataset:
    path = Path(path)
    return parse_unimorph(
        path.read_bytes(), language or language_from_path(path), family, normalize
    )


def group_by_lemma(dataset: LanguageDataset) -> list[InflectionTable]:
    """One table per distinct lemma, in order of first occurrence."""
    groups: dict[str, list[Triplet]] = {}
    for t in dataset.triplets:
        groups.setdefault(t.lemma, []).append(t)
    return [InflectionTable(lemma, tuple(ts)) for lemma, ts in groups.items()]


def dataset_stats(dataset: LanguageDataset) -> StatsRecord:
    sizes = [len(t) for t in group_by_lemma(dataset)]
    bundles = {t.feature_set for t in dataset.triplets}
    return StatsRecord(
        language=dataset.language,
        triplets=len(dataset.triplets),
        tables=len(sizes),
        min_table_size=min(sizes, default=0),
        mean_table_size=sum(sizes) / len(sizes) if sizes else 0.0,
        max_table_size=max(sizes, default=0),
        distinct_bundles=len(bundles),
    )


def content_checksum(triplets: LanguageDataset | Iterable[Triplet]) -> str:
    """SHA-256 of the sorted record multiset; independent of record order."""
    if isinstance(triplets, LanguageDataset):
        triplets = triplets.triplets
    lines = sorted(f"{t.lemma}\t{t.form}\t{t.feature_key}\n" for t in triplets)
    return "sha256:" + hashlib.sha256("".join(lines).encode("utf-8")).hexdigest()


def load_family_map(path: str | Path) -> dict[str, str]:
    """Read a language -> family map from JSON or a two-column TSV."""
    import json

    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if path.suffix == ".json":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise CorpusError(f"{path}: family map must be a JSON object")
        return {str(k): str(v) for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise FormatError(lineno, "family map lines need 2 tab-separated fields")
        out[parts[0].strip()] = parts[1].strip()
    return out
