"""Form-split and lemma-split partitioning, leakage checks and size deltas."""
from __future__ import annotations

import enum
import json
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import __version__, rng
from ._io import atomic_write_many
from .corpus import (
    SPLIT_SUFFIXES,
    LanguageDataset,
    content_checksum,
    read_dataset,
    serialize_unimorph,
)

PARTS = ("train", "dev", "test")


class SplitError(ValueError):
    pass


class EmptyDatasetError(SplitError):
    pass


class InfeasibleSplitError(SplitError):
    pass


class MismatchedInputError(SplitError):
    pass


class Mode(str, enum.Enum):
    FORM = "form"
    LEMMA = "lemma"

    def __str__(self) -> str:
        return self.value


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # shortest round-tripping decimal, so 0.7 means 7/10
        return Fraction(repr(x))
    return Fraction(x)


def parse_proportions(text: str) -> tuple[Fraction, Fraction, Fraction]:
    """Parse ``"0.7,0.1,0.2"`` into exact fractions."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated proportions, got {text!r}")
    try:
        return tuple(Fraction(p) for p in parts)  # type: ignore[return-value]
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid proportions {text!r}") from None


@dataclass(frozen=True)
class SplitSpec:
    mode: Mode = Mode.LEMMA
    proportions: tuple[Fraction, Fraction, Fraction] = (
        Fraction(7, 10),
        Fraction(1, 10),
        Fraction(2, 10),
    )
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        props = tuple(_as_fraction(p) for p in self.proportions)
        if len(props) != 3:
            raise ValueError("need exactly three proportions (train, dev, test)")
        if any(p < 0 for p in props):
            raise ValueError(f"proportions must be non-negative: {props}")
        if sum(props) != 1:
            raise ValueError(f"proportions must sum to exactly 1, got {sum(props)}")
        if props[0] <= 0:
            raise ValueError("train proportion must be positive")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "proportions", props)

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "proportions": [str(p) for p in self.proportions],
            "seed": self.seed,
        }


def apportion(total: int, proportions: Sequence[Fraction]) -> list[int]:
    """Largest-remainder rounding of ``total`` units over ``proportions``.

    Leftover units go to the largest fractional remainders; ties favour the
    earlier part (train, then dev, then test).
    """
    quotas = [total * Fraction(p) for p in proportions]
    counts = [q.numerator // q.denominator for q in quotas]
    leftover = total - sum(counts)
    order = sorted(range(len(quotas)), key=lambda i: (-(quotas[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


@dataclass(frozen=True)
class SplitResult:
    spec: SplitSpec
    train: LanguageDataset
    dev: LanguageDataset
    test: LanguageDataset
    provenance: dict = field(default_factory=dict)

    @property
    def language(self) -> str:
        return self.provenance.get("language", self.train.language)

    def part(self, name: str) -> LanguageDataset:
        return getattr(self, name)

    def parts(self) -> list[tuple[str, LanguageDataset]]:
        return [(p, self.part(p)) for p in PARTS]

    def counts(self) -> dict[str, int]:
        return {p: len(ds) for p, ds in self.parts()}

    def table_counts(self) -> dict[str, int]:
        return {p: len({t.lemma for t in ds.triplets}) for p, ds in self.parts()}


def _units(dataset: LanguageDataset, mode: Mode) -> list[list[int]]:
    """Indices of the triplets forming each indivisible unit, in first-occurrence order."""
    if mode is Mode.LEMMA:
        key = lambda t: t.lemma  # noqa: E731
    else:
        # identical records travel together so no record lands in two parts
        key = lambda t: t  # noqa: E731
    groups: dict[object, list[int]] = {}
    for i, t in enumerate(dataset.triplets):
        groups.setdefault(key(t), []).append(i)
    return list(groups.values())


def split(dataset: LanguageDataset, spec: SplitSpec) -> SplitResult:
    """Partition ``dataset`` into train/dev/test.

    LEMMA mode shuffles inflection tables, FORM mode shuffles records; the
    shuffled units are then cut at the largest-remainder counts.  Records keep
    their input order inside each part.
    """
    if not dataset.triplets:
        raise EmptyDatasetError(f"{dataset.language}: dataset is empty")
    units = _units(dataset, spec.mode)
    counts = apportion(len(units), spec.proportions)
    if counts[0] == 0:
        raise InfeasibleSplitError(
            f"{dataset.language}: {len(units)} unit(s) leave the train part empty"
        )
    stream = rng.stream_for(spec.seed, dataset.language)
    stream.shuffle(units)

    parts = []
    start = 0
    for n in counts:
        idx = sorted(i for unit in units[start : start + n] for i in unit)
        parts.append(dataset.replace(dataset.triplets[i] for i in idx))
        start += n

    provenance = {
        "language": dataset.language,
        "checksum": content_checksum(dataset),
        "toolkit_version": __version__,
        "rng": rng.ALGORITHM,
        "units": dict(zip(PARTS, counts)),
    }
    return SplitResult(spec, *parts, provenance=provenance)


@dataclass(frozen=True)
class Violation:
    kind: str  # "lemma-overlap" | "triplet-overlap" | "incomplete"
    item: str
    parts: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"kind": self.kind, "item": self.item, "parts": list(self.parts)}


@dataclass(frozen=True)
class VerificationReport:
    language: str
    mode: Mode
    violations: tuple[Violation, ...]
    completeness_checked: bool

    @property
    def passed(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        status = "OK" if self.passed else "FAIL"
        return f"{status}, {len(self.violations)} violations"

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "mode": self.mode.value,
            "passed": self.passed,
            "completeness_checked": self.completeness_checked,
            "violations": [v.to_dict() for v in self.violations],
        }


def verify_split(result: SplitResult, mode: Mode | str | None = None) -> VerificationReport:
    """Check pairwise disjointness of the three parts, and completeness.

    ``mode`` defaults to the split's own mode; passing ``Mode.LEMMA`` for a
    form split reports the lemma leakage of that split.  Completeness is
    checked whenever the provenance carries an input checksum.
    """
    mode = Mode(mode) if mode is not None else result.spec.mode
    where: dict[object, list[str]] = defaultdict(list)
    for name, ds in result.parts():
        keys = {t.lemma for t in ds.triplets} if mode is Mode.LEMMA else set(ds.triplets)
        for k in keys:
            where[k].append(name)

    violations = []
    kind = "lemma-overlap" if mode is Mode.LEMMA else "triplet-overlap"
    for key, parts in where.items():
        if len(parts) > 1:
            item = key if isinstance(key, str) else key.to_line()
            violations.append(Violation(kind, item, tuple(parts)))
    violations.sort(key=lambda v: (v.item, v.parts))

    expected = result.provenance.get("checksum")
    if expected is not None:
        union = [t for _, ds in result.parts() for t in ds.triplets]
        actual = content_checksum(union)
        if actual != expected:
            violations.append(
                Violation("incomplete", f"checksum {actual} != {expected}", PARTS)
            )
    return VerificationReport(
        result.language, mode, tuple(violations), expected is not None
    )


@dataclass(frozen=True)
class SizeDelta:
    language: str
    counts_a: dict[str, int]
    counts_b: dict[str, int]
    # percent change of b relative to a; None where a's part is empty
    delta_pct: dict[str, float | None]

    def to_dict(self) -> dict:
        return {
            "language": self.language,
            "counts_a": self.counts_a,
            "counts_b": self.counts_b,
            "delta_pct": self.delta_pct,
        }


def compare_split_sizes(a: SplitResult, b: SplitResult) -> SizeDelta:
    ca, cb = a.provenance.get("checksum"), b.provenance.get("checksum")
    if ca != cb:
        raise MismatchedInputError(f"splits come from different inputs ({ca} vs {cb})")
    counts_a, counts_b = a.counts(), b.counts()
    delta = {
        p: (counts_b[p] - counts_a[p]) / counts_a[p] * 100 if counts_a[p] else None
        for p in PARTS
    }
    return SizeDelta(a.language, counts_a, counts_b, delta)


def mean_delta(deltas: Sequence[SizeDelta], part: str = "train") -> float:
    """Unweighted mean of per-language percent deltas for one part."""
    values = [d.delta_pct[part] for d in deltas if d.delta_pct[part] is not None]
    if not values:
        raise ValueError("no defined deltas to average")
    return sum(values) / len(values)


# -- files -------------------------------------------------------------------


def provenance_path(outdir: str | Path, language: str) -> Path:
    return Path(outdir) / f"{language}.split.json"


def provenance_record(result: SplitResult) -> dict:
    prov = result.provenance
    return {
        "language": result.language,
        **result.spec.to_dict(),
        "checksum": prov.get("checksum"),
        "counts": result.counts(),
        "tables": result.table_counts(),
        "toolkit_version": prov.get("toolkit_version", __version__),
        "rng": prov.get("rng", rng.ALGORITHM),
    }


def write_split(result: SplitResult, outdir: str | Path) -> list[Path]:
    """Write ``<lang>.trn/.dev/.tst`` plus the JSON provenance sidecar atomically."""
    outdir = Path(outdir)
    lang = result.language
    files = {
        outdir / f"{lang}{SPLIT_SUFFIXES[p]}": serialize_unimorph(ds)
        for p, ds in result.parts()
    }
    files[provenance_path(outdir, lang)] = (
        json.dumps(provenance_record(result), indent=2, ensure_ascii=False) + "\n"
    )
    atomic_write_many(files)
    return list(files)


def read_split(outdir: str | Path, language: str, normalize: bool = True) -> SplitResult:
    outdir = Path(outdir)
    meta = json.loads(provenance_path(outdir, language).read_text(encoding="utf-8"))
    spec = SplitSpec(
        Mode(meta["mode"]), tuple(Fraction(p) for p in meta["proportions"]), meta["seed"]
    )
    parts = [
        read_dataset(outdir / f"{language}{SPLIT_SUFFIXES[p]}", language, normalize=normalize)
        for p in PARTS
    ]
    provenance = {
        k: meta[k] for k in ("language", "checksum", "toolkit_version", "rng") if k in meta
    }
    return SplitResult(spec, *parts, provenance=provenance)


def split_languages(outdir: str | Path) -> list[str]:
    return sorted(p.name[: -len(".split.json")] for p in Path(outdir).glob("*.split.json"))
