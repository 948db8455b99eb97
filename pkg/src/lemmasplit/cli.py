"""Command-line front end.

Exit codes: 0 success, 1 data error (diagnostic on stderr), 2 usage error.
Every output file is written atomically.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, baseline, corpus, metrics, report, splitter
from ._io import atomic_write
from .splitter import Mode, SplitSpec

log = logging.getLogger("lemmasplit")


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(2, f"\n{self.prog}: error: {message}\n")


def _proportions(text: str):
    try:
        props = splitter.parse_proportions(text)
        SplitSpec(Mode.LEMMA, props, 0)
        return props
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {text!r}") from None
    if not 0 <= seed < 1 << 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return seed


def _inputs(args) -> list[Path]:
    if args.input:
        paths = [Path(p) for p in args.input]
    else:
        paths = sorted(Path(args.dir).glob("*.tsv"))
        if not paths:
            raise DataError(f"no *.tsv files in {args.dir}")
    for p in paths:
        if not p.is_file():
            raise DataError(f"no such file: {p}")
    return paths


def _family_map(path) -> dict[str, str] | None:
    return corpus.load_family_map(path) if path else None


# -- subcommands ---------------------------------------------------------------


def cmd_split(args) -> dict:
    spec = SplitSpec(Mode(args.mode), args.proportions, args.seed)
    paths = _inputs(args)
    if args.language and len(paths) > 1:
        raise DataError("--language only applies to a single input")

    def one(path: Path) -> dict:
        ds = corpus.read_dataset(path, args.language, normalize=not args.no_normalize)
        result = splitter.split(ds, spec)
        files = splitter.write_split(result, args.out)
        log.info("%s: %s", ds.language, result.counts())
        return {
            "language": ds.language,
            "counts": result.counts(),
            "tables": result.table_counts(),
            "files": [str(f) for f in files],
        }

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        done = list(pool.map(one, paths))
    for d in done:
        c = d["counts"]
        print(f"{d['language']}: train={c['train']} dev={c['dev']} test={c['test']}", file=sys.stderr)
    return {"command": "split", **spec.to_dict(), "languages": done}


def cmd_verify(args) -> dict:
    languages = [args.language] if args.language else splitter.split_languages(args.dir)
    if not languages:
        raise DataError(f"no *.split.json provenance files in {args.dir}")
    reports = []
    for lang in languages:
        result = splitter.read_split(args.dir, lang, normalize=not args.no_normalize)
        rep = splitter.verify_split(result, args.mode)
        reports.append(rep)
        if not args.json:
            for v in rep.violations:
                print(f"{lang}\t{v.kind}\t{v.item}\t{','.join(v.parts)}")
    total = sum(len(r.violations) for r in reports)
    if not args.json:
        print(f"{'OK' if total == 0 else 'FAIL'}, {total} violations")
    summary = {"command": "verify", "passed": total == 0, "reports": [r.to_dict() for r in reports]}
    if total:
        summary["_exit"] = 1
    return summary


def cmd_stats(args) -> dict:
    stats = []
    for path in _inputs(args):
        ds = corpus.read_dataset(path, normalize=not args.no_normalize)
        s = corpus.dataset_stats(ds)
        stats.append(s.to_dict())
        if not args.json:
            print(
                f"{s.language}\ttriplets={s.triplets}\ttables={s.tables}\t"
                f"table_size={s.min_table_size}/{s.mean_table_size:.2f}/{s.max_table_size}\t"
                f"bundles={s.distinct_bundles}"
            )
    return {"command": "stats", "stats": stats}


def cmd_eval(args) -> dict:
    normalize = not args.no_normalize
    gold = corpus.read_dataset(args.gold, args.language, normalize=normalize)
    preds = metrics.read_predictions(args.pred)
    metrics.check_alignment(gold, preds, normalize=normalize)
    system = args.system or corpus.language_from_path(args.pred)
    result = metrics.evaluate(gold, [p.form for p in preds], system, args.mode, normalize)
    if args.out:
        atomic_write(args.out, metrics.write_results([result]))
    if not args.json:
        print(
            f"{result.language}\t{result.system}\t{result.split_mode}\t"
            f"acc={result.accuracy:.4f}\ted={result.mean_edit_distance:.4f}\tn={result.n}"
        )
    return {"command": "eval", "result": result.to_dict()}


def cmd_baseline_train(args) -> dict:
    ds = corpus.read_dataset(args.input, normalize=not args.no_normalize)
    model = baseline.train(ds, memorize=args.memorize)
    model.save(args.model)
    n_rules = sum(len(rs) for rs in model.rules.values())
    print(f"{ds.language}: {n_rules} rules over {len(model.rules)} bundles", file=sys.stderr)
    return {"command": "baseline-train", "rules": n_rules, "bundles": len(model.rules),
            "memorize": model.memorize, "model": str(args.model)}


def cmd_baseline_predict(args) -> dict:
    model = baseline.RuleModel.load(args.model)
    ds = corpus.read_dataset(args.input, normalize=not args.no_normalize)
    forms = baseline.predict_dataset(model, ds)
    lines = "".join(f"{t.lemma}\t{f}\t{t.bundle}\n" for t, f in zip(ds.triplets, forms))
    atomic_write(args.out, lines)
    return {"command": "baseline-predict", "predictions": len(forms), "out": str(args.out)}


def _load_results(paths) -> list[metrics.EvalResult]:
    out = []
    for p in paths:
        p = Path(p)
        files = sorted(p.glob("*.json")) if p.is_dir() else [p]
        for f in files:
            out.extend(metrics.load_results(f))
    return out


def _abbreviations(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        name, sep, tag = item.rpartition("=")
        if not sep or not name:
            raise DataError(f"--abbrev expects SYSTEM=TAG, got {item!r}")
        out[name] = tag
    return out


def cmd_report_family(args) -> dict:
    results = _load_results(args.results)
    families = corpus.load_family_map(args.families)
    aggs = report.aggregate_by_family(results, families, args.min_languages)
    table = report.format_family_table(aggs, _abbreviations(args.abbrev))
    payload = [a.to_dict() for a in aggs]
    if args.out:
        atomic_write(args.out, report.to_json(payload))
    if not args.json:
        print(table, end="")
    return {"command": "report-family", "families": payload}


def _train_sizes(args) -> dict[str, int]:
    if args.train_sizes:
        data = json.loads(Path(args.train_sizes).read_text(encoding="utf-8"))
        return {k: int(v) for k, v in data.items()}
    sizes = {}
    for f in sorted(Path(args.train_dir).glob("*.trn")):
        sizes[corpus.language_from_path(f)] = len(corpus.read_dataset(f))
    return sizes


def cmd_report_drop(args) -> dict:
    form = _load_results(args.form)
    lemma = _load_results(args.lemma)
    rep = report.drop_records(
        form, lemma, _train_sizes(args), _family_map(args.families), args.min_languages
    )
    if args.out:
        atomic_write(args.out, report.drop_csv(rep))
    if args.json_out:
        atomic_write(args.json_out, report.to_json(rep.to_dict()))
    if not args.json:
        for system, d in rep.system_drop.items():
            print(f"{system}\tdrop={d:.4f}")
        print(f"overall\tdrop={rep.overall_drop:.4f}")
    return {"command": "report-drop", **rep.to_dict()}


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="lemmasplit",
        description="Lemma-disjoint re-splitting and evaluation of morphological inflection data.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--no-normalize", action="store_true", help="disable NFC normalization")
    common.add_argument("--json", action="store_true", help="print a JSON run summary on stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    def source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--input", nargs="+", help="UniMorph TSV file(s)")
        g.add_argument("--dir", help="directory of <lang>.tsv files")

    p = sub.add_parser("split", parents=[common], help="write train/dev/test files")
    source(p)
    p.add_argument("--mode", choices=[m.value for m in Mode], required=True)
    p.add_argument("--proportions", type=_proportions, default="0.7,0.1,0.2",
                   help="train,dev,test fractions summing exactly to 1 (default 0.7,0.1,0.2)")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--language", help="language code (default: file name stem)")
    p.add_argument("--jobs", type=int, default=1, help="languages processed in parallel")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("verify", parents=[common], help="check a split directory for leakage")
    p.add_argument("--dir", required=True)
    p.add_argument("--mode", choices=[m.value for m in Mode],
                   help="disjointness to check (default: the split's own mode)")
    p.add_argument("--language")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", parents=[common], help="dataset statistics")
    source(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", parents=[common], help="score a prediction file")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--system", help="system name (default: prediction file stem)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default="form",
                   help="split the gold file comes from (default form)")
    p.add_argument("--language")
    p.add_argument("--out", help="write the EvalResult JSON here")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("baseline-train", parents=[common], help="train the rule baseline")
    p.add_argument("--input", required=True)
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--memorize", action="store_true")
    p.set_defaults(func=cmd_baseline_train)

    p = sub.add_parser("baseline-predict", parents=[common], help="inflect with a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True, help="UniMorph TSV whose lemma/features are queried")
    p.add_argument("--out", required=True, help="prediction TSV")
    p.set_defaults(func=cmd_baseline_predict)

    p = sub.add_parser("report-family", parents=[common], help="per-family aggregate table")
    p.add_argument("--results", nargs="+", required=True, help="EvalResult JSON files or dirs")
    p.add_argument("--families", required=True, help="language->family map (JSON or TSV)")
    p.add_argument("--min-languages", type=int, default=3)
    p.add_argument("--abbrev", nargs="*", metavar="SYSTEM=TAG")
    p.add_argument("--out", help="write aggregates as JSON")
    p.set_defaults(func=cmd_report_family)

    p = sub.add_parser("report-drop", parents=[common], help="form-vs-lemma drop records")
    p.add_argument("--form", nargs="+", required=True, help="form-split EvalResult JSON files or dirs")
    p.add_argument("--lemma", nargs="+", required=True, help="lemma-split EvalResult JSON files or dirs")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--train-sizes", help="JSON map language -> form-split train examples")
    g.add_argument("--train-dir", help="form-split directory; sizes counted from <lang>.trn")
    p.add_argument("--families")
    p.add_argument("--min-languages", type=int, default=3)
    p.add_argument("--out", help="CSV output")
    p.add_argument("--json-out", help="JSON output")
    p.set_defaults(func=cmd_report_drop)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        summary = args.func(args)
    except (DataError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    code = summary.pop("_exit", 0)
    if args.json:
        print(json.dumps(summary, indent=2, ensure_ascii=False))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
