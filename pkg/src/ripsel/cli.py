"""Command-line interface: ``ripsel <verb> ...``.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, fields, replace
from pathlib import Path

from . import ard
from .coil import load_coil
from .data import load_csv, write_csv
from .errors import ConfigurationError, RipselError
from .harness import (ARD_RIP, KINDS, ArdConfig, FittedPipeline, PcaConfig, Pipeline,
                      evaluate, fit_pipeline, report_csv, run_benchmark, write_report)
from .missingness import PAPER_LEVELS, InjectionPlan, inject_mcar
from .ripper import RipperConfig
from .synthetic import make_benchmark_data

log = logging.getLogger("ripsel")


def _from_dict(cls, d):
    known = {f.name for f in fields(cls)}
    unknown = set(d) - known
    if unknown:
        raise ConfigurationError(f"unknown {cls.__name__} keys: {sorted(unknown)}")
    return cls(**d)


def load_config(path) -> dict:
    """Read a JSON config with optional ``ripper``, ``pca`` and ``ard`` sections."""
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigurationError("config must be a JSON object")
    return cfg


def default_config() -> dict:
    return {"ripper": asdict(RipperConfig()), "pca": asdict(PcaConfig()),
            "ard": asdict(ArdConfig())}


def build_pipeline(kind: str, cfg: dict, seed: int) -> Pipeline:
    rc = replace(_from_dict(RipperConfig, cfg.get("ripper", {})), seed=seed)
    if kind == "pca_rip":
        return Pipeline(kind, rc, pca_config=_from_dict(PcaConfig, cfg.get("pca", {})))
    if kind == ARD_RIP:
        a = dict(cfg.get("ard", {}))
        train = a.pop("train", {})
        if "alpha_clip" in train:
            train["alpha_clip"] = tuple(train["alpha_clip"])
        tc = replace(_from_dict(ard.TrainConfig, train), seed=seed)
        return Pipeline(kind, rc, ard_config=replace(_from_dict(ArdConfig, a), train=tc))
    return Pipeline(kind, rc)


def _add_csv_options(p):
    p.add_argument("--class-column", default=None, help="class column name (default: last)")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--missing-marker", default="?")
    p.add_argument("--drop", nargs="*", default=(), help="columns to ignore")


def _read(path, args):
    return load_csv(path, delimiter=args.delimiter, missing_marker=args.missing_marker,
                    class_column=args.class_column, drop_columns=args.drop)


def cmd_train(args, cfg):
    train = _read(args.train, args)
    fitted = fit_pipeline(build_pipeline(args.pipeline, cfg, args.seed), train)
    Path(args.out).write_text(json.dumps(fitted.to_dict()))
    print(f"{args.pipeline}: {len(fitted.ruleset)} rules on {fitted.n_features_used} features "
          f"-> {args.out}")


def _load_model(path) -> FittedPipeline:
    try:
        return FittedPipeline.from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise ConfigurationError(f"cannot read model {path}: {exc}") from exc


def cmd_evaluate(args, cfg):
    fitted = _load_model(args.model)
    print(f"accuracy {evaluate(fitted, _read(args.test, args)):.6f}")


def cmd_inject(args, cfg):
    data = _read(args.input, args)
    plan = InjectionPlan(args.rate, args.scope, args.seed, exact=args.exact)
    write_csv(inject_mcar(data, plan), args.output, delimiter=args.delimiter,
              missing_marker=args.missing_marker,
              class_column=args.class_column or "class")


def _bench_data(args):
    if args.coil:
        return load_coil(args.coil)
    if args.train or args.test:
        if not (args.train and args.test):
            raise ConfigurationError("--train and --test go together")
        return _read(args.train, args), _read(args.test, args)
    return make_benchmark_data(args.n_train, args.n_test, args.n_features, args.n_informative,
                               seed=args.seed)


def cmd_bench(args, cfg):
    train, test = _bench_data(args)
    pipelines = [build_pipeline(k, cfg, args.seed) for k in args.pipelines]
    report = run_benchmark(train, test, pipelines, args.levels, args.seed,
                           include_baseline=not args.no_baseline)
    if args.out:
        write_report(report, args.out, args.format)
    else:
        sys.stdout.write(report_csv(report) if args.format == "csv"
                         else json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for k, acc in report.overall.items():
        log.info("%s overall accuracy %.4f", k, acc)


def cmd_inspect_rules(args, cfg):
    sys.stdout.write(_load_model(args.model).ruleset.to_text())


def _print_relevance(names, models, kept):
    kept = set(kept)
    print("attribute\trelevance\talpha\tkept")
    for block, model in models:
        for i, j in enumerate(block):
            print(f"{names[j]}\t{model.relevance[i]:.6g}\t{model.alphas[i]:.6g}\t"
                  f"{'yes' if j in kept else 'no'}")


def cmd_inspect_relevance(args, cfg):
    fitted = _load_model(args.model)
    if fitted.kind != ARD_RIP:
        raise ConfigurationError("inspect-relevance needs an ard_rip model")
    _print_relevance(fitted.input_names, fitted.ard_models, fitted.kept)


def cmd_ard(args, cfg):
    train = _read(args.train, args)
    tc = ard.TrainConfig(epochs=args.epochs, learning_rate=args.learning_rate, seed=args.seed)
    kept, models = ard.run_grouped_ard(train, args.groups, args.hidden, tc, args.threshold)
    _print_relevance(train.feature_names, models, kept)
    if args.out:
        Path(args.out).write_text(json.dumps({
            "kept": kept,
            "kept_names": [train.feature_names[k] for k in kept],
            "groups": [{"block": b, "model": m.to_dict()} for b, m in models],
        }))


def cmd_config(args, cfg):
    print(json.dumps(default_config(), indent=2))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ripsel", description="RIPPER rule induction with PCA or ARD attribute selection, "
                                   "benchmarked under injected MCAR missingness.")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--config", help="JSON file overriding ripper/pca/ard defaults")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a pipeline and save it as JSON")
    p.add_argument("--pipeline", choices=KINDS, default="ripper")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    _add_csv_options(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="accuracy of a saved pipeline on a CSV file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    _add_csv_options(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("inject", help="write a copy of a CSV file with MCAR gaps")
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--scope", choices=("all", "half"), default="all")
    p.add_argument("--exact", action="store_true", help="mask an exact cell count")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", dest="output", required=True)
    _add_csv_options(p)
    p.set_defaults(func=cmd_inject)

    p = sub.add_parser("bench", help="run the missingness benchmark")
    p.add_argument("--train")
    p.add_argument("--test")
    p.add_argument("--coil", metavar="DIR", help="directory with the CoIL 2000 files")
    p.add_argument("--pipelines", nargs="+", choices=KINDS, default=list(KINDS))
    p.add_argument("--levels", nargs="+", type=float, default=list(PAPER_LEVELS))
    p.add_argument("--no-baseline", action="store_true")
    p.add_argument("--n-train", type=int, default=2000)
    p.add_argument("--n-test", type=int, default=1000)
    p.add_argument("--n-features", type=int, default=40)
    p.add_argument("--n-informative", type=int, default=10)
    p.add_argument("--out")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_csv_options(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("inspect-rules", help="print a saved pipeline's rule list")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect_rules)

    p = sub.add_parser("inspect-relevance", help="print ARD relevance of a saved ard_rip model")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_inspect_relevance)

    p = sub.add_parser("ard", help="run ARD attribute selection on a CSV file")
    p.add_argument("--train", required=True)
    p.add_argument("--hidden", type=int, default=8)
    p.add_argument("--epochs", type=int, default=1000)
    p.add_argument("--learning-rate", type=float, default=ard.TrainConfig.learning_rate)
    p.add_argument("--groups", type=int, default=1)
    p.add_argument("--threshold", type=float, default=0.01)
    p.add_argument("--out")
    _add_csv_options(p)
    p.set_defaults(func=cmd_ard)

    p = sub.add_parser("config", help="print the default configuration as JSON")
    p.set_defaults(func=cmd_config)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args, load_config(args.config))
    except RipselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
