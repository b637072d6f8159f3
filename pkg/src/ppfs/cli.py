"""Command-line interface: select, bench and synth subcommands.

Exit codes: 0 success, 1 runtime failure, 2 flag or configuration error.
All numeric output is a pure function of the flags; omitting --seed draws
one from entropy and echoes it in the report so the run can be replayed.
Progress notes go to stderr, data to stdout or --output only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .dataset import TaskKind, load_csv
from .ppi import ConfigError, PpiConfig
from .selection import PpfsConfig, SelectionReport, select
from .synth import (
    LINEAR_GAUSSIAN,
    THRESHOLD_BINARY,
    BnSpec,
    RecoveryScore,
    SynthError,
    benchmark,
    recovery_trials,
)
from .tree import LearnerSpec, ModelError


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--b", type=int, default=10, help="number of train/test copies per test")
    p.add_argument("--k", type=int, default=0, help="aggregation folds (0 disables aggregation)")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level")
    p.add_argument("--test-fraction", type=float, default=0.2, help="held-out fraction per copy")
    p.add_argument("--seed", type=int, default=None, help="master seed (default: drawn from entropy)")
    p.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                   help="worker threads; results are identical for any value")
    p.add_argument("--shrink-mode", choices=["improved", "restart"], default="improved")
    p.add_argument("--fold-mode", choices=["subset", "complement"], default="subset")
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples-split", type=int, default=2)
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.add_argument("--output", default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=["json", "csv", "text"], default="json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ppfs", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sel = sub.add_parser("select", help="select features from a CSV dataset")
    p_sel.add_argument("--input", required=True, help="CSV file with a header row")
    p_sel.add_argument("--target", required=True, help="target column name")
    p_sel.add_argument("--task", required=True, choices=["classification", "regression"])
    _add_common(p_sel)

    p_bench = sub.add_parser("bench", help="baseline vs selected features under outer CV")
    p_bench.add_argument("--input", required=True)
    p_bench.add_argument("--target", required=True)
    p_bench.add_argument("--task", required=True, choices=["classification", "regression"])
    p_bench.add_argument("--cv-folds", type=int, default=5)
    _add_common(p_bench)

    p_syn = sub.add_parser("synth", help="blanket recovery on generated ground-truth data")
    p_syn.add_argument("--samples", type=int, default=2000)
    p_syn.add_argument("--parents", type=int, default=2)
    p_syn.add_argument("--children", type=int, default=1)
    p_syn.add_argument("--spouses", type=int, default=1)
    p_syn.add_argument("--noise", type=int, default=6)
    p_syn.add_argument("--noise-std", type=float, default=1.0)
    p_syn.add_argument("--coef-low", type=float, default=0.8)
    p_syn.add_argument("--coef-high", type=float, default=1.2)
    p_syn.add_argument("--spouse-scale", type=float, default=None,
                       help="spouse-to-target edge scale (default: built-in)")
    p_syn.add_argument("--link", choices=[LINEAR_GAUSSIAN, THRESHOLD_BINARY], default=LINEAR_GAUSSIAN)
    p_syn.add_argument("--replicates", type=int, default=1)
    _add_common(p_syn)

    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be non-negative")
        return args.seed
    seed = int(np.random.SeedSequence().entropy) & 0xFFFFFFFF
    print(f"ppfs: seed drawn from entropy: {seed}", file=sys.stderr)
    return seed


def _make_ppfs_config(args, seed: int) -> PpfsConfig:
    learner = LearnerSpec(
        max_depth=args.max_depth,
        min_samples_split=args.min_samples_split,
        min_samples_leaf=args.min_samples_leaf,
    )
    ppi = PpiConfig(
        b=args.b,
        learner=learner,
        test_fraction=args.test_fraction,
        alpha=args.alpha,
        seed=seed,
    )
    return PpfsConfig(
        ppi=ppi,
        k=args.k,
        alpha=args.alpha,
        fold_mode=args.fold_mode,
        shrink_mode=args.shrink_mode,
        seed=seed,
    )


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def _select_text(report: SelectionReport) -> str:
    lines = [f"selected {len(report.selected)} feature(s)"]
    for d in report.details:
        lines.append(f"  {d['name']}: p={d['p_value']:.6g} importance={d['importance']:.4g}")
    if report.ensemble is not None:
        lines.append(f"winner fold: {report.ensemble['winner']} z={report.ensemble['z']}")
    lines.append(f"seed: {report.config['seed']}")
    return "\n".join(lines)


def _select_csv(report: SelectionReport) -> str:
    lines = ["name,p_value,importance"]
    for d in report.details:
        lines.append(f"{d['name']},{d['p_value']:.12g},{d['importance']:.12g}")
    return "\n".join(lines)


def _synth_payload(args, scores: list[tuple[int, RecoveryScore]], spec: BnSpec, seed: int) -> dict:
    f1s = [s.f1 for _, s in scores]
    return {
        "replicates": [
            {
                "replicate": r,
                "precision": s.precision,
                "recall": s.recall,
                "f1": s.f1,
                "selected": sorted(s.selected),
                "truth": sorted(s.truth),
            }
            for r, s in scores
        ],
        "summary": {
            "mean_f1": float(np.mean(f1s)),
            "min_f1": float(np.min(f1s)),
            "max_f1": float(np.max(f1s)),
        },
        "spec": {
            "samples": spec.n_samples,
            "parents": spec.n_parents,
            "children": spec.n_children,
            "spouses": spec.n_spouses,
            "noise": spec.n_noise,
            "link": spec.target_link,
            "seed": spec.seed,
        },
        "config": {"b": args.b, "k": args.k, "alpha": args.alpha, "seed": seed},
    }


def _synth_text(payload: dict) -> str:
    lines = []
    for row in payload["replicates"]:
        lines.append(
            f"replicate {row['replicate']}: f1={row['f1']:.4f} "
            f"precision={row['precision']:.4f} recall={row['recall']:.4f} "
            f"selected={','.join(row['selected']) or '-'}"
        )
    s = payload["summary"]
    lines.append(f"f1 mean={s['mean_f1']:.4f} min={s['min_f1']:.4f} max={s['max_f1']:.4f}")
    return "\n".join(lines)


def _synth_csv(payload: dict) -> str:
    lines = ["replicate,precision,recall,f1"]
    for row in payload["replicates"]:
        lines.append(f"{row['replicate']},{row['precision']:.6g},{row['recall']:.6g},{row['f1']:.6g}")
    s = payload["summary"]
    lines += ["", "mean_f1,min_f1,max_f1", f"{s['mean_f1']:.6g},{s['min_f1']:.6g},{s['max_f1']:.6g}"]
    return "\n".join(lines)


def _run_select(args) -> int:
    seed = _resolve_seed(args)
    cfg = _make_ppfs_config(args, seed)
    ds = load_csv(args.input, args.target, TaskKind(args.task))
    report = select(ds, cfg, jobs=args.jobs)
    if args.format == "json":
        _emit(report.to_json(), args.output)
    elif args.format == "csv":
        _emit(_select_csv(report), args.output)
    else:
        _emit(_select_text(report), args.output)
    return 0


def _run_bench(args) -> int:
    seed = _resolve_seed(args)
    cfg = _make_ppfs_config(args, seed)
    if args.cv_folds < 2:
        raise ConfigError("--cv-folds must be >= 2")
    ds = load_csv(args.input, args.target, TaskKind(args.task))
    report = benchmark(ds, cfg, cv_folds=args.cv_folds, jobs=args.jobs)
    if args.format == "json":
        _emit(report.to_json(), args.output)
    elif args.format == "csv":
        _emit(report.to_csv(), args.output)
    else:
        _emit(
            f"{report.dataset}: {report.metric} all={report.baseline:.4f} "
            f"ppfs={report.ppfs:.4f} features {report.selected_mode}/{report.total_features}",
            args.output,
        )
    return 0


def _run_synth(args) -> int:
    seed = _resolve_seed(args)
    if args.replicates < 1:
        raise ConfigError("--replicates must be >= 1")
    cfg = _make_ppfs_config(args, seed)
    spec = BnSpec(
        n_samples=args.samples,
        n_parents=args.parents,
        n_children=args.children,
        n_spouses=args.spouses,
        n_noise=args.noise,
        coef_range=(args.coef_low, args.coef_high),
        noise_std=args.noise_std,
        target_link=args.link,
        seed=seed,
    )
    if args.spouse_scale is not None:
        spec = replace(spec, spouse_target_scale=args.spouse_scale)
    scores = recovery_trials(spec, cfg, args.replicates, jobs=args.jobs)
    payload = _synth_payload(args, scores, spec, seed)
    if args.format == "json":
        _emit(json.dumps(payload, indent=2), args.output)
    elif args.format == "csv":
        _emit(_synth_csv(payload), args.output)
    else:
        _emit(_synth_text(payload), args.output)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0

    runners = {"select": _run_select, "bench": _run_bench, "synth": _run_synth}
    try:
        return runners[args.command](args)
    except (ConfigError, ModelError, SynthError) as exc:
        # flag or configuration invariant violations are usage errors
        print(f"ppfs: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure: bad data, impossible split, ...
        print(f"ppfs: error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
