"""Command-line orchestration for the recall early-warning pipeline."""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import evaluation, features, ingest, labeling, model, synth
from .features import FEATURE_NAMES
from .lexicon import LexiconError, load_drug_lexicon, load_symptom_lexicon

THREADS_ENV = "RECALL_SENTINEL_THREADS"


class CliError(Exception):
    pass


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: list[Path]) -> None:
    payload = {
        "command": command,
        "config": config,
        "seed": config.get("seed"),
        "inputs": {str(p): _sha256(p) for p in inputs if p is not None},
    }
    payload["config_hash"] = hashlib.sha256(
        json.dumps(config, sort_keys=True).encode()).hexdigest()
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def _load_config_file(path) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise CliError(f"config file not found: {p}")
    with open(p, encoding="utf-8") as f:
        obj = json.load(f)
    if not isinstance(obj, dict):
        raise CliError(f"config file must hold a JSON object: {p}")
    return obj


def _resolve(args, cfg: dict, name: str, default=None):
    """Flag value wins over config-file value wins over default."""
    value = getattr(args, name.replace("-", "_"), None)
    if value is not None:
        return value
    return cfg.get(name, default)


def _require_file(path, what: str) -> Path:
    if path is None:
        raise CliError(f"missing required {what}")
    p = Path(path)
    if not p.exists():
        raise CliError(f"{what} not found: {p}")
    return p


def _out_dir(args) -> Path:
    if args.out is None:
        raise CliError("missing --out directory")
    p = Path(args.out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) + "\n")


def _write_svg(path: Path, series: list[tuple[float, float]], title: str,
               xlabel: str, ylabel: str) -> None:
    """Minimal deterministic line chart; convenience only."""
    w, h, pad = 640, 420, 56
    xs = [p[0] for p in series]
    ys = [p[1] for p in series]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1

    def sx(x):
        return pad + (x - x0) / (x1 - x0) * (w - 2 * pad)

    def sy(y):
        return h - pad - (y - y0) / (y1 - y0) * (h - 2 * pad)

    pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in series)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w/2:.0f}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<line x1="{pad}" y1="{h-pad}" x2="{w-pad}" y2="{h-pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h-pad}" stroke="black"/>',
        f'<text x="{w/2:.0f}" y="{h-16}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{h/2:.0f}" font-size="12" transform="rotate(-90 16 {h/2:.0f})" '
        f'text-anchor="middle">{ylabel}</text>',
        f'<text x="{pad}" y="{h-pad+16}" font-size="10">{x0:g}</text>',
        f'<text x="{w-pad}" y="{h-pad+16}" font-size="10" text-anchor="end">{x1:g}</text>',
        f'<text x="{pad-4}" y="{h-pad}" font-size="10" text-anchor="end">{y0:g}</text>',
        f'<text x="{pad-4}" y="{pad}" font-size="10" text-anchor="end">{y1:g}</text>',
        f'<polyline points="{pts}" fill="none" stroke="#1f6fb2" stroke-width="1.5"/>',
        "</svg>",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _load_recalls(path: Path, window: ingest.StudyWindow):
    with open(path, encoding="utf-8") as f:
        recalls, errors = ingest.parse_recall_file(f, window=window)
    if errors:
        msgs = "; ".join(f"line {ln}: {msg}" for ln, msg in errors[:5])
        raise CliError(f"{path}: {len(errors)} bad recall rows ({msgs})")
    return recalls


# ---------------------------------------------------------------------------
# subcommands

def _cmd_synth(args, cfg):
    out = _out_dir(args)
    fields = {f.name for f in dataclasses.fields(synth.SynthConfig)}
    config = synth.SynthConfig(**{k: v for k, v in cfg.items() if k in fields})
    if args.seed is not None:
        config.seed = args.seed
    if args.gamma is not None:
        config.injection_gamma = args.gamma
    result = synth.generate(config)
    ingest.write_cube_csv(result.cube, out / "cube.csv")
    ingest.write_recalls_jsonl(result.recalls, out / "recalls.jsonl",
                               state_universe=ingest.US_STATES[:config.n_states])
    synth.write_truth_json(result.truth, out / "truth.json")
    synth.write_drug_lexicon_csv(result.drug_entries, out / "drug_lexicon.csv")
    synth.write_symptom_lexicon(result.symptom_lexicon, out / "symptoms.txt")
    if args.emit_query_log:
        synth.write_query_log_jsonl(synth.expand_query_log(result), out / "querylog.jsonl")
    config_dict = dataclasses.asdict(config)
    with open(out / "synth_config.json", "w", encoding="utf-8") as f:
        json.dump(config_dict, f, indent=1, sort_keys=True, default=list)
        f.write("\n")
    _write_manifest(out, "synth", json.loads(json.dumps(config_dict, default=list)), [])
    print(f"synth: wrote desk scenario to {out}")
    return 0


def _cmd_ingest(args, cfg):
    out = _out_dir(args)
    queries = _require_file(_resolve(args, cfg, "queries"), "query log")
    drug_path = _require_file(_resolve(args, cfg, "drug_lexicon"), "drug lexicon")
    symptom_path = _require_file(_resolve(args, cfg, "symptom_lexicon"), "symptom lexicon")
    min_queries = int(_resolve(args, cfg, "min_queries", 1000))
    n_days = int(_resolve(args, cfg, "n_days", ingest.DEFAULT_STUDY_DAYS))
    window = ingest.StudyWindow(n_days=n_days)
    drugs = load_drug_lexicon(drug_path)
    symptoms = load_symptom_lexicon(symptom_path)
    with open(queries, encoding="utf-8") as f:
        records, errors = ingest.parse_query_log(f, window)
    cube = ingest.build_count_cube(records, drugs, symptoms, window)
    cube = ingest.filter_drugs(cube, min_queries)
    ingest.write_cube_csv(cube, out / "cube.csv")
    with open(out / "row_errors.json", "w", encoding="utf-8") as f:
        json.dump([{"line": ln, "error": msg} for ln, msg in errors], f, indent=1)
        f.write("\n")
    config = {"min_queries": min_queries, "n_days": n_days}
    _write_manifest(out, "ingest", config, [queries, drug_path, symptom_path])
    print(f"ingest: {len(records)} records, {len(errors)} row errors, "
          f"{len(cube.drugs())} drugs kept")
    return 0


def _cmd_featurize(args, cfg):
    out = _out_dir(args)
    cube_path = _require_file(_resolve(args, cfg, "cube"), "count cube")
    recalls_path = _require_file(_resolve(args, cfg, "recalls"), "recall file")
    n_days = int(_resolve(args, cfg, "n_days", ingest.DEFAULT_STUDY_DAYS))
    window = ingest.StudyWindow(n_days=n_days)
    cube = ingest.read_cube_csv(cube_path, n_days)
    recalls = _load_recalls(recalls_path, window)
    rows = features.extract_all_features(cube)
    rows = features.apply_censoring(rows, recalls, window)
    features.write_features_csv(rows, out / "features.csv")
    config = {"n_days": n_days}
    _write_manifest(out, "featurize", config, [cube_path, recalls_path])
    print(f"featurize: {len(rows)} rows after censoring")
    return 0


def _pipeline_inputs(args, cfg):
    feats_path = _require_file(_resolve(args, cfg, "features"), "feature file")
    recalls_path = _require_file(_resolve(args, cfg, "recalls"), "recall file")
    n_days = int(_resolve(args, cfg, "n_days", ingest.DEFAULT_STUDY_DAYS))
    window = ingest.StudyWindow(n_days=n_days)
    rows = features.read_features_csv(feats_path)
    recalls = _load_recalls(recalls_path, window)
    return feats_path, recalls_path, window, rows, recalls


def _cmd_train(args, cfg):
    out = _out_dir(args)
    feats_path, recalls_path, window, rows, recalls = _pipeline_inputs(args, cfg)
    horizon = int(_resolve(args, cfg, "horizon", 1))
    k = int(_resolve(args, cfg, "k", model.DEFAULT_K))
    lam = float(_resolve(args, cfg, "lambda", model.DEFAULT_LAMBDA))
    seed = int(_resolve(args, cfg, "seed", 0))
    train_end = int(_resolve(args, cfg, "train_end_day", labeling.DEFAULT_TRAIN_END_DAY))
    examples = labeling.label_examples(rows, recalls, horizon, window)
    examples = labeling.post_recall_exclusion(examples, recalls, window)
    split = labeling.split_by_time(examples, train_end)
    X, y = labeling.to_arrays(split.train)
    ensemble = model.train_ensemble(X, y, k=k, ridge_lambda=lam, seed=seed)
    model.save_ensemble(ensemble, out / "model.json")
    labeling.write_labeled_csv(examples, out / "labeled.csv")
    config = {"horizon": horizon, "k": k, "lambda": lam, "seed": seed,
              "train_end_day": train_end, "n_days": window.n_days}
    _write_manifest(out, "train", config, [feats_path, recalls_path])
    print(f"train: {ensemble.n_members} members on {len(split.train)} examples "
          f"({int(y.sum())} positives)")
    return 0


def _cmd_score(args, cfg):
    out = _out_dir(args)
    model_path = _require_file(_resolve(args, cfg, "model"), "trained model artifact")
    feats_path = _require_file(_resolve(args, cfg, "features"), "feature file")
    prune = _resolve(args, cfg, "prune")
    ensemble = model.load_ensemble(model_path)
    rows = features.read_features_csv(feats_path)
    X = np.array([r.attrs for r in rows])
    scores = model.ensemble_scores(ensemble, X, prune_m=int(prune) if prune else None)
    _write_csv(out / "scores.csv", ["drug", "state", "day", "score"],
               [(r.drug, r.state, r.day, float(s)) for r, s in zip(rows, scores)])
    _write_manifest(out, "score", {"prune": prune}, [model_path, feats_path])
    print(f"score: wrote {len(rows)} scores")
    return 0


def _state_recall_counts(recalls, window, out: Path):
    # Figure-1 style table; recalls covering every observed state are excluded
    universe = {s for r in recalls for s in r.states}
    counts: dict[str, int] = {}
    for r in recalls:
        if r.states == universe and len(universe) > 1:
            continue
        for s in r.states:
            counts[s] = counts.get(s, 0) + 1
    _write_csv(out / "state_recall_counts.csv", ["state", "recalls"],
               sorted(counts.items()))


def _cmd_evaluate(args, cfg):
    out = _out_dir(args)
    model_path = _require_file(_resolve(args, cfg, "model"), "trained model artifact")
    feats_path, recalls_path, window, rows, recalls = _pipeline_inputs(args, cfg)
    horizon = int(_resolve(args, cfg, "horizon", 1))
    train_end = int(_resolve(args, cfg, "train_end_day", labeling.DEFAULT_TRAIN_END_DAY))
    fraction = float(_resolve(args, cfg, "lift_fraction", evaluation.DEFAULT_LIFT_FRACTION))
    prune = _resolve(args, cfg, "prune")
    prune_m = int(prune) if prune else None
    ensemble = model.load_ensemble(model_path)
    examples = labeling.label_examples(rows, recalls, horizon, window)
    examples = labeling.post_recall_exclusion(examples, recalls, window)
    split = labeling.split_by_time(examples, train_end)
    X_test, y_test = labeling.to_arrays(split.test)
    scores = model.ensemble_scores(ensemble, X_test, prune_m=prune_m)
    keys = [e.key for e in split.test]
    roc = evaluation.roc_auc(scores, y_test)
    lift = evaluation.lift_at(scores, y_test, fraction, keys)
    grid = [t / 100 for t in range(1, 101)]
    curve = evaluation.lift_curve(scores, y_test, grid, keys)
    strata = evaluation.strata_analysis(split.test, scores, fraction)
    try:
        importance = model.attribute_importance(ensemble)
        importance_out = {
            "fractions": {FEATURE_NAMES[i]: float(v)
                          for i, v in enumerate(importance.fractions)},
            "selected": [FEATURE_NAMES[i] for i in importance.selected],
            "n_valid_members": importance.n_valid_members,
        }
    except model.ModelError:
        importance_out = None
    report = {
        "horizon": horizon,
        "lift_fraction": fraction,
        "prune_m": prune_m,
        "auc": roc.auc,
        "lift": lift.lift,
        "n_test": len(split.test),
        "positives_in_test": int(y_test.sum()),
        "strata": strata.strata,
        "importance": importance_out,
    }
    with open(out / "report.json", "w", encoding="utf-8") as f:
        json.dump(report, f, indent=1, sort_keys=True)
        f.write("\n")
    _write_csv(out / "roc.csv", ["fpr", "tpr"],
               [(float(a), float(b)) for a, b in roc.points])
    _write_csv(out / "lift_curve.csv", ["fraction", "lift"],
               [(float(a), float(b)) for a, b in curve])
    _state_recall_counts(recalls, window, out)
    _write_svg(out / "roc.svg", [(float(a), float(b)) for a, b in roc.points],
               f"ROC (AUC={roc.auc:.3f})", "false positive rate", "true positive rate")
    _write_svg(out / "lift_curve.svg", [(float(a), float(b)) for a, b in curve],
               "Lift vs top fraction", "fraction", "lift")
    config = {"horizon": horizon, "train_end_day": train_end,
              "lift_fraction": fraction, "prune": prune_m, "n_days": window.n_days}
    _write_manifest(out, "evaluate", config, [model_path, feats_path, recalls_path])
    print(f"evaluate: auc={roc.auc:.4f} lift@{fraction:g}={lift.lift:.3f} "
          f"({int(y_test.sum())} test positives)")
    return 0


def _cmd_sweep(args, cfg):
    out = _out_dir(args)
    feats_path, recalls_path, window, rows, recalls = _pipeline_inputs(args, cfg)
    k = int(_resolve(args, cfg, "k", model.DEFAULT_K))
    lam = float(_resolve(args, cfg, "lambda", model.DEFAULT_LAMBDA))
    seed = int(_resolve(args, cfg, "seed", 0))
    train_end = int(_resolve(args, cfg, "train_end_day", labeling.DEFAULT_TRAIN_END_DAY))
    fraction = float(_resolve(args, cfg, "lift_fraction", evaluation.DEFAULT_LIFT_FRACTION))
    horizons = [int(x) for x in str(_resolve(args, cfg, "horizons", "1,3,5,10,20,40")).split(",")]
    base_horizon = int(_resolve(args, cfg, "horizon", 1))

    def one(n):
        return evaluation.run_horizon(rows, recalls, n, k, lam, seed,
                                      train_end, fraction, window)[3]

    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(one, horizons))
    else:
        points = [one(n) for n in horizons]
    _write_csv(out / "lift_vs_n.csv", ["horizon", "auc", "lift", "positives_in_test"],
               [(p.horizon, p.auc, p.lift, p.positives_in_test) for p in points])
    regressions = evaluation.horizon_regressions(points)
    reg_out = {
        name: {
            "slopes": dict(zip(predictors, map(float, r.slopes))),
            "std_errors": dict(zip(predictors, map(float, r.std_errors))),
            "p_values": dict(zip(predictors, map(float, r.p_values))),
            "r_squared": r.r_squared,
            "model_p_value": r.model_p_value,
        }
        for name, (r, predictors) in regressions.items()
    }
    ensemble, split, scores, _ = evaluation.run_horizon(
        rows, recalls, base_horizon, k, lam, seed, train_end, fraction, window)
    m_grid = list(range(1, ensemble.n_members + 1))
    prune_points = evaluation.prune_sweep(ensemble, split.test, m_grid, fraction)
    _write_csv(out / "lift_vs_m.csv", ["clusters_used", "lift"], prune_points)
    with open(out / "sweep_report.json", "w", encoding="utf-8") as f:
        json.dump({"rank_regression": reg_out,
                   "horizons": [dataclasses.asdict(p) for p in points]},
                  f, indent=1, sort_keys=True)
        f.write("\n")
    _write_svg(out / "lift_vs_n.svg", [(p.horizon, p.lift) for p in points],
               "Lift vs predictive horizon", "horizon (days)", f"lift@{fraction:g}")
    _write_svg(out / "lift_vs_m.svg", [(float(m), float(v)) for m, v in prune_points],
               "Lift vs clusters used", "largest clusters used", f"lift@{fraction:g}")
    config = {"k": k, "lambda": lam, "seed": seed, "train_end_day": train_end,
              "lift_fraction": fraction, "horizons": horizons, "horizon": base_horizon}
    _write_manifest(out, "sweep", config, [feats_path, recalls_path])
    lift_reg = reg_out["lift"]
    print(f"sweep: lift slope vs horizon = {lift_reg['slopes']['horizon']:.3f} "
          f"(p={lift_reg['p_values']['horizon']:.4f})")
    return 0


def _cmd_report(args, cfg):
    src = Path(_resolve(args, cfg, "input") or (args.out or "."))
    out = _out_dir(args) if args.out else src
    charts = [
        ("roc.csv", "roc.svg", "ROC", "false positive rate", "true positive rate"),
        ("lift_curve.csv", "lift_curve.svg", "Lift vs top fraction", "fraction", "lift"),
        ("lift_vs_n.csv", "lift_vs_n.svg", "Lift vs predictive horizon",
         "horizon (days)", "lift"),
        ("lift_vs_m.csv", "lift_vs_m.svg", "Lift vs clusters used",
         "largest clusters used", "lift"),
    ]
    rendered = 0
    for csv_name, svg_name, title, xl, yl in charts:
        path = src / csv_name
        if not path.exists():
            continue
        with open(path, encoding="utf-8") as f:
            f.readline()  # header
            series = []
            for line in f:
                parts = line.strip().split(",")
                if len(parts) >= 2:
                    if csv_name == "lift_vs_n.csv":
                        series.append((float(parts[0]), float(parts[2])))
                    else:
                        series.append((float(parts[0]), float(parts[1])))
        if series:
            _write_svg(out / svg_name, series, title, xl, yl)
            rendered += 1
    print(f"report: rendered {rendered} charts to {out}")
    return 0


def _cmd_convert(args, cfg):
    src = _require_file(_resolve(args, cfg, "openfda"), "openFDA enforcement JSON")
    if args.out is None:
        raise CliError("missing --out path for the converted recall JSONL")
    with open(src, encoding="utf-8") as f:
        payload = json.load(f)
    reports = payload.get("results", payload) if isinstance(payload, dict) else payload
    if not isinstance(reports, list):
        raise CliError(f"{src}: expected a JSON array of enforcement reports")
    rows, skipped = ingest.convert_openfda(reports)
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(out_path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row) + "\n")
    print(f"convert: {len(rows)} recalls written, {len(skipped)} reports skipped")
    for i, reason in skipped[:10]:
        print(f"  skipped report {i}: {reason}", file=sys.stderr)
    return 0


# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--config", help="JSON config file; flags override its values")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recall-sentinel",
        description="Predict drug-batch recalls from aggregated search-query time series",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the seeded synthetic desk scenario")
    _add_common(p)
    p.add_argument("--gamma", type=float, help="injection amplitude multiplier")
    p.add_argument("--emit-query-log", action="store_true")
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("ingest", help="aggregate a query log into the count cube")
    _add_common(p)
    p.add_argument("--queries")
    p.add_argument("--drug-lexicon")
    p.add_argument("--symptom-lexicon")
    p.add_argument("--min-queries", type=int)
    p.add_argument("--n-days", type=int)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("featurize", help="extract attributes and apply censoring")
    _add_common(p)
    p.add_argument("--cube")
    p.add_argument("--recalls")
    p.add_argument("--n-days", type=int)
    p.set_defaults(func=_cmd_featurize)

    p = sub.add_parser("train", help="label, split by time, train the ensemble")
    _add_common(p)
    p.add_argument("--features")
    p.add_argument("--recalls")
    p.add_argument("--horizon", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lambda_", type=float)
    p.add_argument("--train-end-day", type=int)
    p.add_argument("--n-days", type=int)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("score", help="score feature rows with a trained model")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--features")
    p.add_argument("--prune", type=int)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("evaluate", help="evaluate a trained model on the test window")
    _add_common(p)
    p.add_argument("--model")
    p.add_argument("--features")
    p.add_argument("--recalls")
    p.add_argument("--horizon", type=int)
    p.add_argument("--train-end-day", type=int)
    p.add_argument("--lift-fraction", type=float)
    p.add_argument("--prune", type=int)
    p.add_argument("--n-days", type=int)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="horizon sweep (full retrain per N) plus prune sweep")
    _add_common(p)
    p.add_argument("--features")
    p.add_argument("--recalls")
    p.add_argument("--horizons", help="comma-separated horizon grid")
    p.add_argument("--horizon", type=int, help="horizon for the prune sweep")
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lambda_", type=float)
    p.add_argument("--train-end-day", type=int)
    p.add_argument("--lift-fraction", type=float)
    p.add_argument("--n-days", type=int)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("report", help="render SVG charts from emitted CSV series")
    _add_common(p)
    p.add_argument("--input", help="directory holding the CSV series")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("convert", help="convert openFDA enforcement JSON to recall JSONL")
    _add_common(p)
    p.add_argument("--openfda")
    p.set_defaults(func=_cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config_file(args.config)
        # --lambda is stored as lambda_; mirror it for _resolve lookups
        if getattr(args, "lambda_", None) is not None:
            setattr(args, "lambda", args.lambda_)
        return args.func(args, cfg)
    except (CliError, LexiconError, ingest.IngestError, features.FeatureError,
            labeling.LabelingError, model.ModelError, evaluation.EvalError,
            synth.SynthError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
