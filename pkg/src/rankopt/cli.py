"""Command line: ``generate``, ``train``, ``evaluate``, ``compare``.

Exit codes: 0 success, 1 runtime failure, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .core import DataError, LabeledDataset, ObjectiveKind, ObjectiveSpec, ThresholdedScorer, load_csv, save_csv
from .data import Generator, SyntheticSpec, generate
from .fbeta_lp import fit_f1_lp
from .metrics import (ScoredSet, exact_precision_at_recall, exact_recall_at_precision,
                      metrics_report, write_pr_csv, write_roc_csv)
from .objectives import fpr_anchors, precision_anchors
from .optimizer import TracePoint, TrainConfig, TrainTrace, train

log = logging.getLogger("rankopt")

EXIT_OK, EXIT_FAILURE, EXIT_BAD_INPUT = 0, 1, 2
# the dense tableau simplex is O(n^2) memory and loses accuracy well before this
LP_MAX_EXAMPLES = 400

CONFIG_KEYS = {"objective", "target", "anchors", "epsilon_cap", "precision_range",
               "lr_primal", "lr_dual", "lr_decay", "l2_reg", "lambda_cap", "steps",
               "batch_size", "seed", "eval_every"}
TRAIN_KEYS = {"lr_primal", "lr_dual", "lr_decay", "l2_reg", "lambda_cap", "steps",
              "batch_size", "seed", "eval_every"}


class BadInput(Exception):
    pass


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise BadInput(f"{path}: no such file") from None
    except json.JSONDecodeError as exc:
        raise BadInput(f"{path}: invalid JSON ({exc})") from None


def _load_data(path, label_column="label") -> LabeledDataset:
    if not Path(path).exists():
        raise BadInput(f"{path}: no such file")
    return load_csv(path, label_column)


def _load_model(path) -> ThresholdedScorer:
    return ThresholdedScorer.from_dict(_read_json(path))


def _load_config(args) -> dict:
    cfg = _read_json(args.config) if args.config else {}
    if not isinstance(cfg, dict):
        raise BadInput("config must be a JSON object")
    unknown = set(cfg) - CONFIG_KEYS
    if unknown:
        raise BadInput(f"unknown config keys: {sorted(unknown)}")
    overrides = {
        "objective": args.objective, "target": args.target, "anchors": args.anchors,
        "epsilon_cap": args.epsilon_cap, "steps": args.steps, "seed": args.seed,
        "batch_size": args.batch_size, "lr_primal": args.lr,
        "precision_range": args.precision_range,
    }
    for flag in ("alpha", "beta"):
        if getattr(args, flag) is not None:
            overrides["target"] = getattr(args, flag)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if "objective" not in cfg:
        raise BadInput("no objective given (--objective or config 'objective')")
    return cfg


def build_objective(cfg: dict, data: LabeledDataset) -> ObjectiveSpec:
    try:
        kind = ObjectiveKind(cfg["objective"])
    except ValueError:
        names = [k.value for k in ObjectiveKind]
        raise BadInput(f"unknown objective {cfg['objective']!r}; choose from {names}") from None
    anchors = cfg.get("anchors", 10)
    eps = cfg.get("epsilon_cap", 0.05)
    rng = cfg.get("precision_range")
    rng = tuple(rng) if rng is not None else None
    if kind is ObjectiveKind.AUCPR:
        if isinstance(anchors, int):
            anchors = precision_anchors(data.prior, anchors, eps, rng)
        return ObjectiveSpec(kind, anchors=anchors, precision_range=rng)
    if kind is ObjectiveKind.AUCROC:
        if isinstance(anchors, int):
            anchors = fpr_anchors(anchors, eps, rng)
        return ObjectiveSpec(kind, anchors=anchors, precision_range=rng)
    target = cfg.get("target", 1.0 if kind is ObjectiveKind.FBETA else None)
    spec = ObjectiveSpec(kind, target=target)
    spec.check_prior(data.prior)
    return spec


def _split(data: LabeledDataset, args, seed: int):
    if args.val:
        return data, _load_data(args.val)
    try:
        return data.split(0.8, seed)
    except DataError as exc:
        raise BadInput(f"80/20 split left a single class: {exc}") from None


def cmd_generate(args) -> int:
    spec = SyntheticSpec(args.generator, args.n_pos, args.n_neg, args.dim, args.overlap, args.seed)
    save_csv(generate(spec), args.out)
    log.info("wrote %s", args.out)
    return EXIT_OK


def _train_binary(data: LabeledDataset, args, cfg: dict, out: Path) -> None:
    tcfg = TrainConfig(**{k: v for k, v in cfg.items() if k in TRAIN_KEYS})
    train_data, val_data = _split(data, args, tcfg.seed)
    objective = build_objective(cfg, train_data)
    if args.method == "lp":
        if objective.kind is not ObjectiveKind.FBETA or objective.target != 1.0:
            raise BadInput("--method lp supports only the fbeta objective with beta = 1")
        if len(train_data) > LP_MAX_EXAMPLES:
            raise BadInput(f"--method lp is limited to {LP_MAX_EXAMPLES} training examples "
                           f"(got {len(train_data)}); use --method saddle")
        scorer, sol = fit_f1_lp(train_data)
        report = metrics_report(scorer, val_data)
        trace = TrainTrace()
        trace.append(TracePoint(0, sol.objective, [], report.to_dict(include_curve=False), scorer))
    else:
        scorer, trace = train(train_data, objective, tcfg, eval_data=val_data)
    scorer.save(out)
    trace.write_jsonl(args.trace or out.with_suffix(".trace.jsonl"))
    report = metrics_report(scorer, val_data, beta=objective.target
                            if objective.kind is ObjectiveKind.FBETA else 1.0)
    Path(args.report or out.with_suffix(".report.json")).write_text(
        json.dumps(report.to_dict(), indent=2) + "\n")
    if args.val_out:
        save_csv(val_data, args.val_out)
    log.info("wrote %s (validation AP %.4f)", out, report.average_precision)


def _load_multiclass(path, label_column="label"):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise BadInput(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if label_column not in header:
        raise BadInput(f"{path}: missing '{label_column}' column")
    li = header.index(label_column)
    labels = [r[li].strip() for r in rows[1:] if r]
    X = np.array([[float(v) for j, v in enumerate(r) if j != li] for r in rows[1:] if r])
    return X, np.array(labels)


def cmd_train(args) -> int:
    cfg = _load_config(args)
    out = Path(args.out)
    if not args.one_vs_all:
        _train_binary(_load_data(args.data), args, cfg, out)
        return EXIT_OK
    X, labels = _load_multiclass(args.data)
    if args.val or args.trace or args.report or args.val_out:
        raise BadInput("--one-vs-all writes per-class files; drop --val/--trace/--report/--val-out")
    for cls in sorted(set(labels.tolist())):
        data = LabeledDataset(X, np.where(labels == cls, 1, -1))
        _train_binary(data, args, cfg, out.with_name(f"{out.stem}.class-{cls}{out.suffix}"))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    scorer = _load_model(args.model)
    data = _load_data(args.data)
    if scorer.dim != data.dim:
        raise BadInput(f"model dimension {scorer.dim} != data dimension {data.dim}")
    report = metrics_report(scorer, data, anchor=args.anchor, beta=args.fbeta,
                            alpha=args.alpha, beta_recall=args.beta)
    scored = ScoredSet.from_model(scorer, data)
    if args.pr_curve:
        write_pr_csv(scored, args.pr_curve)
    if args.roc_curve:
        write_roc_csv(scored, args.roc_curve)
    text = json.dumps(report.to_dict(include_curve=not args.no_curve), indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def comparison_metrics(scorer: ThresholdedScorer, data: LabeledDataset,
                       alphas, betas) -> dict:
    report = metrics_report(scorer, data)
    row = {"average_precision": report.average_precision, "auc_roc": report.auc_roc,
           "accuracy": report.accuracy, "f1": report.f_beta}
    scored = ScoredSet.from_model(scorer, data)
    for b in betas:
        row[f"precision_at_recall_{b:g}"] = exact_precision_at_recall(scored, b)[0]
    for a in alphas:
        row[f"recall_at_precision_{a:g}"] = exact_recall_at_precision(scored, a)[0]
    return row


def cmd_compare(args) -> int:
    if len(args.models) < 2:
        raise BadInput("compare needs at least two model files")
    data = _load_data(args.data)
    rows = {}
    for path in args.models:
        scorer = _load_model(path)
        if scorer.dim != data.dim:
            raise BadInput(f"{path}: model dimension {scorer.dim} != data dimension {data.dim}")
        rows[path] = comparison_metrics(scorer, data, args.alpha, args.beta)
    base = rows[args.models[0]]
    table = {
        "baseline": args.models[0],
        "metrics": rows,
        # absolute percentage points over the first model
        "gains": {p: {k: 100.0 * (v - base[k]) for k, v in r.items()}
                  for p, r in rows.items() if p != args.models[0]},
    }
    text = json.dumps(table, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rankopt", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic dataset CSV")
    g.add_argument("--generator", default="two_gaussians_fig1", choices=[x.value for x in Generator])
    g.add_argument("--n-pos", type=int, default=400)
    g.add_argument("--n-neg", type=int, default=1600)
    g.add_argument("--dim", type=int, default=2)
    g.add_argument("--overlap", type=float, default=1.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_generate)

    t = sub.add_parser("train", help="train a linear scorer")
    t.add_argument("--data", required=True)
    t.add_argument("--config")
    t.add_argument("--objective", choices=[k.value for k in ObjectiveKind])
    t.add_argument("--target", type=float)
    t.add_argument("--alpha", type=float, help="precision target (rap)")
    t.add_argument("--beta", type=float, help="recall target (par) or F-beta beta (fbeta)")
    t.add_argument("--anchors", type=int, help="anchor count for aucpr/aucroc")
    t.add_argument("--epsilon-cap", type=float)
    t.add_argument("--precision-range", type=float, nargs=2, metavar=("LO", "HI"))
    t.add_argument("--steps", type=int)
    t.add_argument("--batch-size", type=int)
    t.add_argument("--lr", type=float)
    t.add_argument("--seed", type=int)
    t.add_argument("--method", choices=["saddle", "lp"], default="saddle")
    t.add_argument("--val", help="validation CSV (default: seeded 80/20 split)")
    t.add_argument("--val-out", help="write the validation split used")
    t.add_argument("--trace")
    t.add_argument("--report")
    t.add_argument("--one-vs-all", action="store_true")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="exact metrics of a model on a dataset")
    e.add_argument("--model", required=True)
    e.add_argument("--data", required=True)
    e.add_argument("--alpha", type=float, help="also report recall at this precision")
    e.add_argument("--beta", type=float, help="also report precision at this recall")
    e.add_argument("--fbeta", type=float, default=1.0)
    e.add_argument("--anchor", type=int, default=0)
    e.add_argument("--pr-curve")
    e.add_argument("--roc-curve")
    e.add_argument("--no-curve", action="store_true", help="omit pr_curve from the report")
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    c = sub.add_parser("compare", help="gain table of models over the first one")
    c.add_argument("models", nargs="+")
    c.add_argument("--data", required=True)
    c.add_argument("--alpha", type=float, nargs="*", default=[0.7, 0.95])
    c.add_argument("--beta", type=float, nargs="*", default=[0.7, 0.95])
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (BadInput, DataError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception as exc:  # noqa: BLE001
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
