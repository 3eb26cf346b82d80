"""Command-line harness.

Three subcommands:

transform   read whitespace-separated score rows, print softmax,
            sparsemax, support and threshold per row as JSON lines or CSV
labelprop   sweep the synthetic label-proportion benchmark over document
            lengths and losses, writing one JSON result file
multilabel  train and evaluate one method on LIBSVM multi-label files

Result files are schema-stable JSON objects with keys config_echo,
per_cell_results and wall_time_seconds, written with sorted keys so that
reruns with the same seed are byte-identical.  The measured wall time is
logged to stderr instead of being embedded, precisely to keep that
byte-level determinism; the field stays in the schema as null.  The
environment variable SPARSEMAX_SEED overrides the default seed of 0 when
neither the command line nor a config file provides one.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from .datasets import (
    MIXTURE_DIRICHLET,
    MIXTURE_UNIFORM,
    LabeledDataset,
    SyntheticConfig,
    generate_synthetic,
    read_libsvm_multilabel,
    standardize_features,
)
from .linear_model import (
    LOSS_BINARY_LOGISTIC,
    LOSS_LOGISTIC,
    LOSS_SPARSEMAX,
    DecisionRule,
    TrainConfig,
    cross_validate,
    fit,
    predict_labels,
    _softmax_rows,
    _sparsemax_rows,
)
from .metrics import js_divergence, micro_macro_f1, mse
from .simplex import softmax, sparsemax, threshold_and_support

logger = logging.getLogger(__name__)

ENV_SEED = "SPARSEMAX_SEED"

LAMBDA_GRID_LABELPROP = [10.0**j for j in range(-9, 1)]
LAMBDA_GRID_MULTILABEL = [10.0**j for j in range(-8, 3)]

# method name -> (training loss, decision rule kind)
METHODS = {
    "logistic": (LOSS_BINARY_LOGISTIC, "logistic_threshold"),
    "softmax": (LOSS_LOGISTIC, "softmax_threshold"),
    "sparsemax": (LOSS_SPARSEMAX, "sparsemax_scale"),
}

_LABELPROP_REQUIRED = {"n_labels", "n_train", "n_test", "doc_lengths"}
_LABELPROP_ALLOWED = _LABELPROP_REQUIRED | {
    "mean_labels",
    "mixture",
    "mixtures",
    "losses",
    "folds",
    "seed",
    "lambdas",
    "max_epochs",
    "learning_rate",
    "convergence_tol",
}


def _env_default_seed() -> int:
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"{ENV_SEED} must be an integer, got {raw!r}") from None


def _floats_arg(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _write_result(path, config_echo: dict, cells: list[dict]) -> None:
    payload = {
        "config_echo": config_echo,
        "per_cell_results": cells,
        "wall_time_seconds": None,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def default_rule_grid(method: str, n_labels: int) -> list[float]:
    """Decision-rule parameter grid for a method, restricted to valid values.

    Grid points outside the rule's domain (softmax thresholds above 1 for
    small label counts, sparsemax scales below 1) are dropped.
    """
    if method == "logistic":
        return [0.05 * n for n in range(1, 11)]
    if method == "softmax":
        return [n / n_labels for n in range(1, 11) if n <= n_labels]
    if method == "sparsemax":
        return [0.5 * n for n in range(2, 11)]
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# transform


def cmd_transform(args) -> int:
    if args.input is None:
        text = sys.stdin.read()
    else:
        with open(args.input) as fh:
            text = fh.read()
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            rows.append((lineno, np.array([float(tok) for tok in line.split()])))
        except ValueError:
            print(f"line {lineno}: could not parse score row {line!r}", file=sys.stderr)
            return 2
    if args.format == "csv" and rows:
        print("row,tau,support,softmax,sparsemax")
    for i, (_, z) in enumerate(rows):
        support = threshold_and_support(z)
        p_soft = softmax(z)
        p_sparse = sparsemax(z)
        if args.format == "json":
            print(
                json.dumps(
                    {
                        "row": i,
                        "softmax": p_soft.tolist(),
                        "sparsemax": p_sparse.tolist(),
                        "support": support.indices.tolist(),
                        "tau": support.tau,
                    },
                    sort_keys=True,
                )
            )
        else:
            cols = [
                str(i),
                repr(support.tau),
                " ".join(str(j) for j in support.indices.tolist()),
                " ".join(repr(v) for v in p_soft.tolist()),
                " ".join(repr(v) for v in p_sparse.tolist()),
            ]
            print(",".join(cols))
    return 0


# ---------------------------------------------------------------------------
# labelprop


def _mean_proportion_metrics(model, data: LabeledDataset, loss_kind: str) -> tuple[float, float]:
    scores = data.X @ model.W.T + model.b
    if loss_kind == LOSS_SPARSEMAX:
        predicted = _sparsemax_rows(scores)
    else:
        predicted = _softmax_rows(scores)
    mses = [mse(q, p) for q, p in zip(data.Q, predicted)]
    jss = [js_divergence(q, p) for q, p in zip(data.Q, predicted)]
    return float(np.mean(mses)), float(np.mean(jss))


def _cell_seed(seed: int, mixture_index: int, length_index: int) -> int:
    # Independent stream per data cell; both losses see the same datasets.
    ss = np.random.SeedSequence((seed, mixture_index, length_index))
    return int(ss.generate_state(1, np.uint64)[0])


def run_labelprop(config: dict, seed: int) -> dict:
    unknown = set(config) - _LABELPROP_ALLOWED
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = _LABELPROP_REQUIRED - set(config)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")
    mixtures = config.get("mixtures", [config.get("mixture", MIXTURE_UNIFORM)])
    losses = config.get("losses", [LOSS_LOGISTIC, LOSS_SPARSEMAX])
    for loss in losses:
        if loss not in (LOSS_LOGISTIC, LOSS_SPARSEMAX):
            raise ValueError(f"labelprop supports logistic and sparsemax losses, got {loss!r}")
    doc_lengths = config["doc_lengths"]
    if not doc_lengths or not mixtures or not losses:
        raise ValueError("doc_lengths, mixtures and losses must be non-empty")
    folds = int(config.get("folds", 5))
    lambdas = [float(v) for v in config.get("lambdas", LAMBDA_GRID_LABELPROP)]
    train_kwargs = {
        "max_epochs": int(config.get("max_epochs", 200)),
        "learning_rate": float(config.get("learning_rate", 1.0)),
        "convergence_tol": float(config.get("convergence_tol", 1e-7)),
        "seed": seed,
    }
    echo = {
        "n_labels": int(config["n_labels"]),
        "n_train": int(config["n_train"]),
        "n_test": int(config["n_test"]),
        "mean_labels": float(config.get("mean_labels", 2.0)),
        "doc_lengths": [int(v) for v in doc_lengths],
        "mixtures": list(mixtures),
        "losses": list(losses),
        "folds": folds,
        "seed": seed,
        "lambdas": lambdas,
        "max_epochs": train_kwargs["max_epochs"],
        "learning_rate": train_kwargs["learning_rate"],
        "convergence_tol": train_kwargs["convergence_tol"],
    }
    cells = []
    cell_index = 0
    for mi, mixture in enumerate(mixtures):
        for li, length in enumerate(doc_lengths):
            data_cfg = SyntheticConfig(
                n_labels=echo["n_labels"],
                n_train=echo["n_train"],
                n_test=echo["n_test"],
                mean_doc_length=float(length),
                mean_labels=echo["mean_labels"],
                mixture=mixture,
                seed=_cell_seed(seed, mi, li),
            )
            train, test = generate_synthetic(data_cfg)
            train, test, _, _ = standardize_features(train, test)
            for loss in losses:

                def evaluate(fold_i, tr, va, lam, param, _loss=loss):
                    model = fit(tr, TrainConfig(lam=lam, **train_kwargs), _loss)
                    _, js = _mean_proportion_metrics(model, va, _loss)
                    return -js

                best_lam, _ = cross_validate(
                    train, [(lam, None) for lam in lambdas], folds, evaluate, seed=data_cfg.seed
                )
                model = fit(train, TrainConfig(lam=best_lam, **train_kwargs), loss)
                mse_mean, js_mean = _mean_proportion_metrics(model, test, loss)
                cells.append(
                    {
                        "cell_index": cell_index,
                        "mixture": mixture,
                        "doc_length": int(length),
                        "loss": loss,
                        "lambda": float(best_lam),
                        "mse": mse_mean,
                        "js_divergence": js_mean,
                        "n_train": train.n_examples,
                        "n_test": test.n_examples,
                    }
                )
                cell_index += 1
    return {"config_echo": echo, "per_cell_results": cells}


def cmd_labelprop(args) -> int:
    started = time.monotonic()
    with open(args.config) as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise ValueError("labelprop config must be a JSON object")
    if args.seed is not None:
        seed = args.seed
    elif "seed" in config:
        seed = int(config["seed"])
    else:
        seed = _env_default_seed()
    result = run_labelprop(config, seed)
    _write_result(args.out, result["config_echo"], result["per_cell_results"])
    logger.info("labelprop sweep finished in %.2f s", time.monotonic() - started)
    return 0


# ---------------------------------------------------------------------------
# multilabel


def _pad_dataset(ds: LabeledDataset, n_labels: int, n_features: int) -> LabeledDataset:
    if ds.n_labels == n_labels and ds.n_features == n_features:
        return ds
    X = np.zeros((ds.n_examples, n_features))
    X[:, : ds.n_features] = ds.X
    Q = np.zeros((ds.n_examples, n_labels))
    Q[:, : ds.n_labels] = ds.Q
    return LabeledDataset(X=X, Q=Q)


def run_multilabel(
    train: LabeledDataset,
    test: LabeledDataset,
    method: str,
    seed: int,
    folds: int = 5,
    lambdas=None,
    rule_params=None,
    max_epochs: int = 100,
    learning_rate: float = 1.0,
    convergence_tol: float = 1e-7,
) -> dict:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}")
    loss_kind, rule_kind = METHODS[method]
    if lambdas is None:
        lambdas = LAMBDA_GRID_MULTILABEL
    if rule_params is None:
        rule_params = default_rule_grid(method, train.n_labels)
    train_kwargs = {
        "max_epochs": max_epochs,
        "learning_rate": learning_rate,
        "convergence_tol": convergence_tol,
        "seed": seed,
    }
    grid = [(float(lam), float(p)) for lam in lambdas for p in rule_params]
    models = {}

    def evaluate(fold_i, tr, va, lam, param):
        key = (fold_i, lam)
        if key not in models:
            models[key] = fit(tr, TrainConfig(lam=lam, **train_kwargs), loss_kind)
        model = models[key]
        rule = DecisionRule(kind=rule_kind, param=param)
        preds = [predict_labels(model, x, rule) for x in va.X]
        micro, _ = micro_macro_f1(preds, va.label_sets(), va.n_labels)
        return micro

    best_lam, best_param = cross_validate(train, grid, folds, evaluate, seed=seed)
    model = fit(train, TrainConfig(lam=best_lam, **train_kwargs), loss_kind)
    rule = DecisionRule(kind=rule_kind, param=best_param)
    preds = [predict_labels(model, x, rule) for x in test.X]
    micro, macro = micro_macro_f1(preds, test.label_sets(), test.n_labels)
    cell = {
        "cell_index": 0,
        "method": method,
        "lambda": float(best_lam),
        "rule_param": float(best_param),
        "micro_f1": micro,
        "macro_f1": macro,
        "n_train": train.n_examples,
        "n_test": test.n_examples,
    }
    return {"cell": cell, "lambdas": [float(v) for v in lambdas], "rule_params": [float(v) for v in rule_params]}


def cmd_multilabel(args) -> int:
    started = time.monotonic()
    seed = args.seed if args.seed is not None else _env_default_seed()
    train = read_libsvm_multilabel(args.train)
    test = read_libsvm_multilabel(args.test)
    n_labels = max(train.n_labels, test.n_labels)
    n_features = max(train.n_features, test.n_features)
    train = _pad_dataset(train, n_labels, n_features)
    test = _pad_dataset(test, n_labels, n_features)
    if not args.no_standardize:
        train, test, _, _ = standardize_features(train, test)
    result = run_multilabel(
        train,
        test,
        args.method,
        seed,
        folds=args.folds,
        lambdas=args.lambdas,
        rule_params=args.rule_params,
        max_epochs=args.max_epochs,
        learning_rate=args.learning_rate,
        convergence_tol=args.tol,
    )
    echo = {
        "train": str(args.train),
        "test": str(args.test),
        "method": args.method,
        "seed": seed,
        "folds": args.folds,
        "lambdas": result["lambdas"],
        "rule_params": result["rule_params"],
        "max_epochs": args.max_epochs,
        "learning_rate": args.learning_rate,
        "convergence_tol": args.tol,
        "standardize": not args.no_standardize,
    }
    _write_result(args.out, echo, [result["cell"]])
    logger.info("multilabel run finished in %.2f s", time.monotonic() - started)
    return 0


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsemax")
    sub = parser.add_subparsers(dest="command", required=True)

    p_tr = sub.add_parser("transform", help="softmax/sparsemax table for score rows")
    p_tr.add_argument("--format", choices=["json", "csv"], default="json")
    p_tr.add_argument("--input", default=None, help="score file, one row per line (default stdin)")
    p_tr.set_defaults(func=cmd_transform)

    p_lp = sub.add_parser("labelprop", help="synthetic label-proportion sweep")
    p_lp.add_argument("--config", required=True, help="JSON sweep configuration")
    p_lp.add_argument("--out", required=True, help="result JSON path")
    p_lp.add_argument("--seed", type=int, default=None)
    p_lp.set_defaults(func=cmd_labelprop)

    p_ml = sub.add_parser("multilabel", help="multi-label benchmark on LIBSVM files")
    p_ml.add_argument("--train", required=True)
    p_ml.add_argument("--test", required=True)
    p_ml.add_argument("--method", required=True, choices=sorted(METHODS))
    p_ml.add_argument("--out", required=True)
    p_ml.add_argument("--seed", type=int, default=None)
    p_ml.add_argument("--folds", type=int, default=5)
    p_ml.add_argument("--lambdas", type=_floats_arg, default=None)
    p_ml.add_argument("--rule-params", type=_floats_arg, default=None)
    p_ml.add_argument("--max-epochs", type=int, default=100)
    p_ml.add_argument("--learning-rate", type=float, default=1.0)
    p_ml.add_argument("--tol", type=float, default=1e-7)
    p_ml.add_argument("--no-standardize", action="store_true")
    p_ml.set_defaults(func=cmd_multilabel)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if not logging.getLogger().handlers:
        logging.basicConfig(
            level=logging.INFO, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
        )
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
