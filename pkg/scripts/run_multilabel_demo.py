#!/usr/bin/env python3
"""Compare the three multi-label methods on one synthetic dataset.

Generates a bag-of-words dataset, exports it in multi-label LIBSVM format,
then runs the full hyperparameter grid for each method through the CLI and
prints the selected hyperparameters with test micro / macro F1.  Point
--train/--test at existing LIBSVM files to benchmark real data instead.
"""

import argparse
import json
import sys
import tempfile
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from sparsemax.cli import main as cli_main
from sparsemax.datasets import SyntheticConfig, generate_synthetic, write_libsvm_multilabel


def export_synthetic(args, workdir: Path) -> tuple[str, str]:
    cfg = SyntheticConfig(
        n_labels=args.n_labels,
        n_train=args.n_train,
        n_test=args.n_test,
        mean_doc_length=args.mean_doc_length,
        mixture="uniform",
        seed=args.data_seed,
    )
    train, test = generate_synthetic(cfg)
    train_path = workdir / "train.svm"
    test_path = workdir / "test.svm"
    write_libsvm_multilabel(train, train_path)
    write_libsvm_multilabel(test, test_path)
    return str(train_path), str(test_path)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--train", default=None, help="LIBSVM train file (default: synthetic)")
    parser.add_argument("--test", default=None, help="LIBSVM test file (default: synthetic)")
    parser.add_argument("--n-labels", type=int, default=6)
    parser.add_argument("--n-train", type=int, default=200)
    parser.add_argument("--n-test", type=int, default=200)
    parser.add_argument("--mean-doc-length", type=float, default=2000.0)
    parser.add_argument("--data-seed", type=int, default=11)
    parser.add_argument("--seed", type=int, default=0, help="cross-validation seed")
    parser.add_argument("--out-dir", default=None, help="directory for result JSON files")
    args = parser.parse_args(argv)

    if (args.train is None) != (args.test is None):
        parser.error("--train and --test must be given together")
    workdir = Path(args.out_dir) if args.out_dir else Path(tempfile.mkdtemp(prefix="multilabel_"))
    workdir.mkdir(parents=True, exist_ok=True)
    if args.train is None:
        train_path, test_path = export_synthetic(args, workdir)
    else:
        train_path, test_path = args.train, args.test

    print(f"{'method':<12} {'lambda':>10} {'rule param':>11} {'micro F1':>9} {'macro F1':>9}")
    for method in ("logistic", "softmax", "sparsemax"):
        out_path = workdir / f"{method}.json"
        code = cli_main(
            [
                "multilabel",
                "--train", train_path,
                "--test", test_path,
                "--method", method,
                "--out", str(out_path),
                "--seed", str(args.seed),
            ]
        )
        if code != 0:
            return code
        cell = json.loads(out_path.read_text())["per_cell_results"][0]
        print(
            f"{method:<12} {cell['lambda']:>10.0e} {cell['rule_param']:>11.3f} "
            f"{cell['micro_f1']:>9.4f} {cell['macro_f1']:>9.4f}"
        )
    print(f"\nresult files: {workdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
