"""Command-line interface.

Subcommands:

* ``train``   -- multi-seed online training (bandit, dueling or full-info),
                 writes a learning-curve CSV and a summary report;
* ``duel``    -- shorthand for ``train`` with the dueling learner;
* ``evaluate``-- corpus BLEU of MAP predictions under given weights;
* ``check``   -- numerical diagnostics (unbiasedness, update-norm bound,
                 schedule conditions, finite-difference agreement);
* ``sigtest`` -- approximate randomization significance test between two
                 system output files.

Every config-file key has a flag of the same name; flags win.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .data import (
    Dataset,
    attach_references,
    load_path,
    make_run_config,
    parse_config,
    parse_nbest,
    parse_references,
    parse_seeds,
    read_weights,
    write_curve,
)
from .diagnostics import diagnostics_suite
from .harness import approx_randomization_test, evaluate_map_bleu, run_suite, write_summary
from .learners import SCHEDULE_KINDS, LearningRateSchedule, instance_loss_vector
from .losses import SmoothedBleuLoss
from .synthetic import make_planted_task


def _add_run_flags(parser: argparse.ArgumentParser, with_learner: bool) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    if with_learner:
        parser.add_argument("--learner", choices=("bandit", "dueling", "full-info"))
    parser.add_argument("--schedule", choices=SCHEDULE_KINDS)
    parser.add_argument("--rate-c", type=float, help="learning-rate constant c")
    parser.add_argument("--delta", type=float, help="dueling exploration radius")
    parser.add_argument("--gamma", type=float, help="dueling exploitation step")
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--seeds", type=parse_seeds, help="comma-separated seed list")
    parser.add_argument("--eval-every", type=int, help="iterations between test evaluations (default: one epoch)")
    shuffle = parser.add_mutually_exclusive_group()
    shuffle.add_argument("--shuffle", dest="shuffle", action="store_true", default=None)
    shuffle.add_argument("--no-shuffle", dest="shuffle", action="store_false")
    parser.add_argument("--warm-start", help="initial weight file (one real per line)")
    parser.add_argument("--train-nbest")
    parser.add_argument("--train-refs")
    parser.add_argument("--test-nbest")
    parser.add_argument("--test-refs")
    parser.add_argument("--out", help="output prefix for curve CSV and summary")


_RUN_KEYS = (
    "learner",
    "schedule",
    "rate_c",
    "delta",
    "gamma",
    "epochs",
    "seeds",
    "shuffle",
    "eval_every",
    "warm_start",
    "train_nbest",
    "train_refs",
    "test_nbest",
    "test_refs",
    "out",
)


def _merge_run_config(args: argparse.Namespace):
    values: dict[str, object] = {}
    if args.config:
        values.update(load_path(args.config, parse_config))
    for key in _RUN_KEYS:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
    return make_run_config(values)


def _load_dataset(nbest_path: str, refs_path: str) -> tuple[Dataset, list]:
    dataset = load_path(nbest_path, parse_nbest)
    references = load_path(refs_path, parse_references)
    return dataset, references


def _cmd_train(args: argparse.Namespace) -> int:
    config = _merge_run_config(args)
    for key in ("train_nbest", "train_refs", "test_nbest", "test_refs"):
        if getattr(config, key) is None:
            raise ValueError(f"missing required path {key} (flag or config key)")
    train, train_refs = _load_dataset(config.train_nbest, config.train_refs)
    test, test_refs = _load_dataset(config.test_nbest, config.test_refs)
    attach_references(test, test_refs)
    summary = run_suite(config, train, train_refs, test)
    curve_path = f"{config.out}.curves.csv"
    with open(curve_path, "w", encoding="utf-8") as handle:
        write_curve([r for run in summary.runs for r in run.curve], handle)
    summary_path = f"{config.out}.summary.txt"
    with open(summary_path, "w", encoding="utf-8") as handle:
        write_summary(summary, handle)
    write_summary(summary, sys.stdout)
    print(f"curve written to {curve_path}")
    print(f"summary written to {summary_path}")
    return 0


def _cmd_duel(args: argparse.Namespace) -> int:
    args.learner = "dueling"
    return _cmd_train(args)


def _cmd_evaluate(args: argparse.Namespace) -> int:
    dataset, references = _load_dataset(args.nbest, args.refs)
    attach_references(dataset, references)
    if args.weights:
        weights = load_path(args.weights, read_weights)
    else:
        weights = np.zeros(dataset.dim)
    print(f"corpus_bleu={evaluate_map_bleu(weights, dataset)!r}")
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    if (args.nbest is None) != (args.refs is None):
        raise ValueError("--nbest and --refs must be given together")
    if args.nbest:
        dataset, references = _load_dataset(args.nbest, args.refs)
        attach_references(dataset, references)
        instances = dataset.instances[: args.instances]
        loss = SmoothedBleuLoss()
        loss_vectors = [instance_loss_vector(inst, loss) for inst in instances]
        dim = dataset.dim
    else:
        task = make_planted_task(args.instances, num_candidates=10, dim=5, seed=args.seed)
        instances = task.instances
        loss_vectors = task.loss_vectors
        dim = 5
    if args.weights:
        weights = load_path(args.weights, read_weights)
    else:
        weights = np.zeros(dim)
    schedule = LearningRateSchedule(args.schedule, args.rate_c)
    report = diagnostics_suite(
        instances,
        loss_vectors,
        weights,
        seed=args.seed,
        schedule=schedule,
        num_samples=args.samples,
    )
    for line in report.lines():
        print(line)
    return 0 if report.all_passed else 1


def _cmd_sigtest(args: argparse.Namespace) -> int:
    outputs_a = load_path(args.outputs_a, parse_references)
    outputs_b = load_path(args.outputs_b, parse_references)
    references = load_path(args.refs, parse_references)
    p_value = approx_randomization_test(
        outputs_a, outputs_b, references, shuffles=args.shuffles, seed=args.seed
    )
    print(f"p_value={p_value!r}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="banditrerank",
        description="Online bandit learning for k-best-list reranking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="multi-seed online training run")
    _add_run_flags(train, with_learner=True)
    train.set_defaults(func=_cmd_train)

    duel = sub.add_parser("duel", help="train with the dueling learner")
    _add_run_flags(duel, with_learner=False)
    duel.set_defaults(func=_cmd_duel)

    evaluate = sub.add_parser("evaluate", help="corpus BLEU of MAP predictions")
    evaluate.add_argument("--nbest", required=True)
    evaluate.add_argument("--refs", required=True)
    evaluate.add_argument("--weights", help="weight file; defaults to the zero vector")
    evaluate.set_defaults(func=_cmd_evaluate)

    check = sub.add_parser("check", help="numerical diagnostics")
    check.add_argument("--nbest", help="n-best file (default: planted synthetic sample)")
    check.add_argument("--refs")
    check.add_argument("--weights")
    check.add_argument("--instances", type=int, default=10, help="sample size")
    check.add_argument("--samples", type=int, default=100_000, help="Monte-Carlo draws per instance")
    check.add_argument("--schedule", choices=SCHEDULE_KINDS, default="inverse-t")
    check.add_argument("--rate-c", type=float, default=1.0)
    check.add_argument("--seed", type=int, default=0)
    check.set_defaults(func=_cmd_check)

    sigtest = sub.add_parser("sigtest", help="approximate randomization test")
    sigtest.add_argument("--outputs-a", required=True, help="system A outputs, one sentence per line")
    sigtest.add_argument("--outputs-b", required=True)
    sigtest.add_argument("--refs", required=True)
    sigtest.add_argument("--shuffles", type=int, default=9999)
    sigtest.add_argument("--seed", type=int, default=0)
    sigtest.set_defaults(func=_cmd_sigtest)
    return parser


def cli_main(argv: list[str] | None = None) -> int:
    """Entry point returning an exit code; errors become one-line diagnostics."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage/help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
