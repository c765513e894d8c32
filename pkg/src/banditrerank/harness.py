"""Experiment driver: online training runs, multi-seed suites and the
approximate randomization significance test.

A run is online learning over epochs: instances are visited (optionally
reshuffled per epoch), one learner step is applied per instance, and the
test set is scored with corpus BLEU under MAP prediction every
``eval_every`` iterations.  The model reported at the end is always the
last iterate.  Cumulative per-sentence loss is tracked throughout, which
is the quantity meta-parameter searches optimize online.

Everything is driven by one seeded generator per run, so a (config, data,
seed) triple determines every output byte.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from .data import CurveRecord, Dataset, RunConfig, attach_references, load_path, read_weights
from .feedback import FeedbackOracle, QueryReport
from .learners import (
    BanditLearnerState,
    DuelingLearnerState,
    FullInfoLearnerState,
    LearningRateSchedule,
    bandit_step,
    dueling_step,
    full_info_step,
)
from .losses import SmoothedBleuLoss, Tokens, corpus_bleu, sentence_stats
from .model import Instance, map_predict


@dataclass
class RunResult:
    """Outcome of one online run: final model, curve and query accounting."""

    seed: int
    final_weights: np.ndarray
    curve: list[CurveRecord]
    final_test_bleu: float
    query_report: QueryReport | None


@dataclass
class SuiteSummary:
    config: RunConfig
    mean_final_bleu: float
    std_final_bleu: float
    runs: list[RunResult]


def evaluate_map_bleu(weights: np.ndarray, dataset: Dataset) -> float:
    """Corpus BLEU of the MAP predictions over a reference-bearing dataset."""
    pairs = []
    for inst in dataset.instances:
        if inst.reference is None:
            raise ValueError(f"instance {inst.id} has no reference for evaluation")
        pairs.append((inst.candidates[map_predict(weights, inst)].tokens, inst.reference))
    return corpus_bleu(pairs)


def one_point_adapter(oracle: FeedbackOracle):
    """Bridge an oracle to the (instance, index) callable the learner takes."""

    def feedback(inst: Instance, index: int) -> float:
        return oracle.one_point(inst.id, inst.candidates[index].tokens)

    return feedback


def two_point_adapter(oracle: FeedbackOracle):
    def feedback(inst: Instance, index_a: int, index_b: int):
        return oracle.two_point(
            inst.id, inst.candidates[index_a].tokens, inst.candidates[index_b].tokens
        )

    return feedback


def _initial_weights(config: RunConfig, dim: int) -> np.ndarray:
    if config.warm_start is not None:
        weights = load_path(config.warm_start, read_weights)
        if weights.shape[0] != dim:
            raise ValueError(
                f"warm-start vector has length {weights.shape[0]}, expected {dim}"
            )
        return weights
    return np.zeros(dim)


def _check_coverage(config: RunConfig, train: Dataset, oracle: FeedbackOracle | None) -> None:
    if config.learner in ("bandit", "dueling"):
        if oracle is None:
            raise ValueError(f"{config.learner} runs need a feedback oracle")
        missing = {inst.id for inst in train.instances} - oracle.known_ids()
        if missing:
            raise ValueError(
                f"oracle lacks references for {len(missing)} train instances "
                f"(e.g. ids {sorted(missing)[:3]})"
            )
    else:
        for inst in train.instances:
            if inst.reference is None:
                raise ValueError(
                    f"full-info training needs references; instance {inst.id} has none"
                )


def run_online(
    config: RunConfig,
    train: Dataset,
    oracle: FeedbackOracle | None,
    test: Dataset,
    seed: int,
) -> RunResult:
    """One online training run with periodic test evaluation.

    The per-step loss added to the cumulative total is the sampled loss
    (bandit), the incumbent's loss (dueling) or the expected loss
    (full-info).  The final model is the last iterate.
    """
    config.validate()
    _check_coverage(config, train, oracle)
    num_train = len(train.instances)
    rng = np.random.default_rng(seed)
    weights = _initial_weights(config, train.dim)
    schedule = LearningRateSchedule(config.schedule, config.rate_c)

    step: Callable[[Instance], float]
    if config.learner == "bandit":
        bandit_state = BanditLearnerState(weights, schedule, rng)
        feedback = one_point_adapter(oracle)
        state = bandit_state

        def step(inst: Instance) -> float:
            return bandit_step(bandit_state, inst, feedback).loss

    elif config.learner == "dueling":
        duel_state = DuelingLearnerState(weights, config.delta, config.gamma, rng)
        comparison = two_point_adapter(oracle)
        state = duel_state

        def step(inst: Instance) -> float:
            return dueling_step(duel_state, inst, comparison).incumbent_loss

    else:
        full_state = FullInfoLearnerState(weights, schedule, SmoothedBleuLoss())
        state = full_state

        def step(inst: Instance) -> float:
            return full_info_step(full_state, inst).expected_loss

    eval_period = config.eval_every or num_train
    curve: list[CurveRecord] = []
    cumulative = 0.0
    iteration = 0
    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(num_train) if config.shuffle else np.arange(num_train)
        for position in order:
            cumulative += step(train.instances[int(position)])
            iteration += 1
            if iteration % eval_period == 0:
                curve.append(
                    CurveRecord(
                        seed=seed,
                        iteration=iteration,
                        epoch=epoch,
                        cumulative_loss=cumulative,
                        test_corpus_bleu=evaluate_map_bleu(state.weights, test),
                    )
                )
    if iteration % eval_period != 0:
        curve.append(
            CurveRecord(
                seed=seed,
                iteration=iteration,
                epoch=config.epochs,
                cumulative_loss=cumulative,
                test_corpus_bleu=evaluate_map_bleu(state.weights, test),
            )
        )
    return RunResult(
        seed=seed,
        final_weights=state.weights,
        curve=curve,
        final_test_bleu=curve[-1].test_corpus_bleu,
        query_report=oracle.query_report() if oracle is not None else None,
    )


def run_suite(
    config: RunConfig,
    train: Dataset,
    train_references: Sequence[Tokens],
    test: Dataset,
    loss=None,
) -> SuiteSummary:
    """Run one seed per entry of ``config.seeds`` and aggregate final BLEU.

    Each bandit/dueling run gets a fresh oracle so its query report covers
    exactly that run.  The reported spread is the population standard
    deviation of the final test scores.
    """
    config.validate()
    if len(train_references) != len(train.instances):
        raise ValueError(
            f"{len(train_references)} train references for {len(train.instances)} instances"
        )
    if loss is None:
        loss = SmoothedBleuLoss()
    if config.learner == "full-info":
        attach_references(train, train_references)
    runs = []
    for seed in config.seeds:
        oracle = None
        if config.learner in ("bandit", "dueling"):
            oracle = FeedbackOracle(
                loss, {i: tuple(ref) for i, ref in enumerate(train_references)}
            )
        runs.append(run_online(config, train, oracle, test, seed))
    finals = np.array([r.final_test_bleu for r in runs])
    return SuiteSummary(
        config=config,
        mean_final_bleu=float(finals.mean()),
        std_final_bleu=float(finals.std()),
        runs=runs,
    )


def write_summary(summary: SuiteSummary, stream) -> None:
    """Plain-text report, one ``metric=value`` per line."""
    config = summary.config
    stream.write(f"learner={config.learner}\n")
    stream.write(f"schedule={config.schedule}\n")
    stream.write(f"rate_c={config.rate_c!r}\n")
    if config.learner == "dueling":
        stream.write(f"delta={config.delta!r}\n")
        stream.write(f"gamma={config.gamma!r}\n")
    stream.write(f"epochs={config.epochs}\n")
    stream.write(f"seeds={','.join(str(s) for s in config.seeds)}\n")
    stream.write(f"mean_final_test_bleu={summary.mean_final_bleu!r}\n")
    stream.write(f"std_final_test_bleu={summary.std_final_bleu!r}\n")
    for run in summary.runs:
        stream.write(f"final_test_bleu[{run.seed}]={run.final_test_bleu!r}\n")
        if run.query_report is not None:
            stream.write(f"one_point_queries[{run.seed}]={run.query_report.one_point}\n")
            stream.write(f"two_point_queries[{run.seed}]={run.query_report.two_point}\n")
            stream.write(
                f"loss_evaluations[{run.seed}]={run.query_report.loss_evaluations}\n"
            )


def corpus_bleu_metric(outputs: Sequence[Tokens], references: Sequence[Tokens]) -> float:
    """Corpus BLEU in the (outputs, references) shape the sigtest expects."""
    return corpus_bleu(zip(outputs, references))


def _stats_rows(outputs: Sequence[Tokens], references: Sequence[Tokens]) -> np.ndarray:
    return np.array(
        [sentence_stats(h, r).as_row() for h, r in zip(outputs, references)],
        dtype=np.float64,
    )


def _bleu_from_rows(rows: np.ndarray) -> np.ndarray:
    """Corpus BLEU of aggregated stats rows [m1..m4, t1..t4, hyp, ref]."""
    rows = np.atleast_2d(rows)
    matches = rows[:, 0:4]
    totals = rows[:, 4:8]
    hyp_len = rows[:, 8]
    ref_len = rows[:, 9]
    ok = (matches.min(axis=1) > 0) & (totals.min(axis=1) > 0) & (hyp_len > 0)
    safe_matches = np.where(ok[:, None], matches, 1.0)
    safe_totals = np.where(ok[:, None], totals, 1.0)
    safe_hyp = np.where(ok, hyp_len, 1.0)
    log_precision = np.log(safe_matches / safe_totals).mean(axis=1)
    brevity = np.minimum(1.0, np.exp(1.0 - ref_len / safe_hyp))
    return np.where(ok, brevity * np.exp(log_precision), 0.0)


def approx_randomization_test(
    outputs_a: Sequence[Tokens],
    outputs_b: Sequence[Tokens],
    references: Sequence[Tokens],
    metric: Callable[[Sequence[Tokens], Sequence[Tokens]], float] | None = None,
    shuffles: int = 9999,
    seed: int = 0,
) -> float:
    """Approximate randomization test on two sentence-aligned system outputs.

    The observed statistic is the absolute corpus-level metric difference.
    Each shuffle swaps every aligned output pair independently with
    probability one half and recomputes the statistic; the p-value is
    (#{pseudo >= observed} + 1) / (shuffles + 1).

    ``metric`` takes (outputs, references) and returns a corpus score; the
    default is corpus BLEU, computed for all shuffles from per-sentence
    n-gram statistics cached once.
    """
    if not (len(outputs_a) == len(outputs_b) == len(references)):
        raise ValueError("output and reference lists must be sentence-aligned")
    if len(references) == 0:
        raise ValueError("empty test corpus")
    if shuffles < 1:
        raise ValueError(f"shuffles must be >= 1, got {shuffles}")
    rng = np.random.default_rng(seed)
    if metric is None:
        rows_a = _stats_rows(outputs_a, references)
        rows_b = _stats_rows(outputs_b, references)
        sum_a = rows_a.sum(axis=0)
        sum_b = rows_b.sum(axis=0)
        observed = abs(float(_bleu_from_rows(sum_a)[0] - _bleu_from_rows(sum_b)[0]))
        swap = rng.random((shuffles, len(references))) < 0.5
        moved = swap @ (rows_b - rows_a)
        pseudo = np.abs(
            _bleu_from_rows(sum_a + moved) - _bleu_from_rows(sum_b - moved)
        )
        exceed = int(np.count_nonzero(pseudo >= observed))
    else:
        observed = abs(metric(outputs_a, references) - metric(outputs_b, references))
        exceed = 0
        for _ in range(shuffles):
            swap = rng.random(len(references)) < 0.5
            pseudo_a = [b if s else a for a, b, s in zip(outputs_a, outputs_b, swap)]
            pseudo_b = [a if s else b for a, b, s in zip(outputs_a, outputs_b, swap)]
            stat = abs(metric(pseudo_a, references) - metric(pseudo_b, references))
            if stat >= observed:
                exceed += 1
    return (exceed + 1) / (shuffles + 1)
