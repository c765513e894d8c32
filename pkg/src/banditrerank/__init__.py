"""Bandit learning for k-best-list reranking.

A log-linear model over precomputed candidate lists, three online
learners (one-point bandit, dueling, full-information baseline), a
feedback oracle that hides references behind scalar loss queries,
BLEU-based losses, and an experiment harness with numerical diagnostics.

The per-instance hot loop runs on a compiled kernel backend when the
extension is built, with a NumPy fallback otherwise; see
``banditrerank.kernels.BACKEND``.
"""

from .data import (
    CurveRecord,
    Dataset,
    RunConfig,
    attach_references,
    make_run_config,
    parse_config,
    parse_nbest,
    parse_references,
    read_weights,
    write_curve,
    write_nbest,
    write_weights,
)
from .diagnostics import DiagnosticsReport, diagnostics_suite
from .feedback import DuelOutcome, FeedbackOracle, QueryReport
from .harness import (
    RunResult,
    SuiteSummary,
    approx_randomization_test,
    evaluate_map_bleu,
    run_online,
    run_suite,
    write_summary,
)
from .kernels import BACKEND
from .learners import (
    BanditLearnerState,
    BanditStepRecord,
    DuelingLearnerState,
    DuelStepRecord,
    FullInfoLearnerState,
    FullInfoStepRecord,
    LearningRateSchedule,
    ScheduleReport,
    bandit_expected_update,
    bandit_step,
    dueling_step,
    full_info_gradient,
    full_info_step,
    instance_loss_vector,
    schedule_validity,
)
from .losses import (
    NGramStats,
    SmoothedBleuLoss,
    ZeroOneLoss,
    corpus_bleu,
    sentence_bleu_smoothed,
    sentence_stats,
    zero_one_loss,
)
from .model import (
    Candidate,
    Instance,
    expected_features,
    gibbs_probabilities,
    map_predict,
    mbr_predict,
    sample,
    sample_many,
)
from .synthetic import PlantedTask, expected_task_loss, make_planted_task

__version__ = "0.1.0"
