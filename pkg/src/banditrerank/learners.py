"""Parameter-update procedures for reranking over candidate lists.

Three learners share the same weight space:

* a one-point bandit learner that samples a candidate from the Gibbs
  model, obtains its loss, and steps against the loss-scaled difference
  between the sampled and the expected feature vector;
* a dueling learner that perturbs the weights along a random unit
  direction and keeps the perturbation only when the challenger's MAP
  prediction strictly wins a two-point comparison;
* a full-information baseline that descends the exact per-instance
  gradient of expected loss against a visible reference.

Learner states are single-owner, sequential objects: step functions
mutate the passed state in place and return a per-step record.
Independent runs with independent states and generators may proceed in
parallel.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from . import kernels
from .feedback import DuelOutcome
from .losses import SentenceLoss
from .model import Instance

SCHEDULE_KINDS = ("constant", "inverse-t", "inverse-sqrt-t")


@dataclass(frozen=True)
class LearningRateSchedule:
    """Learning rate gamma_t as a function of the step counter t >= 0.

    ``constant`` gives c, ``inverse-t`` gives c/(t+1) and
    ``inverse-sqrt-t`` gives c/sqrt(t+1); the +1 keeps t = 0 defined.
    """

    kind: str
    base: float

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {self.kind!r}, expected one of {SCHEDULE_KINDS}")
        if not self.base > 0:
            raise ValueError(f"schedule base must be positive, got {self.base}")

    def rate(self, t: int) -> float:
        if self.kind == "constant":
            return self.base
        if self.kind == "inverse-t":
            return self.base / (t + 1)
        return self.base / math.sqrt(t + 1)


@dataclass(frozen=True)
class ScheduleReport:
    """Analytic classification of a schedule against the step-size conditions."""

    nonneg: bool
    divergent_sum: bool
    convergent_sq_sum: bool

    @property
    def valid(self) -> bool:
        return self.nonneg and self.divergent_sum and self.convergent_sq_sum


def schedule_validity(schedule: LearningRateSchedule) -> ScheduleReport:
    """Whether gamma_t >= 0, sum gamma_t diverges and sum gamma_t^2 converges.

    Classified analytically: only ``inverse-t`` satisfies all three.
    """
    return ScheduleReport(
        nonneg=True,
        divergent_sum=True,
        convergent_sq_sum=schedule.kind == "inverse-t",
    )


@dataclass
class BanditLearnerState:
    weights: np.ndarray
    schedule: LearningRateSchedule
    rng: np.random.Generator
    step_count: int = 0


@dataclass
class DuelingLearnerState:
    weights: np.ndarray
    delta: float
    gamma: float
    rng: np.random.Generator
    step_count: int = 0

    def __post_init__(self) -> None:
        if not self.delta > 0:
            raise ValueError(f"exploration radius delta must be positive, got {self.delta}")
        if not self.gamma > 0:
            raise ValueError(f"exploitation step gamma must be positive, got {self.gamma}")


@dataclass
class FullInfoLearnerState:
    weights: np.ndarray
    schedule: LearningRateSchedule
    loss: SentenceLoss
    step_count: int = 0


@dataclass(frozen=True)
class BanditStepRecord:
    step: int
    sampled_index: int
    loss: float
    learning_rate: float
    update_norm: float


@dataclass(frozen=True)
class DuelStepRecord:
    step: int
    incumbent_index: int
    challenger_index: int
    winner: str
    moved: bool
    incumbent_loss: float
    challenger_loss: float


@dataclass(frozen=True)
class FullInfoStepRecord:
    step: int
    expected_loss: float
    learning_rate: float
    update_norm: float


OnePointFeedback = Callable[[Instance, int], float]
TwoPointFeedback = Callable[[Instance, int, int], DuelOutcome]


def bandit_step(
    state: BanditLearnerState, inst: Instance, feedback: OnePointFeedback
) -> BanditStepRecord:
    """One round of the one-point bandit learner.

    Samples candidate i from the Gibbs model at the current weights,
    queries ``feedback(inst, i)`` exactly once for its loss, and applies

        w <- w - gamma_t * loss * (phi_i - expected_features)

    A loss of 0 (or a single-candidate instance) leaves the weights
    unchanged.  Feedback outside [0, 1] is rejected: the boundedness of
    the update rests on it.
    """
    features = inst.feature_matrix
    if features.shape[1] != state.weights.shape[0]:
        raise ValueError(
            f"instance dimension {features.shape[1]} does not match weights "
            f"dimension {state.weights.shape[0]}"
        )
    probs, xbar = kernels.gibbs_stats(features, state.weights)
    sampled = kernels.sample_index(probs, state.rng.random())
    loss = float(feedback(inst, sampled))
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"one-point feedback must lie in [0, 1], got {loss}")
    rate = state.schedule.rate(state.step_count)
    update = (rate * loss) * (features[sampled] - xbar)
    state.weights = state.weights - update
    record = BanditStepRecord(
        step=state.step_count,
        sampled_index=sampled,
        loss=loss,
        learning_rate=rate,
        update_norm=float(np.linalg.norm(update)),
    )
    state.step_count += 1
    return record


def bandit_expected_update(
    weights: np.ndarray, inst: Instance, losses: np.ndarray
) -> np.ndarray:
    """Exact expectation of the one-point update direction.

    Given per-candidate losses, returns sum_i p_i loss_i (phi_i - xbar),
    which equals the gradient of the per-instance expected loss
    sum_i loss_i p_i(w).  Used as the analytic counterpart of the sampled
    update in diagnostics.
    """
    losses = np.ascontiguousarray(losses, dtype=np.float64)
    if losses.shape != (inst.num_candidates,):
        raise ValueError(
            f"need one loss per candidate ({inst.num_candidates}), got shape {losses.shape}"
        )
    w = np.ascontiguousarray(weights, dtype=np.float64)
    probs = kernels.gibbs_probs(inst.feature_matrix, w)
    return kernels.expected_update(inst.feature_matrix, probs, losses)


def _unit_sphere(rng: np.random.Generator, dim: int) -> np.ndarray:
    # Normalized standard Gaussian; redraw on the (measure-zero) null vector.
    while True:
        direction = rng.standard_normal(dim)
        norm = np.linalg.norm(direction)
        if norm > 0:
            return direction / norm


def dueling_step(
    state: DuelingLearnerState, inst: Instance, feedback: TwoPointFeedback
) -> DuelStepRecord:
    """One round of the dueling learner.

    Draws a uniform unit direction u, forms the challenger w + delta*u,
    compares the MAP predictions of incumbent and challenger through the
    two-point oracle, and moves by gamma*u only on a strict challenger
    win.  The oracle is queried exactly once per step, even when both MAP
    predictions coincide (the comparison is then a tie).
    """
    features = inst.feature_matrix
    if features.shape[1] != state.weights.shape[0]:
        raise ValueError(
            f"instance dimension {features.shape[1]} does not match weights "
            f"dimension {state.weights.shape[0]}"
        )
    direction = _unit_sphere(state.rng, state.weights.shape[0])
    challenger_weights = state.weights + state.delta * direction
    incumbent = kernels.map_index(features, state.weights)
    challenger = kernels.map_index(
        features, np.ascontiguousarray(challenger_weights)
    )
    outcome = feedback(inst, incumbent, challenger)
    moved = outcome.winner == "B"
    if moved:
        state.weights = state.weights + state.gamma * direction
    record = DuelStepRecord(
        step=state.step_count,
        incumbent_index=incumbent,
        challenger_index=challenger,
        winner=outcome.winner,
        moved=moved,
        incumbent_loss=outcome.loss_a,
        challenger_loss=outcome.loss_b,
    )
    state.step_count += 1
    return record


def instance_loss_vector(inst: Instance, loss: SentenceLoss) -> np.ndarray:
    """Per-candidate losses against the instance's reference."""
    if inst.reference is None:
        raise ValueError(f"instance {inst.id} has no reference")
    return np.array(
        [loss.evaluate(c.tokens, inst.reference) for c in inst.candidates]
    )


def full_info_gradient(weights: np.ndarray, inst: Instance, loss: SentenceLoss) -> np.ndarray:
    """Exact gradient of the per-instance expected loss under full information.

    Identical in form to :func:`bandit_expected_update`, with the loss
    vector evaluated against the visible reference.
    """
    return bandit_expected_update(weights, inst, instance_loss_vector(inst, loss))


def full_info_step(state: FullInfoLearnerState, inst: Instance) -> FullInfoStepRecord:
    """One gradient-descent step on the per-instance expected loss."""
    losses = instance_loss_vector(inst, state.loss)
    w = np.ascontiguousarray(state.weights, dtype=np.float64)
    probs = kernels.gibbs_probs(inst.feature_matrix, w)
    gradient = kernels.expected_update(inst.feature_matrix, probs, losses)
    rate = state.schedule.rate(state.step_count)
    update = rate * gradient
    state.weights = state.weights - update
    record = FullInfoStepRecord(
        step=state.step_count,
        expected_loss=float(probs @ losses),
        learning_rate=rate,
        update_norm=float(np.linalg.norm(update)),
    )
    state.step_count += 1
    return record
