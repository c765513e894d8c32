"""Executable numerical checks of the conditions behind the bandit learner.

The convergence argument for the one-point learner rests on properties
that can be measured on concrete data:

* the sampled update direction is an unbiased estimate of the exact
  per-instance gradient (so its inner product with the gradient is the
  squared gradient norm, which is non-negative);
* with losses in [0, 1] and feature norms bounded by R, every realized
  update direction has squared norm at most 4 R^2;
* the learning-rate schedule is non-negative, sums to infinity and has a
  finite sum of squares;
* the analytic gradient agrees with central finite differences.

``diagnostics_suite`` runs all of them and reports measured numbers with
pass/fail flags; it never raises on a failed check.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .learners import LearningRateSchedule, bandit_expected_update, schedule_validity
from .model import Instance, gibbs_probabilities, sample_many

FD_STEP = 1e-5
FD_RELATIVE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    details: dict

    def format(self) -> str:
        detail = ", ".join(f"{k}={v}" for k, v in self.details.items())
        return f"{self.name}: {'PASS' if self.passed else 'FAIL'} ({detail})"


@dataclass(frozen=True)
class DiagnosticsReport:
    checks: list[CheckResult]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self) -> list[str]:
        return [c.format() for c in self.checks]


def instance_expected_loss(
    weights: np.ndarray, inst: Instance, losses: np.ndarray
) -> float:
    """Model-expected loss sum_i p_i loss_i of one instance."""
    return float(gibbs_probabilities(weights, inst) @ losses)


def finite_difference_gradient(
    weights: np.ndarray, inst: Instance, losses: np.ndarray, step: float = FD_STEP
) -> np.ndarray:
    """Central finite differences of the per-instance expected loss."""
    weights = np.asarray(weights, dtype=np.float64)
    grad = np.empty_like(weights)
    for j in range(weights.shape[0]):
        bumped = weights.copy()
        bumped[j] = weights[j] + step
        upper = instance_expected_loss(bumped, inst, losses)
        bumped[j] = weights[j] - step
        lower = instance_expected_loss(bumped, inst, losses)
        grad[j] = (upper - lower) / (2.0 * step)
    return grad


def _sampled_updates(
    weights: np.ndarray,
    inst: Instance,
    losses: np.ndarray,
    rng: np.random.Generator,
    num_samples: int,
) -> np.ndarray:
    probs = gibbs_probabilities(weights, inst)
    xbar = inst.feature_matrix.T @ probs
    idx = sample_many(weights, inst, rng, num_samples)
    return losses[idx, None] * (inst.feature_matrix[idx] - xbar)


def check_unbiasedness(
    instances: Sequence[Instance],
    loss_vectors: Sequence[np.ndarray],
    weights: np.ndarray,
    rng: np.random.Generator,
    num_samples: int,
) -> CheckResult:
    """Monte-Carlo mean of sampled updates vs. the exact expectation.

    Passes when every coordinate of every instance lies within three
    standard errors (plus a tiny absolute guard for zero-variance
    coordinates).
    """
    max_z = 0.0
    passed = True
    for inst, losses in zip(instances, loss_vectors):
        exact = bandit_expected_update(weights, inst, losses)
        samples = _sampled_updates(weights, inst, losses, rng, num_samples)
        mc_mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(num_samples)
        gap = np.abs(mc_mean - exact)
        passed &= bool(np.all(gap <= 3.0 * se + 1e-12))
        max_z = max(max_z, float(np.max(gap / np.maximum(se, 1e-300))))
    return CheckResult(
        "unbiasedness",
        passed,
        {
            "max_z": round(max_z, 3),
            "num_samples": num_samples,
            "instances": len(instances),
        },
    )


def check_second_moment(
    instances: Sequence[Instance],
    loss_vectors: Sequence[np.ndarray],
    weights: np.ndarray,
    rng: np.random.Generator,
    num_samples: int,
) -> CheckResult:
    """Realized squared update norms against the 4 R^2 bound per instance."""
    max_ratio = 0.0
    passed = True
    for inst, losses in zip(instances, loss_vectors):
        radius = float(np.max(np.linalg.norm(inst.feature_matrix, axis=1)))
        bound = 4.0 * radius * radius
        samples = _sampled_updates(weights, inst, losses, rng, num_samples)
        worst = float(np.max(np.sum(samples * samples, axis=1)))
        if bound > 0:
            max_ratio = max(max_ratio, worst / bound)
            passed &= worst <= bound
        else:
            passed &= worst == 0.0
    return CheckResult(
        "second_moment",
        passed,
        {"max_norm_sq_over_bound": round(max_ratio, 6), "num_samples": num_samples},
    )


def check_schedule(schedule: LearningRateSchedule) -> CheckResult:
    report = schedule_validity(schedule)
    return CheckResult(
        "schedule",
        report.valid,
        {
            "kind": schedule.kind,
            "nonneg": report.nonneg,
            "divergent_sum": report.divergent_sum,
            "convergent_sq_sum": report.convergent_sq_sum,
        },
    )


def check_gradient_fd(
    instances: Sequence[Instance],
    loss_vectors: Sequence[np.ndarray],
    weights: np.ndarray,
) -> CheckResult:
    """Analytic gradient against central finite differences."""
    max_rel = 0.0
    for inst, losses in zip(instances, loss_vectors):
        exact = bandit_expected_update(weights, inst, losses)
        approx = finite_difference_gradient(weights, inst, losses)
        rel = float(
            np.linalg.norm(exact - approx) / max(np.linalg.norm(approx), 1e-12)
        )
        max_rel = max(max_rel, rel)
    return CheckResult(
        "gradient_fd",
        max_rel < FD_RELATIVE_TOLERANCE,
        {"max_rel_err": float(f"{max_rel:.3e}"), "step": FD_STEP},
    )


def diagnostics_suite(
    instances: Sequence[Instance],
    loss_vectors: Sequence[np.ndarray],
    weights: np.ndarray,
    seed: int,
    schedule: LearningRateSchedule | None = None,
    num_samples: int = 100_000,
) -> DiagnosticsReport:
    """Run all checks on a sample of instances with per-candidate losses."""
    if len(instances) != len(loss_vectors):
        raise ValueError("need one loss vector per instance")
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    loss_vectors = [np.ascontiguousarray(v, dtype=np.float64) for v in loss_vectors]
    rng = np.random.default_rng(seed)
    checks = [
        check_unbiasedness(instances, loss_vectors, weights, rng, num_samples),
        check_second_moment(instances, loss_vectors, weights, rng, num_samples),
    ]
    if schedule is not None:
        checks.append(check_schedule(schedule))
    checks.append(check_gradient_fd(instances, loss_vectors, weights))
    return DiagnosticsReport(checks)
