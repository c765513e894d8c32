"""Planted reranking task for desk-scale convergence experiments.

Each instance draws k candidate feature vectors uniformly from [-1, 1]^d
and shifts one designated candidate by a task-wide planted direction.  The
loss of a candidate grows with its feature distance from the planted one
(normalized per instance into [0, 1], exactly 0 at the planted candidate),
so weights aligned with the planted direction concentrate the model on
low-loss candidates.  This gives a reproducible problem on which expected
loss demonstrably decreases under learning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .feedback import DuelOutcome
from .model import Candidate, Instance, gibbs_probabilities


@dataclass
class PlantedTask:
    instances: list[Instance]
    loss_vectors: list[np.ndarray]
    direction: np.ndarray
    planted_indices: list[int]


def make_planted_task(
    num_instances: int,
    num_candidates: int,
    dim: int,
    seed: int,
    shift: float = 2.0,
    direction: np.ndarray | None = None,
) -> PlantedTask:
    """Generate a planted task; fully determined by the seed.

    Pass the ``direction`` of an existing task to draw a held-out set of
    the same underlying problem.
    """
    rng = np.random.default_rng(seed)
    if direction is None:
        direction = rng.standard_normal(dim)
        direction = direction / np.linalg.norm(direction)
    else:
        direction = np.asarray(direction, dtype=np.float64)
    instances = []
    loss_vectors = []
    planted_indices = []
    for i in range(num_instances):
        features = rng.uniform(-1.0, 1.0, size=(num_candidates, dim))
        planted = int(rng.integers(num_candidates))
        features[planted] += shift * direction
        distances = np.linalg.norm(features - features[planted], axis=1)
        max_distance = distances.max()
        losses = distances / max_distance if max_distance > 0 else distances
        instances.append(
            Instance(
                id=i,
                candidates=[
                    Candidate(tokens=(), features=row) for row in features
                ],
            )
        )
        loss_vectors.append(losses)
        planted_indices.append(planted)
    return PlantedTask(instances, loss_vectors, direction, planted_indices)


def expected_task_loss(weights: np.ndarray, task: PlantedTask) -> float:
    """Mean over instances of the model-expected loss sum_i p_i loss_i."""
    total = 0.0
    for inst, losses in zip(task.instances, task.loss_vectors):
        total += float(gibbs_probabilities(weights, inst) @ losses)
    return total / len(task.instances)


def one_point_feedback(task: PlantedTask):
    """One-point loss callable over the task's planted losses."""

    def feedback(inst: Instance, index: int) -> float:
        return float(task.loss_vectors[inst.id][index])

    return feedback


def two_point_feedback(task: PlantedTask):
    """Two-point comparison callable over the task's planted losses."""

    def feedback(inst: Instance, index_a: int, index_b: int) -> DuelOutcome:
        losses = task.loss_vectors[inst.id]
        loss_a = float(losses[index_a])
        loss_b = float(losses[index_b])
        if loss_a < loss_b:
            winner = "A"
        elif loss_b < loss_a:
            winner = "B"
        else:
            winner = "tie"
        return DuelOutcome(winner=winner, loss_a=loss_a, loss_b=loss_b)

    return feedback
