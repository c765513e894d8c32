"""Log-linear (Gibbs) model over the candidate list of one instance.

An instance is one input together with its finite list of candidate
outputs; each candidate carries a token sequence and a dense feature
vector.  A weight vector induces a Gibbs distribution over the candidates,
and everything downstream (sampling, expected features, MAP and
minimum-risk prediction) derives from it.

All operations are pure functions of their arguments plus, where noted, an
explicitly passed ``numpy.random.Generator``; there is no hidden state.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass(eq=False)
class Candidate:
    """One candidate output: a token sequence plus its feature vector."""

    tokens: tuple[str, ...]
    features: np.ndarray

    def __post_init__(self) -> None:
        self.tokens = tuple(self.tokens)
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        if self.features.ndim != 1 or self.features.size == 0:
            raise ValueError("candidate features must be a non-empty 1-d vector")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("candidate features must be finite")


@dataclass(eq=False)
class Instance:
    """One input: an id, its candidate list and an optional hidden reference.

    The reference is never consulted by the learning code; it exists so a
    feedback oracle or a full-information baseline can be built from the
    same object.  ``feature_matrix`` stacks the candidate features into the
    (k, d) C-contiguous array the kernels consume.
    """

    id: int
    candidates: list[Candidate]
    reference: tuple[str, ...] | None = None
    feature_matrix: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"instance id must be non-negative, got {self.id}")
        if not self.candidates:
            raise ValueError(f"instance {self.id} has an empty candidate list")
        if self.reference is not None:
            self.reference = tuple(self.reference)
        dims = {c.features.shape[0] for c in self.candidates}
        if len(dims) != 1:
            raise ValueError(
                f"instance {self.id} mixes feature dimensions {sorted(dims)}"
            )
        self.feature_matrix = np.ascontiguousarray(
            np.stack([c.features for c in self.candidates]), dtype=np.float64
        )

    @property
    def num_candidates(self) -> int:
        return len(self.candidates)

    @property
    def dim(self) -> int:
        return self.feature_matrix.shape[1]


def _check_weights(weights: np.ndarray, inst: Instance) -> np.ndarray:
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.shape[0] != inst.dim:
        raise ValueError(
            f"weight vector of length {w.shape[0] if w.ndim == 1 else w.shape} "
            f"does not match feature dimension {inst.dim}"
        )
    return w


def gibbs_probabilities(weights: np.ndarray, inst: Instance) -> np.ndarray:
    """Gibbs probabilities p_i = exp(w . phi_i) / sum_j exp(w . phi_j).

    Computed in the log domain (max-score subtraction), so arbitrarily
    large scores are safe.  The result is non-negative and sums to one.
    """
    w = _check_weights(weights, inst)
    return kernels.gibbs_probs(inst.feature_matrix, w)


def expected_features(weights: np.ndarray, inst: Instance) -> np.ndarray:
    """Expected feature vector sum_i p_i phi_i under the Gibbs model."""
    w = _check_weights(weights, inst)
    return kernels.gibbs_stats(inst.feature_matrix, w)[1]


def sample(weights: np.ndarray, inst: Instance, rng: np.random.Generator) -> int:
    """Draw one candidate index from the Gibbs distribution.

    Consumes exactly one uniform variate from ``rng``, so trajectories are
    reproducible given the generator's seed.
    """
    probs = gibbs_probabilities(weights, inst)
    return kernels.sample_index(probs, rng.random())


def sample_many(
    weights: np.ndarray, inst: Instance, rng: np.random.Generator, size: int
) -> np.ndarray:
    """Vectorized equivalent of ``size`` independent :func:`sample` calls."""
    probs = gibbs_probabilities(weights, inst)
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, rng.random(size), side="right")
    return np.minimum(idx, len(probs) - 1)


def map_predict(weights: np.ndarray, inst: Instance) -> int:
    """Index of the candidate with the highest score w . phi_i.

    Ties are broken toward the lowest index, for reproducibility.
    """
    w = _check_weights(weights, inst)
    return kernels.map_index(inst.feature_matrix, w)


def mbr_predict(
    weights: np.ndarray,
    inst: Instance,
    pairwise_loss: Callable[[int, int], float],
) -> int:
    """Minimum-Bayes-risk prediction over the candidate list.

    ``pairwise_loss(i, j)`` is the loss of predicting candidate ``i`` when
    candidate ``j`` is taken as the truth.  Returns the index minimizing
    ``sum_j pairwise_loss(i, j) * p_j`` (ties toward the lowest index).
    Evaluates the loss for all k^2 ordered pairs.
    """
    probs = gibbs_probabilities(weights, inst)
    k = inst.num_candidates
    risks = np.empty(k)
    for i in range(k):
        risks[i] = sum(pairwise_loss(i, j) * probs[j] for j in range(k))
    return int(np.argmin(risks))


def zero_one_pairwise(inst: Instance) -> Callable[[int, int], float]:
    """0/1 pairwise loss on token sequences, for MBR over an instance."""

    def loss(i: int, j: int) -> float:
        return 0.0 if inst.candidates[i].tokens == inst.candidates[j].tokens else 1.0

    return loss
