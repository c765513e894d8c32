"""NumPy implementation of the per-instance hot-loop kernels.

This is the fallback backend used when the compiled extension
(``banditrerank._kernels_c``) is not available.  Both backends implement the
same functions with the same contracts; see ``banditrerank.kernels``.

All functions expect C-contiguous float64 inputs: ``features`` is the
(k, d) candidate feature matrix of one instance, ``weights`` is the (d,)
weight vector.
"""

from __future__ import annotations

import numpy as np


def gibbs_probs(features: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Softmax of the candidate scores ``features @ weights``.

    Computed in the log domain (max score subtracted before
    exponentiation) so that scores of real n-best lists cannot overflow.
    """
    scores = features @ weights
    scores -= scores.max()
    probs = np.exp(scores)
    probs /= probs.sum()
    return probs


def gibbs_stats(features: np.ndarray, weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and the probability-weighted mean feature vector."""
    probs = gibbs_probs(features, weights)
    return probs, features.T @ probs


def sample_index(probs: np.ndarray, u: float) -> int:
    """Invert the CDF of ``probs`` at ``u``: smallest i with u < cumsum(p)[i].

    Falls back to the last index when accumulated rounding leaves
    ``cumsum(p)[-1]`` marginally below ``u``.
    """
    cdf = np.cumsum(probs)
    i = int(np.searchsorted(cdf, u, side="right"))
    return min(i, len(probs) - 1)


def map_index(features: np.ndarray, weights: np.ndarray) -> int:
    """Index of the highest-scoring candidate; ties go to the lowest index."""
    return int(np.argmax(features @ weights))


def expected_update(features: np.ndarray, probs: np.ndarray, losses: np.ndarray) -> np.ndarray:
    """Exact expectation of the sampled update direction.

    Returns ``sum_i p_i * loss_i * (phi_i - xbar)`` with
    ``xbar = sum_i p_i * phi_i``.
    """
    xbar = features.T @ probs
    weighted = probs * losses
    return features.T @ weighted - xbar * weighted.sum()
