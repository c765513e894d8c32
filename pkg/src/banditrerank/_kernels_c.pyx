# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the per-instance hot-loop kernels.

Mirrors ``banditrerank._kernels_py`` function for function; see
``banditrerank.kernels`` for the dispatch rules.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def gibbs_probs(double[:, ::1] features, double[::1] weights):
    """Softmax of the candidate scores, computed with max subtraction."""
    cdef Py_ssize_t k = features.shape[0]
    cdef Py_ssize_t d = features.shape[1]
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] probs = out
    _fill_probs(features, weights, probs, k, d)
    return out


def gibbs_stats(double[:, ::1] features, double[::1] weights):
    """Probabilities and the probability-weighted mean feature vector."""
    cdef Py_ssize_t k = features.shape[0]
    cdef Py_ssize_t d = features.shape[1]
    probs_arr = np.empty(k, dtype=np.float64)
    xbar_arr = np.zeros(d, dtype=np.float64)
    cdef double[::1] probs = probs_arr
    cdef double[::1] xbar = xbar_arr
    cdef Py_ssize_t i, j
    cdef double p
    _fill_probs(features, weights, probs, k, d)
    for i in range(k):
        p = probs[i]
        for j in range(d):
            xbar[j] += p * features[i, j]
    return probs_arr, xbar_arr


def sample_index(double[::1] probs, double u):
    """Invert the CDF of ``probs`` at ``u``: smallest i with u < cumsum(p)[i]."""
    cdef Py_ssize_t k = probs.shape[0]
    cdef Py_ssize_t i
    cdef double cum = 0.0
    for i in range(k):
        cum += probs[i]
        if u < cum:
            return i
    return k - 1


def map_index(double[:, ::1] features, double[::1] weights):
    """Index of the highest-scoring candidate; ties go to the lowest index."""
    cdef Py_ssize_t k = features.shape[0]
    cdef Py_ssize_t d = features.shape[1]
    cdef Py_ssize_t i, j, best = 0
    cdef double score, best_score
    best_score = _dot_row(features, weights, 0, d)
    for i in range(1, k):
        score = _dot_row(features, weights, i, d)
        if score > best_score:
            best_score = score
            best = i
    return best


def expected_update(double[:, ::1] features, double[::1] probs, double[::1] losses):
    """sum_i p_i * loss_i * (phi_i - xbar) with xbar the expected features."""
    cdef Py_ssize_t k = features.shape[0]
    cdef Py_ssize_t d = features.shape[1]
    out = np.zeros(d, dtype=np.float64)
    cdef double[::1] grad = out
    cdef Py_ssize_t i, j
    cdef double w, wsum = 0.0
    cdef double[::1] xbar = np.zeros(d, dtype=np.float64)
    for i in range(k):
        w = probs[i]
        for j in range(d):
            xbar[j] += w * features[i, j]
    for i in range(k):
        w = probs[i] * losses[i]
        wsum += w
        for j in range(d):
            grad[j] += w * features[i, j]
    for j in range(d):
        grad[j] -= wsum * xbar[j]
    return out


cdef inline double _dot_row(double[:, ::1] features, double[::1] weights,
                            Py_ssize_t row, Py_ssize_t d) noexcept:
    cdef Py_ssize_t j
    cdef double acc = 0.0
    for j in range(d):
        acc += features[row, j] * weights[j]
    return acc


cdef void _fill_probs(double[:, ::1] features, double[::1] weights,
                      double[::1] probs, Py_ssize_t k, Py_ssize_t d) noexcept:
    cdef Py_ssize_t i
    cdef double score, max_score, total = 0.0
    max_score = _dot_row(features, weights, 0, d)
    probs[0] = max_score
    for i in range(1, k):
        score = _dot_row(features, weights, i, d)
        probs[i] = score
        if score > max_score:
            max_score = score
    for i in range(k):
        probs[i] = exp(probs[i] - max_score)
        total += probs[i]
    for i in range(k):
        probs[i] /= total
