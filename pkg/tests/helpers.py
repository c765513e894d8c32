"""Independent brute-force oracles used to pin expected test values.

Everything here is deliberately written from scratch (plain dicts, plain
loops, math module) so it shares no code path with the library under
test.
"""

from __future__ import annotations

import math


def brute_ngram_dict(tokens, order):
    counts = {}
    for start in range(len(tokens) - order + 1):
        gram = tuple(tokens[start : start + order])
        counts[gram] = counts.get(gram, 0) + 1
    return counts


def brute_pair_counts(hyp, ref, order):
    """(clipped matches, hypothesis n-gram count) for one order."""
    hyp_counts = brute_ngram_dict(hyp, order)
    ref_counts = brute_ngram_dict(ref, order)
    matched = 0
    total = 0
    for gram, count in hyp_counts.items():
        total += count
        matched += min(count, ref_counts.get(gram, 0))
    return matched, total


def brute_sentence_bleu_smoothed(hyp, ref):
    """Floored-count smoothed sentence BLEU, orders 1..4."""
    if len(ref) == 0:
        raise ValueError("empty reference")
    if len(hyp) == 0:
        return 0.0
    log_sum = 0.0
    for order in (1, 2, 3, 4):
        matched, total = brute_pair_counts(hyp, ref, order)
        numerator = matched if matched > 0 else 0.01
        denominator = total if total > 0 else 1
        log_sum += math.log(numerator / denominator)
    brevity = min(1.0, math.exp(1.0 - len(ref) / len(hyp)))
    return brevity * math.exp(log_sum / 4.0)


def brute_corpus_bleu(pairs):
    """Unsmoothed corpus BLEU; 0 if any aggregate precision is 0."""
    matched = [0, 0, 0, 0]
    total = [0, 0, 0, 0]
    hyp_len = 0
    ref_len = 0
    for hyp, ref in pairs:
        hyp_len += len(hyp)
        ref_len += len(ref)
        for order in (1, 2, 3, 4):
            m, t = brute_pair_counts(hyp, ref, order)
            matched[order - 1] += m
            total[order - 1] += t
    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    for m, t in zip(matched, total):
        if t == 0 or m == 0:
            return 0.0
        log_sum += math.log(m / t)
    brevity = min(1.0, math.exp(1.0 - ref_len / hyp_len))
    return brevity * math.exp(log_sum / 4.0)


def brute_softmax(scores):
    """Naive softmax on small scores (no max subtraction on purpose)."""
    exps = [math.exp(s) for s in scores]
    z = sum(exps)
    return [e / z for e in exps]


def brute_expected_loss(feature_rows, weights, losses):
    """sum_i loss_i * softmax_i(features @ w), via plain loops."""
    scores = [sum(f * w for f, w in zip(row, weights)) for row in feature_rows]
    probs = brute_softmax(scores)
    return sum(p * l for p, l in zip(probs, losses))


def fd_expected_loss_gradient(feature_rows, weights, losses, h=1e-5):
    """Central finite differences of the instance expected loss."""
    grad = []
    for j in range(len(weights)):
        up = list(weights)
        up[j] += h
        down = list(weights)
        down[j] -= h
        grad.append(
            (brute_expected_loss(feature_rows, up, losses)
             - brute_expected_loss(feature_rows, down, losses)) / (2 * h)
        )
    return grad


def random_token_corpus(rng, num_pairs, vocab=("a", "b", "c", "d", "e", "f"),
                        min_len=1, max_len=12, overlap=0.6):
    """Random (hypothesis, reference) pairs with controllable overlap."""
    pairs = []
    for _ in range(num_pairs):
        ref_len = int(rng.integers(max(min_len, 4), max_len + 1))
        ref = tuple(vocab[int(rng.integers(len(vocab)))] for _ in range(ref_len))
        hyp = list(ref)
        for position in range(len(hyp)):
            if rng.random() > overlap:
                hyp[position] = vocab[int(rng.integers(len(vocab)))]
        cut = int(rng.integers(min_len, len(hyp) + 1))
        pairs.append((tuple(hyp[:cut]), ref))
    return pairs
