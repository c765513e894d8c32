"""Task losses on token sequences, all mapping into [0, 1].

Two families are provided behind one small interface: BLEU-based losses
(smoothed per-sentence BLEU for feedback, corpus BLEU for evaluation) and
the 0/1 loss.  Token sequences are assumed to be pre-tokenized; the
tokenizer everywhere is whitespace splitting.

BLEU uses n-gram orders 1..4.  Per-sentence BLEU smooths by flooring a
zero clipped match count to 0.01 (and a zero n-gram total, which occurs
when the hypothesis is shorter than n, to 1).  Corpus BLEU is not
smoothed: a corpus with any zero aggregate precision scores 0.  A
consequence of the per-sentence smoothing is that identical pairs shorter
than 4 tokens score below 1.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Protocol

MAX_ORDER = 4

Tokens = Sequence[str]


class SentenceLoss(Protocol):
    """A task loss on token sequences, mapping into [0, 1], 0 on equality."""

    def evaluate(self, hypothesis: Tokens, reference: Tokens) -> float: ...


@dataclass
class NGramStats:
    """Clipped n-gram match/total counts of one or more sentence pairs.

    ``matches[n-1]`` and ``totals[n-1]`` hold the clipped match count and
    the hypothesis n-gram count for order n.  Stats of different pairs add.
    """

    matches: list[int]
    totals: list[int]
    hyp_len: int
    ref_len: int

    @classmethod
    def zero(cls) -> "NGramStats":
        return cls([0] * MAX_ORDER, [0] * MAX_ORDER, 0, 0)

    def __add__(self, other: "NGramStats") -> "NGramStats":
        return NGramStats(
            [a + b for a, b in zip(self.matches, other.matches)],
            [a + b for a, b in zip(self.totals, other.totals)],
            self.hyp_len + other.hyp_len,
            self.ref_len + other.ref_len,
        )

    def as_row(self) -> list[int]:
        """Flat [matches(1..4), totals(1..4), hyp_len, ref_len] row."""
        return [*self.matches, *self.totals, self.hyp_len, self.ref_len]


def _ngrams(tokens: Tokens, order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def sentence_stats(hypothesis: Tokens, reference: Tokens) -> NGramStats:
    """Clipped n-gram statistics of one hypothesis/reference pair."""
    matches = []
    totals = []
    for order in range(1, MAX_ORDER + 1):
        hyp_counts = _ngrams(hypothesis, order)
        ref_counts = _ngrams(reference, order)
        matches.append(
            sum(min(count, ref_counts[gram]) for gram, count in hyp_counts.items())
        )
        totals.append(max(len(hypothesis) - order + 1, 0))
    return NGramStats(matches, totals, len(hypothesis), len(reference))


def _brevity_penalty(hyp_len: int, ref_len: int) -> float:
    return min(1.0, math.exp(1.0 - ref_len / hyp_len))


def sentence_bleu_smoothed(hypothesis: Tokens, reference: Tokens) -> float:
    """Smoothed per-sentence BLEU in [0, 1].

    Zero clipped match counts are floored to 0.01 and zero totals to 1
    before taking precisions, so every hypothesis gets a nonzero score
    except the empty one, which scores 0.
    """
    if len(reference) == 0:
        raise ValueError("reference must be non-empty")
    if len(hypothesis) == 0:
        return 0.0
    stats = sentence_stats(hypothesis, reference)
    log_precision_sum = 0.0
    for m, t in zip(stats.matches, stats.totals):
        log_precision_sum += math.log((m if m > 0 else 0.01) / max(t, 1))
    return _brevity_penalty(stats.hyp_len, stats.ref_len) * math.exp(
        log_precision_sum / MAX_ORDER
    )


def bleu_from_stats(stats: NGramStats) -> float:
    """Unsmoothed BLEU of aggregate statistics; 0 if any precision is 0."""
    if stats.hyp_len == 0:
        return 0.0
    if any(t == 0 for t in stats.totals) or any(m == 0 for m in stats.matches):
        return 0.0
    log_precision_sum = sum(
        math.log(m / t) for m, t in zip(stats.matches, stats.totals)
    )
    return _brevity_penalty(stats.hyp_len, stats.ref_len) * math.exp(
        log_precision_sum / MAX_ORDER
    )


def corpus_bleu(pairs: Iterable[tuple[Tokens, Tokens]]) -> float:
    """Corpus BLEU of (hypothesis, reference) pairs, without smoothing."""
    total = NGramStats.zero()
    count = 0
    for hypothesis, reference in pairs:
        if len(reference) == 0:
            raise ValueError(f"reference of pair {count} is empty")
        total = total + sentence_stats(hypothesis, reference)
        count += 1
    if count == 0:
        raise ValueError("corpus_bleu needs at least one pair")
    return bleu_from_stats(total)


def zero_one_loss(hypothesis: Tokens, reference: Tokens) -> float:
    """0 iff the token sequences are equal, else 1."""
    return 0.0 if tuple(hypothesis) == tuple(reference) else 1.0


class SmoothedBleuLoss:
    """Per-sentence 1 - BLEU with floored-count smoothing."""

    def evaluate(self, hypothesis: Tokens, reference: Tokens) -> float:
        return 1.0 - sentence_bleu_smoothed(hypothesis, reference)


class ZeroOneLoss:
    """Exact-match loss: 0 on equality, 1 otherwise."""

    def evaluate(self, hypothesis: Tokens, reference: Tokens) -> float:
        return zero_one_loss(hypothesis, reference)
