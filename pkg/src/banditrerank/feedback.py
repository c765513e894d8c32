"""Simulated feedback environment with hidden references.

The oracle holds the reference token sequences and answers loss queries
about hypotheses without ever revealing the references themselves: its
public surface returns only scalar losses, winners and counters.  Every
query is counted, so the cost of one-point versus two-point feedback (one
versus two loss evaluations per round) is directly observable.

Counter updates are plain attribute increments, atomic under the CPython
GIL; apart from the counters each query is stateless.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .losses import SentenceLoss


@dataclass(frozen=True)
class DuelOutcome:
    """Result of a two-point comparison: winner plus both loss values.

    ``winner`` is ``"A"`` or ``"B"`` for a strictly smaller loss and
    ``"tie"`` otherwise.  Loss values are exposed for logging; a
    preference-based learner should consume only the winner.
    """

    winner: str
    loss_a: float
    loss_b: float


@dataclass(frozen=True)
class QueryReport:
    one_point: int
    two_point: int

    @property
    def loss_evaluations(self) -> int:
        """Total underlying loss evaluations (two per two-point query)."""
        return self.one_point + 2 * self.two_point


class FeedbackOracle:
    """Answers one-point and two-point loss queries against hidden references."""

    def __init__(self, loss: SentenceLoss, references: Mapping[int, Sequence[str]]):
        self._loss = loss
        self._references = {int(i): tuple(ref) for i, ref in references.items()}
        self._one_point = 0
        self._two_point = 0

    @classmethod
    def from_dataset(cls, loss, dataset) -> "FeedbackOracle":
        """Build an oracle from the references attached to a dataset."""
        refs = {}
        for inst in dataset.instances:
            if inst.reference is None:
                raise ValueError(f"instance {inst.id} has no reference")
            refs[inst.id] = inst.reference
        return cls(loss, refs)

    def known_ids(self) -> frozenset[int]:
        """Ids the oracle can answer for (ids only, never the references)."""
        return frozenset(self._references)

    def _reference(self, instance_id: int) -> tuple[str, ...]:
        try:
            return self._references[instance_id]
        except KeyError:
            raise KeyError(f"oracle has no reference for instance id {instance_id}") from None

    def one_point(self, instance_id: int, hypothesis: Sequence[str]) -> float:
        """Loss of one hypothesis against the hidden reference."""
        reference = self._reference(instance_id)
        self._one_point += 1
        return self._loss.evaluate(tuple(hypothesis), reference)

    def two_point(
        self, instance_id: int, hyp_a: Sequence[str], hyp_b: Sequence[str]
    ) -> DuelOutcome:
        """Compare two hypotheses; the strictly smaller loss wins."""
        reference = self._reference(instance_id)
        self._two_point += 1
        loss_a = self._loss.evaluate(tuple(hyp_a), reference)
        loss_b = self._loss.evaluate(tuple(hyp_b), reference)
        if loss_a < loss_b:
            winner = "A"
        elif loss_b < loss_a:
            winner = "B"
        else:
            winner = "tie"
        return DuelOutcome(winner=winner, loss_a=loss_a, loss_b=loss_b)

    def query_report(self) -> QueryReport:
        return QueryReport(one_point=self._one_point, two_point=self._two_point)
