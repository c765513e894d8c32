"""Shared fixtures and small dataset builders."""

from __future__ import annotations

import numpy as np
import pytest

from banditrerank.model import Candidate, Instance


def random_instance(rng: np.random.Generator, k: int, d: int, instance_id: int = 0) -> Instance:
    features = rng.uniform(-1.0, 1.0, size=(k, d))
    return Instance(
        id=instance_id, candidates=[Candidate((), row) for row in features]
    )


VOCAB = ("the", "cat", "sat", "on", "a", "mat", "today", "again", "happily", "slowly")


def separable_token_dataset(num_instances: int, num_candidates: int, seed: int = 0):
    """Instances whose candidate 0 equals the reference, with informative
    features: feature 0 counts (negated) corrupted tokens, features 1-2 noise.

    Returns (instances, references) without attaching the references.
    """
    rng = np.random.default_rng(seed)
    instances = []
    references = []
    for i in range(num_instances):
        length = int(rng.integers(5, 9))
        reference = tuple(VOCAB[int(rng.integers(len(VOCAB)))] for _ in range(length))
        candidates = []
        for j in range(num_candidates):
            tokens = list(reference)
            for position in rng.choice(length, size=min(j, length), replace=False):
                tokens[position] = f"junk{int(rng.integers(100))}"
            features = np.array([-float(j) + 0.01 * rng.normal(), rng.normal(), rng.normal()])
            candidates.append(Candidate(tuple(tokens), features))
        instances.append(Instance(id=i, candidates=candidates))
        references.append(reference)
    return instances, references


def nbest_lines(instances) -> list[str]:
    lines = []
    for inst in instances:
        for cand in inst.candidates:
            feats = " ".join(repr(v) for v in cand.features.tolist())
            lines.append(f"{inst.id} ||| {' '.join(cand.tokens)} ||| {feats} ||| 0")
    return lines


def write_token_dataset(tmp_path, num_instances=6, num_candidates=4, seed=0,
                        prefix="data"):
    """Write a separable token dataset as (nbest, refs) files; returns paths."""
    instances, references = separable_token_dataset(num_instances, num_candidates, seed)
    nbest = tmp_path / f"{prefix}.nbest"
    refs = tmp_path / f"{prefix}.refs"
    nbest.write_text("\n".join(nbest_lines(instances)) + "\n", encoding="utf-8")
    refs.write_text("\n".join(" ".join(r) for r in references) + "\n", encoding="utf-8")
    return nbest, refs


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
