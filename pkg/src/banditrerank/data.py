"""Ingestion of n-best lists, references and run configuration; emission
of learning curves, weight files and summaries.

N-best grammar (one candidate per line, UTF-8):

    id ||| token token ... ||| feature block ||| total

with `` ||| `` as the field separator.  The feature block is either plain
space-separated reals or the named variant ``name: v1 v2 ...`` whose
values are flattened in declared order.  Ids must be dense: groups appear
in order 0, 1, 2, ... with candidates of one instance on consecutive
lines, in rank order.  Duplicate candidates are kept; they legitimately
reweight the model distribution.  The trailing ``total`` (the base
system's own score) is validated but not stored.

Reference files carry one whitespace-tokenized sentence per line, line i
belonging to instance id i.
"""

from __future__ import annotations

import io
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, fields
from typing import TextIO

import numpy as np

from .model import Candidate, Instance

SEPARATOR = " ||| "

CURVE_HEADER = "run_seed,iteration,epoch,cumulative_loss,test_corpus_bleu"


@dataclass
class Dataset:
    """An ordered list of instances sharing one feature dimension."""

    instances: list[Instance]
    dim: int
    feature_names: list[str] | None = None

    def __len__(self) -> int:
        return len(self.instances)


def _as_lines(stream: Iterable[str] | TextIO) -> Iterator[str]:
    for line in stream:
        yield line.rstrip("\n")


def _parse_feature_block(block: str, lineno: int) -> tuple[list[float], list[str] | None]:
    values: list[float] = []
    names: list[str] = []
    named = False
    current: str | None = None
    group_size = 0

    def flush() -> None:
        if current is None:
            return
        if group_size == 0:
            raise ValueError(f"line {lineno}: feature group {current!r} has no values")
        if group_size == 1:
            names.append(current)
        else:
            names.extend(f"{current}_{i}" for i in range(group_size))

    for token in block.split():
        if token.endswith(":") and len(token) > 1:
            flush()
            named = True
            current = token[:-1]
            group_size = 0
        else:
            try:
                values.append(float(token))
            except ValueError:
                raise ValueError(
                    f"line {lineno}: non-numeric feature value {token!r}"
                ) from None
            group_size += 1
    flush()
    if named and len(names) != len(values):
        raise ValueError(f"line {lineno}: feature values outside a named group")
    if not values:
        raise ValueError(f"line {lineno}: empty feature block")
    return values, (names if named else None)


def parse_nbest(stream: Iterable[str] | TextIO) -> Dataset:
    """Parse an n-best stream into a dataset, preserving candidate order."""
    dim: int | None = None
    feature_names: list[str] | None = None
    instances: list[Instance] = []
    current_id: int | None = None
    current_candidates: list[Candidate] = []

    def close_instance() -> None:
        if current_id is not None:
            instances.append(Instance(id=current_id, candidates=current_candidates))

    for lineno, line in enumerate(_as_lines(stream), start=1):
        if not line.strip():
            continue
        parts = line.split(SEPARATOR)
        if len(parts) != 4:
            raise ValueError(
                f"line {lineno}: expected 4 fields separated by '{SEPARATOR}', got {len(parts)}"
            )
        id_field, hyp_field, feature_field, total_field = parts
        try:
            instance_id = int(id_field)
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer id {id_field!r}") from None
        if instance_id < 0:
            raise ValueError(f"line {lineno}: negative id {instance_id}")
        try:
            float(total_field)
        except ValueError:
            raise ValueError(
                f"line {lineno}: non-numeric total score {total_field!r}"
            ) from None
        values, names = _parse_feature_block(feature_field, lineno)
        if dim is None:
            dim = len(values)
            feature_names = names
        else:
            if len(values) != dim:
                raise ValueError(
                    f"line {lineno}: feature dimension {len(values)} differs from {dim}"
                )
            if names != feature_names:
                raise ValueError(
                    f"line {lineno}: feature naming differs from the first line"
                )
        candidate = Candidate(tokens=tuple(hyp_field.split()), features=np.array(values))
        if instance_id == current_id:
            current_candidates.append(candidate)
        elif current_id is None and instance_id == 0:
            current_id = 0
            current_candidates = [candidate]
        elif current_id is not None and instance_id == current_id + 1:
            close_instance()
            current_id = instance_id
            current_candidates = [candidate]
        else:
            raise ValueError(
                f"line {lineno}: instance id {instance_id} breaks the dense "
                f"0..N-1 grouped order (previous id {current_id})"
            )
    if current_id is None:
        raise ValueError("empty n-best stream")
    close_instance()
    assert dim is not None
    return Dataset(instances=instances, dim=dim, feature_names=feature_names)


def write_nbest(dataset: Dataset, stream: TextIO) -> None:
    """Serialize a dataset back to the n-best grammar (total written as 0).

    ``parse_nbest(write_nbest(d))`` reproduces ``d`` exactly.
    """
    names = dataset.feature_names
    for inst in dataset.instances:
        for cand in inst.candidates:
            if names is None:
                block = " ".join(repr(v) for v in cand.features.tolist())
            else:
                block = " ".join(
                    f"{name}: {v!r}" for name, v in zip(names, cand.features.tolist())
                )
            stream.write(
                f"{inst.id}{SEPARATOR}{' '.join(cand.tokens)}{SEPARATOR}{block}{SEPARATOR}0\n"
            )


def parse_references(stream: Iterable[str] | TextIO) -> list[tuple[str, ...]]:
    """One whitespace-tokenized reference per line, in instance-id order."""
    return [tuple(line.split()) for line in _as_lines(stream)]


def attach_references(dataset: Dataset, references: Sequence[Sequence[str]]) -> None:
    """Pair references with instances by position; counts must match."""
    if len(references) != len(dataset.instances):
        raise ValueError(
            f"{len(references)} references for {len(dataset.instances)} instances"
        )
    for inst, ref in zip(dataset.instances, references):
        inst.reference = tuple(ref)


@dataclass(frozen=True)
class CurveRecord:
    """One learning-curve evaluation point."""

    seed: int
    iteration: int
    epoch: int
    cumulative_loss: float
    test_corpus_bleu: float


def write_curve(records: Iterable[CurveRecord], stream: TextIO) -> None:
    """Emit curve records as CSV, sorted by (seed, iteration).

    Floats are written with ``repr`` (shortest round-trip form), so equal
    runs produce byte-identical files.  Tokens never appear in the CSV, so
    no quoting is needed.
    """
    stream.write(CURVE_HEADER + "\n")
    for r in sorted(records, key=lambda r: (r.seed, r.iteration)):
        stream.write(
            f"{r.seed},{r.iteration},{r.epoch},"
            f"{float(r.cumulative_loss)!r},{float(r.test_corpus_bleu)!r}\n"
        )


def read_weights(stream: Iterable[str] | TextIO) -> np.ndarray:
    """Plain-text weight vector: one real per line."""
    values = [float(line) for line in _as_lines(stream) if line.strip()]
    if not values:
        raise ValueError("empty weight file")
    return np.array(values, dtype=np.float64)


def write_weights(weights: np.ndarray, stream: TextIO) -> None:
    for v in np.asarray(weights, dtype=np.float64).tolist():
        stream.write(f"{v!r}\n")


LEARNER_KINDS = ("bandit", "dueling", "full-info")


@dataclass
class RunConfig:
    """Everything a training run needs beyond the data itself.

    ``eval_every`` is the number of iterations between test-set
    evaluations; ``None`` means once per epoch.  Every field can come from
    a config file (flat ``key = value`` lines) and be overridden by the
    matching CLI flag.
    """

    learner: str = "bandit"
    schedule: str = "inverse-t"
    rate_c: float = 1.0
    delta: float = 0.5
    gamma: float = 0.1
    epochs: int = 1
    seeds: tuple[int, ...] = (0,)
    shuffle: bool = True
    eval_every: int | None = None
    train_nbest: str | None = None
    train_refs: str | None = None
    dev_nbest: str | None = None
    dev_refs: str | None = None
    test_nbest: str | None = None
    test_refs: str | None = None
    warm_start: str | None = None
    out: str = "run"

    def validate(self) -> None:
        if self.learner not in LEARNER_KINDS:
            raise ValueError(f"unknown learner {self.learner!r}, expected one of {LEARNER_KINDS}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.eval_every is not None and self.eval_every < 1:
            raise ValueError(f"eval_every must be >= 1, got {self.eval_every}")


_BOOL_VALUES = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def _parse_bool(value: str) -> bool:
    try:
        return _BOOL_VALUES[value.strip().lower()]
    except KeyError:
        raise ValueError(f"invalid boolean {value!r}") from None


def parse_seeds(value: str) -> tuple[int, ...]:
    return tuple(int(s) for s in value.replace(",", " ").split())


_CONFIG_PARSERS = {
    "learner": str,
    "schedule": str,
    "rate_c": float,
    "delta": float,
    "gamma": float,
    "epochs": int,
    "seeds": parse_seeds,
    "shuffle": _parse_bool,
    "eval_every": int,
    "train_nbest": str,
    "train_refs": str,
    "dev_nbest": str,
    "dev_refs": str,
    "test_nbest": str,
    "test_refs": str,
    "warm_start": str,
    "out": str,
}


def parse_config(stream: Iterable[str] | TextIO) -> dict[str, object]:
    """Parse flat ``key = value`` lines (``#`` comments, blank lines ok)."""
    parsed: dict[str, object] = {}
    for lineno, raw in enumerate(_as_lines(stream), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _CONFIG_PARSERS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        try:
            parsed[key] = _CONFIG_PARSERS[key](value)
        except ValueError as exc:
            raise ValueError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    return parsed


def make_run_config(values: Mapping[str, object]) -> RunConfig:
    """Build and validate a RunConfig from parsed key/value pairs."""
    known = {f.name for f in fields(RunConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    config = RunConfig(**values)
    config.validate()
    return config


def load_path(path: str, parser):
    """Apply a stream parser to a file path."""
    with io.open(path, "r", encoding="utf-8") as handle:
        return parser(handle)
