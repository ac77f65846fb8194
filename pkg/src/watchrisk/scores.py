"""Match-record ingestion and per-subject score populations.

A record is *genuine* when probe and gallery identities coincide and
*impostor* otherwise. Impostor scores are attributed to the probe subject.
"""

from __future__ import annotations

import csv
import io
import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, IngestError, ScoreRangeError

DEFAULT_SCORE_MAX = 100.0
CSV_HEADER = ("probe_id", "gallery_id", "score")

AGGREGATORS = ("mean", "extreme")
_AGGREGATOR_ALIASES = {"min-genuine/max-impostor": "extreme"}


@dataclass(frozen=True)
class MatchRecord:
    probe_id: str
    gallery_id: str
    score: float

    def __post_init__(self):
        if not self.probe_id or not self.gallery_id:
            raise IngestError("probe_id and gallery_id must be non-empty")
        if not math.isfinite(self.score) or self.score < 0:
            raise ScoreRangeError(f"score must be finite and non-negative, got {self.score!r}")

    @property
    def is_genuine(self) -> bool:
        return self.probe_id == self.gallery_id


@dataclass(frozen=True)
class Population:
    """Immutable genuine/impostor score lists keyed by subject.

    Score tuples are stored sorted so that a population does not depend on
    the order its records arrived in.
    """

    genuine: Mapping[str, tuple[float, ...]]
    impostor: Mapping[str, tuple[float, ...]]
    score_max: float = DEFAULT_SCORE_MAX
    subjects: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        subjects = sorted(set(self.genuine) | set(self.impostor))
        object.__setattr__(self, "subjects", tuple(subjects))
        object.__setattr__(
            self, "genuine", {s: tuple(sorted(self.genuine.get(s, ()))) for s in subjects}
        )
        object.__setattr__(
            self, "impostor", {s: tuple(sorted(self.impostor.get(s, ()))) for s in subjects}
        )

    def __len__(self):
        return len(self.subjects)

    @property
    def eligible(self) -> tuple[str, ...]:
        """Subjects with at least one genuine and one impostor score."""
        return tuple(s for s in self.subjects if self.genuine[s] and self.impostor[s])

    @property
    def ineligible(self) -> tuple[str, ...]:
        return tuple(s for s in self.subjects if not (self.genuine[s] and self.impostor[s]))

    def scores(self, subject: str, score_class: str) -> np.ndarray:
        """Scores of one subject as a float array; ``score_class`` is genuine or impostor."""
        if score_class == "genuine":
            return np.asarray(self.genuine.get(subject, ()), dtype=float)
        if score_class == "impostor":
            return np.asarray(self.impostor.get(subject, ()), dtype=float)
        raise ValueError(f"unknown score class {score_class!r}")

    def n_records(self, subject: str) -> int:
        return len(self.genuine.get(subject, ())) + len(self.impostor.get(subject, ()))


def ingest_scores(records: Iterable, score_max: float = DEFAULT_SCORE_MAX) -> Population:
    """Partition match records into a :class:`Population`.

    ``records`` may yield :class:`MatchRecord` instances or plain
    ``(probe_id, gallery_id, score)`` triples. Subjects lacking one of the
    two score classes are kept; they simply do not appear in
    :attr:`Population.eligible`.
    """
    if not score_max > 0 or not math.isfinite(score_max):
        raise ConfigError(f"score_max must be positive and finite, got {score_max!r}")
    genuine: dict[str, list[float]] = defaultdict(list)
    impostor: dict[str, list[float]] = defaultdict(list)
    for rec in records:
        if not isinstance(rec, MatchRecord):
            rec = MatchRecord(str(rec[0]), str(rec[1]), float(rec[2]))
        if rec.score > score_max:
            raise ScoreRangeError(f"score {rec.score!r} exceeds score_max {score_max!r}")
        if rec.is_genuine:
            genuine[rec.probe_id].append(rec.score)
            impostor.setdefault(rec.probe_id, [])
        else:
            impostor[rec.probe_id].append(rec.score)
            genuine.setdefault(rec.probe_id, [])
    return Population(dict(genuine), dict(impostor), float(score_max))


def iter_csv_records(lines: Iterable[str], score_max: float | None = None):
    """Yield :class:`MatchRecord` from CSV text lines.

    The first non-comment line must be the ``probe_id,gallery_id,score``
    header. Lines starting with ``#`` and blank lines are skipped. Errors
    report 1-based line numbers.
    """
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        text = raw.strip()
        if not text or text.startswith("#"):
            continue
        row = next(csv.reader([text]))
        if not header_seen:
            if tuple(c.strip() for c in row) != CSV_HEADER:
                raise IngestError(f"expected header {','.join(CSV_HEADER)!r}, got {text!r}", lineno)
            header_seen = True
            continue
        if len(row) != 3:
            raise IngestError(f"expected 3 fields, got {len(row)}", lineno)
        probe, gallery, score_text = (c.strip() for c in row)
        try:
            score = float(score_text)
        except ValueError:
            raise IngestError(f"non-numeric score {score_text!r}", lineno) from None
        try:
            rec = MatchRecord(probe, gallery, score)
        except IngestError as exc:
            raise type(exc)(str(exc), lineno) from None
        if score_max is not None and score > score_max:
            raise ScoreRangeError(f"score {score!r} exceeds score_max {score_max!r}", lineno)
        yield rec


def read_scores_csv(source, score_max: float = DEFAULT_SCORE_MAX) -> Population:
    """Load a population from a scores CSV path or open text stream."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            return ingest_scores(iter_csv_records(fh, score_max), score_max)
    return ingest_scores(iter_csv_records(source, score_max), score_max)


def write_scores_csv(records: Iterable[MatchRecord], path) -> None:
    """Write records in the canonical scores CSV layout."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow((rec.probe_id, rec.gallery_id, repr(float(rec.score))))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(buf.getvalue())


@dataclass(frozen=True)
class SubjectAggregates:
    """Per-subject ``(genuine_agg, impostor_agg)`` pairs plus skipped subjects."""

    aggregator: str
    values: Mapping[str, tuple[float, float]]
    skipped: tuple[str, ...] = ()

    def genuine(self, subject: str) -> float:
        return self.values[subject][0]

    def impostor(self, subject: str) -> float:
        return self.values[subject][1]


def normalize_aggregator(name: str) -> str:
    name = _AGGREGATOR_ALIASES.get(name, name)
    if name not in AGGREGATORS:
        raise ConfigError(f"unknown aggregator {name!r}; choose from {', '.join(AGGREGATORS)}")
    return name


def subject_aggregates(pop: Population, aggregator: str = "mean") -> SubjectAggregates:
    """Reduce each eligible subject's score lists to one scalar per class.

    ``mean`` averages both lists. ``extreme`` takes the minimum genuine and
    the maximum impostor score, the worst case for each tail.
    """
    aggregator = normalize_aggregator(aggregator)
    values = {}
    for s in pop.eligible:
        gen = np.asarray(pop.genuine[s], dtype=float)
        imp = np.asarray(pop.impostor[s], dtype=float)
        if aggregator == "mean":
            values[s] = (_bounded_mean(gen), _bounded_mean(imp))
        else:
            values[s] = (float(gen.min()), float(imp.max()))
    return SubjectAggregates(aggregator, values, pop.ineligible)


def _bounded_mean(x: np.ndarray) -> float:
    # rounding in the sum can push the mean of near-equal values past the extremes
    return float(np.clip(math.fsum(x) / len(x), x.min(), x.max()))
