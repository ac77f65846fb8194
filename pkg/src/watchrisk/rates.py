"""Empirical FNR/FPR per menagerie category over a threshold grid.

A comparison is declared a match when ``score >= T``. False negatives are
genuine scores below the threshold, false positives impostor scores at or
above it. Rates are computed over scores, not subjects.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .menagerie import CATEGORIES, MenagerieAssignment
from .scores import Population

ALL = "all"
RATE_GROUPS = tuple(c.value for c in CATEGORIES) + (ALL,)
DEFAULT_THRESHOLDS = (10.0, 50.0, 100.0)


class Decision(str, enum.Enum):
    MATCH = "match"
    NON_MATCH = "non-match"


def decide(score: float, threshold: float) -> Decision:
    return Decision.MATCH if score >= threshold else Decision.NON_MATCH


@dataclass(frozen=True)
class ThresholdGrid:
    thresholds: tuple[float, ...]

    def __post_init__(self):
        t = tuple(float(x) for x in self.thresholds)
        if not t:
            raise ConfigError("threshold grid must not be empty")
        if not all(np.isfinite(t)):
            raise ConfigError("thresholds must be finite")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ConfigError(f"thresholds must be strictly increasing, got {list(t)}")
        object.__setattr__(self, "thresholds", t)

    def __len__(self):
        return len(self.thresholds)

    def __iter__(self):
        return iter(self.thresholds)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.thresholds, dtype=float)

    def check_range(self, score_max: float) -> None:
        if self.thresholds[0] < 0 or self.thresholds[-1] > score_max:
            raise ConfigError(f"thresholds must lie in [0, {score_max}], got {list(self.thresholds)}")

    @classmethod
    def parse(cls, text: str) -> "ThresholdGrid":
        """Parse ``"10,50,100"``."""
        try:
            values = [float(x) for x in text.split(",") if x.strip()]
        except ValueError:
            raise ConfigError(f"cannot parse threshold list {text!r}") from None
        return cls(tuple(values))

    @classmethod
    def uniform(cls, start: float, stop: float, num: int) -> "ThresholdGrid":
        return cls(tuple(np.linspace(start, stop, num)))


@dataclass(frozen=True)
class CategoryErrorRates:
    """Error counts per rate group (four categories plus the pooled ``all``).

    ``fn_counts[g][i]`` is the number of genuine scores below threshold ``i``
    and ``fp_counts[g][i]`` the number of impostor scores at or above it.
    A group with no scores of a class has an undefined rate for that class,
    returned as ``None`` rather than zero.
    """

    grid: ThresholdGrid
    fn_counts: Mapping[str, np.ndarray]
    fp_counts: Mapping[str, np.ndarray]
    n_genuine: Mapping[str, int]
    n_impostor: Mapping[str, int]
    n_subjects: Mapping[str, int]

    def fnr(self, group: str) -> np.ndarray | None:
        group = str(group)
        n = self.n_genuine[group]
        return self.fn_counts[group] / n if n else None

    def fpr(self, group: str) -> np.ndarray | None:
        group = str(group)
        n = self.n_impostor[group]
        return self.fp_counts[group] / n if n else None

    def rows(self):
        """Long-form ``(group, threshold, fnr, fpr, n_genuine, n_impostor)`` tuples."""
        for g in RATE_GROUPS:
            fnr, fpr = self.fnr(g), self.fpr(g)
            for i, t in enumerate(self.grid):
                yield (
                    g,
                    t,
                    None if fnr is None else float(fnr[i]),
                    None if fpr is None else float(fpr[i]),
                    self.n_genuine[g],
                    self.n_impostor[g],
                )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("category", "threshold", "fnr", "fpr", "n_genuine", "n_impostor"))
        for g, t, fnr, fpr, ng, ni in self.rows():
            writer.writerow((g, repr(t), _fmt(fnr), _fmt(fpr), ng, ni))
        return buf.getvalue()


def _fmt(x):
    return "" if x is None else repr(x)


def error_counts(genuine: Sequence[float], impostor: Sequence[float], thresholds) -> tuple[np.ndarray, np.ndarray]:
    """Counts of genuine scores ``< T`` and impostor scores ``>= T`` for each ``T``."""
    t = np.asarray(thresholds, dtype=float)
    gen = np.sort(np.asarray(genuine, dtype=float))
    imp = np.sort(np.asarray(impostor, dtype=float))
    fn = np.searchsorted(gen, t, side="left")
    fp = imp.size - np.searchsorted(imp, t, side="left")
    return fn.astype(np.int64), fp.astype(np.int64)


def sweep(pop: Population, assign: MenagerieAssignment, grid: ThresholdGrid) -> CategoryErrorRates:
    """Count errors for every category and the pooled population at each threshold."""
    grid.check_range(pop.score_max)
    missing = [s for s in assign.categories if s not in pop.genuine]
    if missing:
        raise ConfigError(f"assignment names subjects absent from the population: {missing[:5]}")
    members = {g: [] for g in RATE_GROUPS}
    for s, c in assign.categories.items():
        members[c.value].append(s)
        members[ALL].append(s)
    fn_counts, fp_counts, n_gen, n_imp, n_sub = {}, {}, {}, {}, {}
    for g, subs in members.items():
        gen = [x for s in subs for x in pop.genuine[s]]
        imp = [x for s in subs for x in pop.impostor[s]]
        fn, fp = error_counts(gen, imp, grid.thresholds)
        fn.setflags(write=False)
        fp.setflags(write=False)
        fn_counts[g], fp_counts[g] = fn, fp
        n_gen[g], n_imp[g], n_sub[g] = len(gen), len(imp), len(subs)
    return CategoryErrorRates(grid, fn_counts, fp_counts, n_gen, n_imp, n_sub)
