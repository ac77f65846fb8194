"""Doddington menagerie categorization by tail selection on aggregate scores.

The ``k`` subjects with the lowest genuine aggregate form the goat side and
the ``k`` subjects with the highest impostor aggregate form the wolf/lamb
side. Subjects on both sides are worms; everyone else is a sheep.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigError
from .scores import Population, normalize_aggregator, subject_aggregates


class Category(str, enum.Enum):
    SHEEP = "sheep"
    GOAT = "goat"
    WOLF_LAMB = "wolf_lamb"
    WORM = "worm"

    def __str__(self):
        return self.value


CATEGORIES = tuple(Category)


@dataclass(frozen=True)
class MenagerieConfig:
    tail_fraction: float = 0.025
    aggregator: str = "mean"
    # ties at the k-th rank resolve by ascending subject id; no other rule is offered
    tie_break: str = "subject_id"

    def __post_init__(self):
        if not 0 < self.tail_fraction < 0.5:
            raise ConfigError(f"tail_fraction must lie in (0, 0.5), got {self.tail_fraction!r}")
        object.__setattr__(self, "aggregator", normalize_aggregator(self.aggregator))
        if self.tie_break != "subject_id":
            raise ConfigError(f"unsupported tie_break {self.tie_break!r}")


def tail_count(tail_fraction: float, n: int) -> int:
    """``ceil(tail_fraction * n)``, robust to binary rounding of the product."""
    # 0.025 * 120 evaluates to 3.0000000000000004; snap before taking the ceiling
    product = tail_fraction * n
    nearest = round(product)
    if math.isclose(product, nearest, rel_tol=1e-12, abs_tol=1e-12):
        return int(nearest)
    return math.ceil(product)


def minimum_subjects(tail_fraction: float) -> int:
    """Smallest population for which ``tail_fraction * n >= 1``."""
    return math.ceil(1.0 / tail_fraction - 1e-9)


@dataclass(frozen=True)
class MenagerieAssignment:
    categories: Mapping[str, Category]
    k: int
    goat_side: tuple[str, ...] = ()
    wolf_side: tuple[str, ...] = ()

    @property
    def n_subjects(self) -> int:
        return len(self.categories)

    def members(self, category: Category) -> list[str]:
        category = Category(category)
        return sorted(s for s, c in self.categories.items() if c is category)

    def counts(self) -> dict[str, int]:
        return {c.value: len(self.members(c)) for c in CATEGORIES}

    def fractions(self) -> dict[Category, float]:
        n = self.n_subjects
        return {c: (len(self.members(c)) / n if n else 0.0) for c in CATEGORIES}

    def to_json(self) -> dict[str, str]:
        return {s: self.categories[s].value for s in sorted(self.categories)}

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("subject_id", "category"))
        for s in sorted(self.categories):
            writer.writerow((s, self.categories[s].value))
        return buf.getvalue()

    @classmethod
    def from_sides(cls, subjects, goat_side, wolf_side, k: int) -> "MenagerieAssignment":
        goat_side = set(goat_side)
        wolf_side = set(wolf_side)
        categories = {}
        for s in sorted(subjects):
            if s in goat_side and s in wolf_side:
                categories[s] = Category.WORM
            elif s in goat_side:
                categories[s] = Category.GOAT
            elif s in wolf_side:
                categories[s] = Category.WOLF_LAMB
            else:
                categories[s] = Category.SHEEP
        return cls(categories, k, tuple(sorted(goat_side)), tuple(sorted(wolf_side)))


def categorize(pop: Population, cfg: MenagerieConfig | None = None) -> MenagerieAssignment:
    """Assign every eligible subject of ``pop`` to exactly one category."""
    cfg = cfg or MenagerieConfig()
    agg = subject_aggregates(pop, cfg.aggregator)
    subjects = sorted(agg.values)
    n = len(subjects)
    k = tail_count(cfg.tail_fraction, n)
    if n * cfg.tail_fraction < 1 - 1e-12:
        need = minimum_subjects(cfg.tail_fraction)
        raise ConfigError(
            f"tail_fraction {cfg.tail_fraction} needs at least {need} eligible subjects, got {n}"
        )
    goat_side = sorted(subjects, key=lambda s: (agg.genuine(s), s))[:k]
    wolf_side = sorted(subjects, key=lambda s: (-agg.impostor(s), s))[:k]
    return MenagerieAssignment.from_sides(subjects, goat_side, wolf_side, k)


def category_members(assign: MenagerieAssignment, c: Category) -> list[str]:
    """Sorted subject ids assigned to category ``c``."""
    return assign.members(c)
