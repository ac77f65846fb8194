"""Relative-entropy risk for individual travelers (Detector II).

A traveler's score histogram is compared with pooled reference histograms
of the sheep, goat and wolf/lamb categories. The loss-weighted sum of the
three divergences is the traveler's Bayes risk.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, IncompatibleHistogramError, InsufficientDataError
from .menagerie import Category, MenagerieAssignment
from .scores import DEFAULT_SCORE_MAX, Population

SCORE_CLASSES = ("genuine", "impostor")
REFERENCE_CATEGORIES = (Category.GOAT, Category.WOLF_LAMB, Category.SHEEP)
ORIENTATIONS = ("ref-first", "traveler-first")

# worms carry both goat and wolf/lamb traits, so they feed both references
_REFERENCE_MEMBERS = {
    Category.GOAT: (Category.GOAT, Category.WORM),
    Category.WOLF_LAMB: (Category.WOLF_LAMB, Category.WORM),
    Category.SHEEP: (Category.SHEEP,),
}


class Band(str, enum.Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


BAND_BY_CATEGORY = {
    Category.GOAT: Band.HIGH,
    Category.WOLF_LAMB: Band.MEDIUM,
    Category.SHEEP: Band.LOW,
}


@dataclass(frozen=True)
class Binning:
    n_bins: int = 20
    score_max: float = DEFAULT_SCORE_MAX
    epsilon: float = 0.5

    def __post_init__(self):
        if int(self.n_bins) != self.n_bins or self.n_bins < 2:
            raise ConfigError(f"n_bins must be an integer >= 2, got {self.n_bins!r}")
        if not (self.score_max > 0 and math.isfinite(self.score_max)):
            raise ConfigError(f"score_max must be positive, got {self.score_max!r}")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon!r}")
        object.__setattr__(self, "n_bins", int(self.n_bins))

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(0.0, self.score_max, self.n_bins + 1)


@dataclass(frozen=True, eq=False)
class ScoreHistogram:
    """Additively smoothed discrete distribution over equal-width score bins.

    ``p[j] = (counts[j] + epsilon) / (n + n_bins * epsilon)`` so every bin
    has positive mass and divergences stay finite.
    """

    bin_edges: np.ndarray
    counts: np.ndarray
    epsilon: float
    p: np.ndarray = field(init=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=float)
        edges = np.asarray(self.bin_edges, dtype=float)
        if edges.ndim != 1 or edges.size != counts.size + 1:
            raise ValueError("bin_edges must have one more entry than counts")
        p = (counts + self.epsilon) / (counts.sum() + counts.size * self.epsilon)
        for name, arr in (("bin_edges", edges), ("counts", counts), ("p", p)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n(self) -> int:
        return int(round(self.counts.sum()))

    @property
    def n_bins(self) -> int:
        return self.counts.size

    def same_grid(self, other: "ScoreHistogram") -> bool:
        return np.array_equal(self.bin_edges, other.bin_edges)


def bin_counts(scores: Sequence[float], binning: Binning) -> np.ndarray:
    x = np.asarray(scores, dtype=float)
    if x.size and (x.min() < 0 or x.max() > binning.score_max):
        raise ConfigError(f"scores must lie in [0, {binning.score_max}]")
    counts, _ = np.histogram(x, bins=binning.edges)
    return counts.astype(float)


def build_histogram(
    scores: Sequence[float],
    n_bins: int = 20,
    score_max: float = DEFAULT_SCORE_MAX,
    epsilon: float = 0.5,
) -> ScoreHistogram:
    """Smoothed histogram of ``scores`` on ``n_bins`` equal bins over ``[0, score_max]``."""
    binning = Binning(n_bins, score_max, epsilon)
    if len(scores) == 0:
        raise InsufficientDataError("cannot build a histogram from an empty score list")
    return ScoreHistogram(binning.edges, bin_counts(scores, binning), binning.epsilon)


def relative_entropy(p, q) -> float:
    """``sum p_j log2(p_j / q_j)`` for strictly positive distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise IncompatibleHistogramError(f"shape mismatch {p.shape} vs {q.shape}")
    return float(np.sum(p * np.log2(p / q)))


def kl_divergence(P: ScoreHistogram, Q: ScoreHistogram) -> float:
    """Relative entropy of ``P`` from ``Q`` in bits."""
    if not P.same_grid(Q):
        raise IncompatibleHistogramError("histograms are defined on different bin grids")
    return relative_entropy(P.p, Q.p)


@dataclass(frozen=True)
class LossVector:
    sheep: float = 0.1
    goat: float = 0.6
    wolf_lamb: float = 0.3

    def __post_init__(self):
        vals = (self.sheep, self.goat, self.wolf_lamb)
        if any(not (math.isfinite(v) and v >= 0) for v in vals):
            raise ConfigError(f"losses must be finite and non-negative, got {vals}")
        if not any(v > 0 for v in vals):
            raise ConfigError("at least one loss must be positive")

    def __getitem__(self, category: Category) -> float:
        return getattr(self, Category(category).value)

    @classmethod
    def parse(cls, text: str) -> "LossVector":
        """Parse ``"sheep,goat,wolf_lamb"``, e.g. ``"0.1,0.6,0.3"``."""
        try:
            s, g, wl = (float(x) for x in text.split(","))
        except ValueError:
            raise ConfigError(f"loss must be three comma-separated numbers, got {text!r}") from None
        return cls(s, g, wl)

    def as_list(self) -> list[float]:
        return [self.sheep, self.goat, self.wolf_lamb]


@dataclass(frozen=True)
class CategoryReference:
    """Pooled reference histograms keyed by ``(score_class, category)``.

    A reference is ``None`` when no member contributed scores of that class.
    """

    binning: Binning
    histograms: Mapping[tuple[str, Category], ScoreHistogram | None]
    members: Mapping[Category, tuple[str, ...]]

    def get(self, score_class: str, category: Category) -> ScoreHistogram | None:
        return self.histograms[(score_class, Category(category))]

    def missing(self, score_class: str) -> list[Category]:
        return [c for c in REFERENCE_CATEGORIES if self.get(score_class, c) is None]

    def summary(self) -> dict:
        return {
            "members": {c.value: len(self.members[c]) for c in REFERENCE_CATEGORIES},
            "n_scores": {
                f"{sc}/{c.value}": (None if h is None else h.n)
                for (sc, c), h in sorted(self.histograms.items(), key=lambda kv: (kv[0][0], kv[0][1].value))
            },
        }


def build_references(
    pop: Population, assign: MenagerieAssignment, binning: Binning | None = None
) -> CategoryReference:
    """Pool member scores per reference category and score class, then histogram.

    Worms are pooled into both the goat and the wolf/lamb reference.
    """
    binning = binning or Binning(score_max=pop.score_max)
    histograms = {}
    members = {}
    for ref_cat, cats in _REFERENCE_MEMBERS.items():
        subs = tuple(s for c in cats for s in assign.members(c))
        members[ref_cat] = tuple(sorted(subs))
        for sc in SCORE_CLASSES:
            pooled = [x for s in subs for x in pop.scores(s, sc)]
            histograms[(sc, ref_cat)] = (
                ScoreHistogram(binning.edges, bin_counts(pooled, binning), binning.epsilon)
                if pooled
                else None
            )
    return CategoryReference(binning, histograms, members)


def pool_histograms(hists: Iterable[ScoreHistogram]) -> ScoreHistogram:
    """Count-weighted average of member distributions, smoothed once.

    Equivalent to histogramming the concatenated member scores.
    """
    hists = list(hists)
    if not hists:
        raise InsufficientDataError("nothing to pool")
    first = hists[0]
    if not all(first.same_grid(h) for h in hists[1:]):
        raise IncompatibleHistogramError("cannot pool histograms on different grids")
    n = np.array([h.counts.sum() for h in hists])
    raw = np.array([h.counts / h.counts.sum() for h in hists])
    weighted = (n[:, None] * raw).sum(axis=0)
    return ScoreHistogram(first.bin_edges, weighted, first.epsilon)


def traveler_bayes_risk(d_goat: float, d_wl: float, d_sheep: float, loss: LossVector | None = None) -> float:
    """Loss-weighted sum of the three category divergences."""
    loss = loss or LossVector()
    return loss.goat * d_goat + loss.wolf_lamb * d_wl + loss.sheep * d_sheep


@dataclass(frozen=True)
class TravelerRisk:
    traveler_id: str
    score_class: str | None
    divergences: Mapping[Category, float | None]
    r: float | None
    nearest_category: Category | None
    band: Band | None
    n_scores: int | None = None
    missing: tuple[Category, ...] = ()

    @property
    def complete(self) -> bool:
        return not self.missing

    def to_dict(self) -> dict:
        return {
            "traveler_id": self.traveler_id,
            "class": self.score_class,
            "d_goat": self.divergences.get(Category.GOAT),
            "d_wl": self.divergences.get(Category.WOLF_LAMB),
            "d_sheep": self.divergences.get(Category.SHEEP),
            "r": self.r,
            "nearest_category": None if self.nearest_category is None else self.nearest_category.value,
            "band": None if self.band is None else self.band.value,
            "n_scores": self.n_scores,
            "missing_references": [c.value for c in self.missing],
        }


def _nearest(divergences: Mapping[Category, float | None]) -> Category | None:
    # ties go to the higher-risk category (goat, then wolf/lamb, then sheep)
    best = None
    for c in REFERENCE_CATEGORIES:
        d = divergences.get(c)
        if d is not None and (best is None or d < divergences[best]):
            best = c
    return best


def risk_from_divergences(
    d_goat: float,
    d_wl: float,
    d_sheep: float,
    loss: LossVector | None = None,
    traveler_id: str = "",
    score_class: str | None = None,
    n_scores: int | None = None,
) -> TravelerRisk:
    """Build a :class:`TravelerRisk` from precomputed divergences."""
    divs = {Category.GOAT: float(d_goat), Category.WOLF_LAMB: float(d_wl), Category.SHEEP: float(d_sheep)}
    if any(not (math.isfinite(d) and d >= 0) for d in divs.values()):
        raise ConfigError(f"divergences must be finite and non-negative, got {list(divs.values())}")
    nearest = _nearest(divs)
    return TravelerRisk(
        traveler_id=traveler_id,
        score_class=score_class,
        divergences=divs,
        r=traveler_bayes_risk(d_goat, d_wl, d_sheep, loss),
        nearest_category=nearest,
        band=BAND_BY_CATEGORY[nearest],
        n_scores=n_scores,
    )


def assess_traveler(
    traveler_id: str,
    scores: Sequence[float],
    refs: CategoryReference,
    loss: LossVector | None = None,
    score_class: str = "genuine",
    orientation: str = "ref-first",
    min_scores: int = 5,
) -> TravelerRisk:
    """Divergences, Bayes risk and risk band for one traveler's scores.

    With ``orientation="ref-first"`` each divergence is ``D(reference || traveler)``.
    Raises :class:`InsufficientDataError` below ``min_scores`` scores. When a
    reference is unavailable the result lists it under ``missing`` and
    carries no risk or band.
    """
    if orientation not in ORIENTATIONS:
        raise ConfigError(f"orientation must be one of {ORIENTATIONS}, got {orientation!r}")
    if score_class not in SCORE_CLASSES:
        raise ConfigError(f"score_class must be one of {SCORE_CLASSES}, got {score_class!r}")
    if len(scores) < min_scores:
        raise InsufficientDataError(
            f"traveler {traveler_id!r} has {len(scores)} {score_class} scores, needs {min_scores}"
        )
    b = refs.binning
    h = ScoreHistogram(b.edges, bin_counts(scores, b), b.epsilon)
    divs: dict[Category, float | None] = {}
    for c in REFERENCE_CATEGORIES:
        ref = refs.get(score_class, c)
        if ref is None:
            divs[c] = None
        elif orientation == "ref-first":
            divs[c] = kl_divergence(ref, h)
        else:
            divs[c] = kl_divergence(h, ref)
    missing = tuple(c for c in REFERENCE_CATEGORIES if divs[c] is None)
    if missing:
        return TravelerRisk(traveler_id, score_class, divs, None, _nearest(divs), None, len(scores), missing)
    risk = risk_from_divergences(
        divs[Category.GOAT], divs[Category.WOLF_LAMB], divs[Category.SHEEP], loss,
        traveler_id, score_class, len(scores),
    )
    return risk


def assess_travelers(
    pop: Population,
    refs: CategoryReference,
    traveler_ids: Iterable[str] | None = None,
    loss: LossVector | None = None,
    orientation: str = "ref-first",
    min_scores: int = 5,
    score_classes: Sequence[str] = SCORE_CLASSES,
) -> tuple[list[TravelerRisk], list[dict]]:
    """Assess each traveler for each score class; return results and skip records.

    Travelers default to every subject in ``pop``. Unknown ids and classes
    with too few scores are reported as skipped rather than raised.
    """
    ids = pop.subjects if traveler_ids is None else list(traveler_ids)
    results, skipped = [], []
    for tid in ids:
        if tid not in pop.genuine:
            skipped.append({"traveler_id": tid, "class": None, "reason": "unknown traveler id"})
            continue
        for sc in score_classes:
            try:
                results.append(
                    assess_traveler(tid, pop.scores(tid, sc), refs, loss, sc, orientation, min_scores)
                )
            except InsufficientDataError as exc:
                skipped.append({"traveler_id": tid, "class": sc, "reason": str(exc)})
    return results, skipped
