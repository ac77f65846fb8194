"""Seeded synthetic populations with planted menagerie structure.

Scores come from normal distributions truncated to ``[0, score_max]``,
one profile per planted class. Everything is drawn from a single
``numpy.random.Generator`` stream in a fixed order, so a seed fully
determines the output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field, replace
from typing import Mapping

import numpy as np
from scipy.stats import truncnorm

from .errors import ConfigError
from .menagerie import Category, MenagerieAssignment, tail_count
from .scores import DEFAULT_SCORE_MAX, MatchRecord, Population, ingest_scores


@dataclass(frozen=True)
class ClassProfile:
    """Centers and spreads of the genuine and impostor score distributions."""

    genuine_center: float
    genuine_spread: float
    impostor_center: float
    impostor_spread: float


def default_profiles(separation: float = 10.0, spread: float = 4.0) -> dict[Category, ClassProfile]:
    """Profiles whose low/high modes sit ``separation`` spreads apart.

    Sheep: high genuine, low impostor. Goats drop the genuine mode, wolves
    and lambs raise the impostor mode, worms do both.
    """
    gen_hi, imp_lo = 80.0, 20.0
    gen_lo = gen_hi - separation * spread
    imp_hi = imp_lo + separation * spread
    return {
        Category.SHEEP: ClassProfile(gen_hi, spread, imp_lo, spread),
        Category.GOAT: ClassProfile(gen_lo, spread, imp_lo, spread),
        Category.WOLF_LAMB: ClassProfile(gen_hi, spread, imp_hi, spread),
        Category.WORM: ClassProfile(gen_lo, spread, imp_hi, spread),
    }


@dataclass(frozen=True)
class SynthSpec:
    n_subjects: int = 568
    n_genuine_per_subject: int = 5
    n_impostor_per_subject: int = 20
    seed: int = 0
    score_max: float = DEFAULT_SCORE_MAX
    fractions: Mapping[Category, float] = field(
        default_factory=lambda: {Category.GOAT: 0.025, Category.WOLF_LAMB: 0.025, Category.WORM: 0.0}
    )
    profiles: Mapping[Category, ClassProfile] = field(default_factory=default_profiles)
    score_decimals: int = 4

    def __post_init__(self):
        fractions = {Category(c): float(v) for c, v in self.fractions.items()}
        fractions.pop(Category.SHEEP, None)
        object.__setattr__(self, "fractions", fractions)
        profiles = {Category(c): p for c, p in self.profiles.items()}
        object.__setattr__(self, "profiles", profiles)
        self.validate()

    def validate(self) -> None:
        if self.n_subjects < 2:
            raise ConfigError("n_subjects must be at least 2")
        if self.n_genuine_per_subject < 0 or self.n_impostor_per_subject < 0:
            raise ConfigError("per-subject score counts must be non-negative")
        if self.n_impostor_per_subject > self.n_subjects - 1:
            raise ConfigError("n_impostor_per_subject cannot exceed n_subjects - 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        if any(v < 0 for v in self.fractions.values()) or sum(self.fractions.values()) > 1 + 1e-12:
            raise ConfigError(f"planted fractions must be non-negative and sum to <= 1, got {self.fractions}")
        if sum(self.planted_counts().values()) > self.n_subjects:
            raise ConfigError("planted class counts exceed n_subjects")
        for c, prof in self.profiles.items():
            for center in (prof.genuine_center, prof.impostor_center):
                if not 0 <= center <= self.score_max:
                    raise ConfigError(f"{c.value} profile center {center} outside [0, {self.score_max}]")
            if prof.genuine_spread <= 0 or prof.impostor_spread <= 0:
                raise ConfigError(f"{c.value} profile spreads must be positive")
        needed = {Category.SHEEP} | {c for c, n in self.planted_counts().items() if n}
        absent = needed - set(self.profiles)
        if absent:
            raise ConfigError(f"missing profiles for {sorted(c.value for c in absent)}")

    def planted_counts(self) -> dict[Category, int]:
        """Planted subjects per non-sheep class, ``ceil(fraction * n_subjects)``."""
        return {c: tail_count(f, self.n_subjects) if f > 0 else 0 for c, f in self.fractions.items()}

    def to_dict(self) -> dict:
        return {
            "n_subjects": self.n_subjects,
            "n_genuine_per_subject": self.n_genuine_per_subject,
            "n_impostor_per_subject": self.n_impostor_per_subject,
            "seed": self.seed,
            "score_max": self.score_max,
            "score_decimals": self.score_decimals,
            "fractions": {c.value: v for c, v in sorted(self.fractions.items(), key=lambda kv: kv[0].value)},
            "profiles": {c.value: asdict(p) for c, p in sorted(self.profiles.items(), key=lambda kv: kv[0].value)},
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SynthSpec":
        d = dict(d)
        known = {"n_subjects", "n_genuine_per_subject", "n_impostor_per_subject", "seed",
                 "score_max", "score_decimals", "fractions", "profiles", "separation", "spread"}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown synth spec keys: {sorted(unknown)}")
        profiles = default_profiles(d.pop("separation", 10.0), d.pop("spread", 4.0))
        for name, prof in d.pop("profiles", {}).items():
            profiles[Category(name)] = ClassProfile(**prof)
        kwargs = {k: v for k, v in d.items() if k != "fractions"}
        if "fractions" in d:
            kwargs["fractions"] = {Category(k): v for k, v in d["fractions"].items()}
        try:
            return cls(profiles=profiles, **kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"invalid synth spec: {exc}") from None

    @classmethod
    def from_json(cls, path) -> "SynthSpec":
        with open(path, encoding="utf-8") as fh:
            try:
                return cls.from_dict(json.load(fh))
            except json.JSONDecodeError as exc:
                raise ConfigError(f"synth spec is not valid JSON: {exc}") from None

    def with_seed(self, seed: int) -> "SynthSpec":
        return replace(self, seed=seed)


def benchmark_spec(seed: int = 0, separation: float = 10.0, worms: bool = False) -> SynthSpec:
    """568 subjects with 2.5% goat-side and wolf/lamb-side tails.

    With ``worms=True`` three of the fifteen subjects on each side are
    planted as worms, keeping both tails at fifteen.
    """
    if worms:
        fractions = {Category.GOAT: 0.02, Category.WOLF_LAMB: 0.02, Category.WORM: 0.005}
    else:
        fractions = {Category.GOAT: 0.025, Category.WOLF_LAMB: 0.025, Category.WORM: 0.0}
    return SynthSpec(seed=seed, fractions=fractions, profiles=default_profiles(separation))


def subject_ids(n: int) -> list[str]:
    width = max(4, len(str(n - 1)))
    return [f"S{i:0{width}d}" for i in range(n)]


def _draw(rng, center, spread, upper):
    a = (0.0 - center) / spread
    b = (upper - center) / spread
    return truncnorm.rvs(a, b, loc=center, scale=spread, random_state=rng)


def generate_records(spec: SynthSpec) -> tuple[list[MatchRecord], dict[str, Category]]:
    """Raw match records and the planted class of every subject.

    Planted classes are placed on a seeded random permutation of subject
    ids. Each subject gets ``n_genuine_per_subject`` self-comparisons and
    ``n_impostor_per_subject`` comparisons against distinct other subjects.
    """
    rng = np.random.default_rng(spec.seed)
    ids = subject_ids(spec.n_subjects)
    order = rng.permutation(spec.n_subjects)
    planted: dict[str, Category] = {s: Category.SHEEP for s in ids}
    pos = 0
    for c in (Category.WORM, Category.GOAT, Category.WOLF_LAMB):
        n = spec.planted_counts().get(c, 0)
        for idx in order[pos:pos + n]:
            planted[ids[idx]] = c
        pos += n

    n_gen, n_imp = spec.n_genuine_per_subject, spec.n_impostor_per_subject
    gallery = np.empty((spec.n_subjects, n_imp), dtype=np.int64)
    for i in range(spec.n_subjects):
        # sample from the other n-1 subjects, shifting past the probe's own index
        picks = rng.choice(spec.n_subjects - 1, size=n_imp, replace=False)
        gallery[i] = np.where(picks >= i, picks + 1, picks)

    profs = [spec.profiles[planted[s]] for s in ids]
    gen_c = np.repeat([p.genuine_center for p in profs], n_gen)
    gen_s = np.repeat([p.genuine_spread for p in profs], n_gen)
    imp_c = np.repeat([p.impostor_center for p in profs], n_imp)
    imp_s = np.repeat([p.impostor_spread for p in profs], n_imp)
    gen = _draw(rng, gen_c, gen_s, spec.score_max) if gen_c.size else np.empty(0)
    imp = _draw(rng, imp_c, imp_s, spec.score_max) if imp_c.size else np.empty(0)
    gen = np.clip(np.round(gen, spec.score_decimals), 0.0, spec.score_max)
    imp = np.clip(np.round(imp, spec.score_decimals), 0.0, spec.score_max)

    records = []
    for i, s in enumerate(ids):
        for x in gen[i * n_gen:(i + 1) * n_gen]:
            records.append(MatchRecord(s, s, float(x)))
        for j, x in zip(gallery[i], imp[i * n_imp:(i + 1) * n_imp]):
            records.append(MatchRecord(s, ids[j], float(x)))
    return records, planted


def ground_truth_assignment(planted: Mapping[str, Category]) -> MenagerieAssignment:
    goat_side = [s for s, c in planted.items() if c in (Category.GOAT, Category.WORM)]
    wolf_side = [s for s, c in planted.items() if c in (Category.WOLF_LAMB, Category.WORM)]
    return MenagerieAssignment.from_sides(planted, goat_side, wolf_side, max(len(goat_side), len(wolf_side)))


def generate(spec: SynthSpec) -> tuple[Population, MenagerieAssignment]:
    """Synthetic population and its planted ground-truth assignment."""
    records, planted = generate_records(spec)
    return ingest_scores(records, spec.score_max), ground_truth_assignment(planted)


def ground_truth_csv(planted: Mapping[str, Category]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("subject_id", "planted_class"))
    for s in sorted(planted):
        writer.writerow((s, planted[s].value))
    return buf.getvalue()
