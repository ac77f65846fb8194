"""Multiparametric cost assessment over menagerie categories (Detector I).

Costs are attributed by category: false negatives to goats and worms,
false positives to wolves/lambs and worms. The remaining cells of the
eight-cell category x error-class table are zero by construction.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import ConfigError
from .menagerie import CATEGORIES, Category
from .rates import CategoryErrorRates

FN_CATEGORIES = frozenset({Category.GOAT, Category.WORM})
FP_CATEGORIES = frozenset({Category.WOLF_LAMB, Category.WORM})


@dataclass(frozen=True)
class CostParams:
    """Error costs and priors.

    ``c_fn`` is the cost of missing a wanted person, ``c_fp`` the cost of a
    false alarm on an innocent traveler, ``p_g`` the prior of a genuine
    comparison. ``p_cat`` holds category membership priors; ``None`` means
    "use the empirical category fractions".
    """

    c_fn: float = 10.0
    c_fp: float = 1.0
    p_g: float = 0.1
    p_cat: Mapping[Category, float] | None = field(default=None)

    def __post_init__(self):
        for name in ("c_fn", "c_fp"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ConfigError(f"{name} must be finite and non-negative, got {v!r}")
        if not 0 < self.p_g < 1:
            raise ConfigError(f"p_g must lie in (0, 1), got {self.p_g!r}")
        if self.p_cat is not None:
            p_cat = {Category(c): float(v) for c, v in self.p_cat.items()}
            if any(not 0 <= v <= 1 for v in p_cat.values()):
                raise ConfigError("category priors must lie in [0, 1]")
            if sum(p_cat.values()) > 1 + 1e-9:
                raise ConfigError("category priors must sum to at most 1")
            object.__setattr__(self, "p_cat", p_cat)

    @property
    def p_i(self) -> float:
        return 1.0 - self.p_g

    def with_empirical_priors(self, rates: CategoryErrorRates) -> "CostParams":
        """Fill ``p_cat`` from subject counts when it was left unset."""
        if self.p_cat is not None:
            return self
        n = sum(rates.n_subjects[c.value] for c in CATEGORIES)
        p_cat = {c: (rates.n_subjects[c.value] / n if n else 0.0) for c in CATEGORIES}
        return CostParams(self.c_fn, self.c_fp, self.p_g, p_cat)


def expected_error(far, frr, params: CostParams):
    """Overall error probability ``FAR * P_I + FRR * P_G``."""
    return far * params.p_i + frr * params.p_g


def expected_cost(fnr, fpr, params: CostParams):
    """Expected cost of one match decision."""
    return params.c_fn * fnr * params.p_g + params.c_fp * fpr * (1 - params.p_g)


def _exact(x: float) -> Fraction:
    # shortest decimal repr, so 0.1 is taken as 1/10 rather than its binary neighbour
    return Fraction(repr(float(x)))


def risk_coefficient(params: CostParams) -> Fraction:
    """FPR weight in the threshold risk, ``C_FN (1 - P_G) / (C_FP P_G)``, as an exact fraction.

    ``C_FN`` is paired with the impostor prior and ``C_FP`` with the genuine
    prior; this pairing is deliberate and not to be swapped. With
    ``C_FN = 10 C_FP`` and ``P_G = 0.1`` the coefficient is 90.
    """
    if params.c_fp == 0:
        raise ConfigError("risk coefficient undefined for c_fp = 0")
    p_g = _exact(params.p_g)
    return _exact(params.c_fn) * (1 - p_g) / (_exact(params.c_fp) * p_g)


def risk_at_threshold(fnr_t, fpr_t, params: CostParams):
    """``FNR(T) + coefficient * FPR(T)``; accepts scalars or arrays."""
    return fnr_t + float(risk_coefficient(params)) * fpr_t


def joint_prior(kind: str, category: Category, params: CostParams) -> float:
    """``P(G, D_i)`` or ``P(I, D_i)`` as a product of the marginal priors."""
    category = Category(category)
    if params.p_cat is None or category not in params.p_cat:
        raise ConfigError(f"no prior configured for category {category.value!r}")
    if kind == "genuine":
        return params.p_g * params.p_cat[category]
    if kind == "impostor":
        return params.p_i * params.p_cat[category]
    raise ValueError(f"kind must be 'genuine' or 'impostor', got {kind!r}")


@dataclass(frozen=True)
class LandscapeEntry:
    """One (category, threshold) cell of the cost landscape.

    ``cost_g_units`` and ``cost_i_units`` are expressed in multiples of
    ``c_fn`` and ``c_fp``; ``cost_g`` and ``cost_i`` are absolute. ``None``
    marks a value that could not be computed because a rate was undefined.
    """

    category: Category
    threshold: float
    fnr: float | None
    fpr: float | None
    cost_g_units: float | None
    cost_i_units: float | None
    cost_g: float | None
    cost_i: float | None
    risk: float | None
    cost_g_structural_zero: bool
    cost_i_structural_zero: bool

    def to_dict(self) -> dict:
        return {
            "category": self.category.value,
            "threshold": self.threshold,
            "fnr": self.fnr,
            "fpr": self.fpr,
            "cost_g_units_cfn": self.cost_g_units,
            "cost_i_units_cfp": self.cost_i_units,
            "cost_g": self.cost_g,
            "cost_i": self.cost_i,
            "risk": self.risk,
            "cost_g_structural_zero": self.cost_g_structural_zero,
            "cost_i_structural_zero": self.cost_i_structural_zero,
        }


def category_costs(rates: CategoryErrorRates, params: CostParams) -> list[LandscapeEntry]:
    """Cost landscape rows for every category and threshold, category-major."""
    params = params.with_empirical_priors(rates)
    coef = float(risk_coefficient(params)) if params.c_fp > 0 else None
    entries = []
    for c in CATEGORIES:
        fnr, fpr = rates.fnr(c.value), rates.fpr(c.value)
        pg = joint_prior("genuine", c, params)
        pi = joint_prior("impostor", c, params)
        for i, t in enumerate(rates.grid):
            f_n = None if fnr is None else float(fnr[i])
            f_p = None if fpr is None else float(fpr[i])
            g_units = _attributed(c in FN_CATEGORIES, f_n, pg)
            i_units = _attributed(c in FP_CATEGORIES, f_p, pi)
            risk = None
            if f_n is not None and f_p is not None and coef is not None:
                risk = f_n + coef * f_p
            entries.append(
                LandscapeEntry(
                    category=c,
                    threshold=t,
                    fnr=f_n,
                    fpr=f_p,
                    cost_g_units=g_units,
                    cost_i_units=i_units,
                    cost_g=None if g_units is None else params.c_fn * g_units,
                    cost_i=None if i_units is None else params.c_fp * i_units,
                    risk=risk,
                    cost_g_structural_zero=c not in FN_CATEGORIES,
                    cost_i_structural_zero=c not in FP_CATEGORIES,
                )
            )
    return entries


def _attributed(carries: bool, rate: float | None, prior: float) -> float | None:
    if not carries:
        return 0.0
    if rate is None:
        return None
    return rate * prior


def overall_risk(rates: CategoryErrorRates, params: CostParams) -> list[dict]:
    """Pooled expected error, expected cost and threshold risk at each threshold."""
    fnr, fpr = rates.fnr("all"), rates.fpr("all")
    out = []
    for i, t in enumerate(rates.grid):
        row = {"threshold": t, "fnr": None, "fpr": None, "expected_error": None,
               "expected_cost": None, "risk": None}
        if fnr is not None and fpr is not None:
            f_n, f_p = float(fnr[i]), float(fpr[i])
            row.update(
                fnr=f_n,
                fpr=f_p,
                expected_error=float(expected_error(f_p, f_n, params)),
                expected_cost=float(expected_cost(f_n, f_p, params)),
                risk=float(risk_at_threshold(f_n, f_p, params)) if params.c_fp > 0 else None,
            )
        out.append(row)
    return out


def landscape_csv(entries: list[LandscapeEntry]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("category", "threshold", "cost_g_units_cfn", "cost_i_units_cfp", "risk"))
    for e in entries:
        writer.writerow(
            (e.category.value, repr(e.threshold), _fmt(e.cost_g_units), _fmt(e.cost_i_units), _fmt(e.risk))
        )
    return buf.getvalue()


def _fmt(x):
    return "" if x is None else repr(float(x))

