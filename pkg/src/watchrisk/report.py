"""Risk report assembly.

A report is a plain JSON-ready dict with three top-level keys:
``metadata`` (tool version, schema version, effective configuration,
input digest), ``level1`` (menagerie summary and cost landscape) and
``level2`` (per-traveler entropy risk). Undefined values are ``None``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from dataclasses import dataclass, field, fields
from typing import Any, Mapping

from . import __version__
from .cost import CostParams, category_costs, overall_risk, risk_coefficient
from .entropy import Binning, LossVector, assess_travelers, build_references
from .errors import ConfigError
from .menagerie import CATEGORIES, MenagerieAssignment, MenagerieConfig, categorize
from .rates import DEFAULT_THRESHOLDS, ThresholdGrid, sweep
from .scores import DEFAULT_SCORE_MAX, Population

SCHEMA_VERSION = "1.0"


@dataclass(frozen=True)
class AnalysisConfig:
    """Every knob that affects a report. Echoed verbatim into ``metadata.config``."""

    score_max: float = DEFAULT_SCORE_MAX
    tail_fraction: float = 0.025
    aggregator: str = "mean"
    thresholds: tuple[float, ...] = DEFAULT_THRESHOLDS
    cfn: float = 10.0
    cfp: float = 1.0
    pg: float = 0.1
    p_cat: Mapping[str, float] | None = None
    loss: tuple[float, float, float] = (0.1, 0.6, 0.3)
    bins: int = 20
    epsilon: float = 0.5
    kl_orientation: str = "ref-first"
    min_scores: int = 5

    @classmethod
    def from_mapping(cls, values: Mapping[str, Any]) -> "AnalysisConfig":
        names = {f.name for f in fields(cls)}
        norm = {k.replace("-", "_"): v for k, v in values.items()}
        unknown = set(norm) - names
        if unknown:
            raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
        if isinstance(norm.get("thresholds"), str):
            norm["thresholds"] = ThresholdGrid.parse(norm["thresholds"]).thresholds
        if isinstance(norm.get("loss"), str):
            norm["loss"] = tuple(LossVector.parse(norm["loss"]).as_list())
        if "thresholds" in norm:
            norm["thresholds"] = tuple(float(x) for x in norm["thresholds"])
        if "loss" in norm:
            norm["loss"] = tuple(float(x) for x in norm["loss"])
        try:
            return cls(**norm)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["thresholds"] = list(self.thresholds)
        d["loss"] = list(self.loss)
        d["p_cat"] = None if self.p_cat is None else dict(sorted(self.p_cat.items()))
        return d

    def menagerie(self) -> MenagerieConfig:
        return MenagerieConfig(self.tail_fraction, self.aggregator)

    def grid(self) -> ThresholdGrid:
        grid = ThresholdGrid(self.thresholds)
        grid.check_range(self.score_max)
        return grid

    def cost_params(self) -> CostParams:
        return CostParams(self.cfn, self.cfp, self.pg, self.p_cat)

    def loss_vector(self) -> LossVector:
        if len(self.loss) != 3:
            raise ConfigError(f"loss needs three values (sheep, goat, wolf_lamb), got {list(self.loss)}")
        return LossVector(*self.loss)

    def binning(self) -> Binning:
        return Binning(self.bins, self.score_max, self.epsilon)

    def validate(self) -> None:
        self.menagerie()
        self.grid()
        self.cost_params()
        self.loss_vector()
        self.binning()
        if self.kl_orientation not in ("ref-first", "traveler-first"):
            raise ConfigError(f"unknown kl_orientation {self.kl_orientation!r}")
        if int(self.min_scores) != self.min_scores or self.min_scores < 1:
            raise ConfigError(f"min_scores must be a positive integer, got {self.min_scores!r}")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def metadata(command: str, cfg: AnalysisConfig, input_path=None, timestamp: str | None = None) -> dict:
    meta = {
        "tool": "watchrisk",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": cfg.to_dict(),
        "input": None,
        "generated_at": timestamp,
    }
    if input_path is not None:
        meta["input"] = {"name": os.path.basename(os.fspath(input_path)), "sha256": file_digest(input_path)}
    return meta


def menagerie_summary(pop: Population, assign: MenagerieAssignment) -> dict:
    return {
        "n_subjects": len(pop),
        "n_eligible": assign.n_subjects,
        "ineligible": list(pop.ineligible),
        "k": assign.k,
        "counts": assign.counts(),
        "goat_side": list(assign.goat_side),
        "wolf_lamb_side": list(assign.wolf_side),
        "members": {c.value: assign.members(c) for c in CATEGORIES},
    }


@dataclass
class LandscapeResult:
    assignment: MenagerieAssignment
    rates: Any
    entries: list
    level1: dict = field(default_factory=dict)


def build_landscape(pop: Population, cfg: AnalysisConfig) -> LandscapeResult:
    """Categorize, sweep thresholds and price errors; return the Level-I section."""
    assign = categorize(pop, cfg.menagerie())
    rates = sweep(pop, assign, cfg.grid())
    params = cfg.cost_params()
    resolved = params.with_empirical_priors(rates)
    entries = category_costs(rates, resolved)
    coef = risk_coefficient(params)
    level1 = {
        "menagerie": menagerie_summary(pop, assign),
        "cost_params": {
            "c_fn": params.c_fn,
            "c_fp": params.c_fp,
            "p_g": params.p_g,
            "p_i": params.p_i,
            "p_cat": {c.value: resolved.p_cat[c] for c in CATEGORIES},
            "p_cat_source": "empirical" if params.p_cat is None else "config",
        },
        "risk_coefficient": float(coef),
        "risk_coefficient_exact": str(coef),
        "rates": [
            {"category": g, "threshold": t, "fnr": fnr, "fpr": fpr, "n_genuine": ng, "n_impostor": ni}
            for g, t, fnr, fpr, ng, ni in rates.rows()
        ],
        "landscape": [e.to_dict() for e in entries],
        "overall": overall_risk(rates, params),
    }
    return LandscapeResult(assign, rates, entries, level1)


def build_assessment(pop: Population, cfg: AnalysisConfig, traveler_ids=None) -> tuple[dict, list, list]:
    """Build references and assess travelers; return the Level-II section, results and skips."""
    assign = categorize(pop, cfg.menagerie())
    refs = build_references(pop, assign, cfg.binning())
    results, skipped = assess_travelers(
        pop, refs, traveler_ids, cfg.loss_vector(), cfg.kl_orientation, int(cfg.min_scores)
    )
    level2 = {
        "menagerie": menagerie_summary(pop, assign),
        "references": refs.summary(),
        "travelers": [r.to_dict() for r in results],
        "skipped": skipped,
    }
    return level2, results, skipped


def travelers_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    cols = ("traveler_id", "class", "d_goat", "d_wl", "d_sheep", "r", "nearest_category", "band")
    writer.writerow(cols)
    for row in rows:
        writer.writerow(tuple(_cell(row[c]) for c in cols))
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else v


def _check_finite(obj, path="report"):
    if isinstance(obj, float) and not math.isfinite(obj):
        raise ValueError(f"non-finite number at {path}")
    if isinstance(obj, dict):
        for k, v in obj.items():
            _check_finite(v, f"{path}.{k}")
    elif isinstance(obj, (list, tuple)):
        for i, v in enumerate(obj):
            _check_finite(v, f"{path}[{i}]")


def dumps(report: dict) -> str:
    """Canonical JSON text: sorted keys, two-space indent, no NaN."""
    _check_finite(report)
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"
