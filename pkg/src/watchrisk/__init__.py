"""Watchlist risk assessment over biometric match-score populations.

Two detectors are provided. The cost detector sweeps decision thresholds
and prices false negatives and false positives per Doddington category
(the Level-I risk landscape). The entropy detector compares a traveler's
score distribution with category references and turns the divergences
into a Bayes risk (the Level-II per-traveler assessment).
"""

from .cost import (
    CostParams,
    LandscapeEntry,
    category_costs,
    expected_cost,
    expected_error,
    joint_prior,
    risk_at_threshold,
    risk_coefficient,
)
from .entropy import (
    Band,
    Binning,
    CategoryReference,
    LossVector,
    ScoreHistogram,
    TravelerRisk,
    assess_traveler,
    assess_travelers,
    build_histogram,
    build_references,
    kl_divergence,
    risk_from_divergences,
    traveler_bayes_risk,
)
from .errors import (
    ConfigError,
    IncompatibleHistogramError,
    IngestError,
    InsufficientDataError,
    ScoreRangeError,
    WatchRiskError,
)
from .menagerie import Category, MenagerieAssignment, MenagerieConfig, categorize, category_members
from .rates import CategoryErrorRates, Decision, ThresholdGrid, decide, sweep
from .scores import MatchRecord, Population, ingest_scores, read_scores_csv, subject_aggregates
from .synth import ClassProfile, SynthSpec, generate, benchmark_spec

__version__ = "0.1.0"
