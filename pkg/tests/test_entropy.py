import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import truncnorm

from watchrisk.entropy import (
    Band,
    Binning,
    LossVector,
    ScoreHistogram,
    assess_traveler,
    assess_travelers,
    build_histogram,
    build_references,
    kl_divergence,
    pool_histograms,
    relative_entropy,
    risk_from_divergences,
    traveler_bayes_risk,
)
from watchrisk.errors import ConfigError, IncompatibleHistogramError, InsufficientDataError
from watchrisk.menagerie import Category, MenagerieAssignment, categorize
from watchrisk.synth import SynthSpec, default_profiles, generate

from conftest import make_population


def two_term_kl(p, q):
    total = 0.0
    for a, b in zip(p, q):
        total += a * math.log(a / b) / math.log(2)
    return total


def test_point_mass_limit():
    h = build_histogram([42.0, 43.0, 44.9], n_bins=10, epsilon=1e-12)
    assert h.p[4] == pytest.approx(1.0, abs=1e-10)
    assert h.p.sum() == pytest.approx(1.0, abs=1e-12)


def test_uniform_within_binomial_bound():
    n = 20000
    x = np.random.default_rng(0).uniform(0, 100, n)
    h = build_histogram(x, n_bins=10, epsilon=1e-9)
    sigma = math.sqrt(0.1 * 0.9 / n)
    assert np.all(np.abs(h.p - 0.1) <= 3 * sigma)


def test_smoothing_formula():
    scores = np.linspace(0.5, 89.5, 90)  # 90 scores, none in the top bin
    h = build_histogram(scores, n_bins=10, score_max=100, epsilon=1.0)
    assert h.counts[-1] == 0
    assert h.p[-1] == pytest.approx(1 / 100)


def test_histogram_bounds():
    h = build_histogram([0.0, 100.0], n_bins=4)
    assert h.counts.tolist() == [1, 0, 0, 1]
    assert h.n == 2
    with pytest.raises(InsufficientDataError):
        build_histogram([], n_bins=4)
    with pytest.raises(ConfigError):
        build_histogram([1.0], n_bins=1)
    with pytest.raises(ConfigError):
        build_histogram([1.0], epsilon=0.0)
    with pytest.raises(ConfigError):
        build_histogram([101.0])


@settings(max_examples=100)
@given(st.lists(st.floats(0, 100), min_size=1, max_size=200), st.integers(2, 40), st.floats(1e-3, 5))
def test_histogram_invariants(scores, n_bins, eps):
    h = build_histogram(scores, n_bins=n_bins, epsilon=eps)
    assert abs(h.p.sum() - 1) <= 1e-9
    assert np.all(h.p >= eps / (len(scores) + n_bins * eps) * (1 - 1e-12))
    assert np.all(h.p > 0)


def _hist(p):
    p = np.asarray(p, dtype=float)
    # counts chosen so the smoothed distribution is exactly p with epsilon tiny relative to scale
    return ScoreHistogram(np.linspace(0, 100, p.size + 1), p * 1e15, 1e-300)


def test_kl_examples():
    P, Q = _hist([0.5, 0.5]), _hist([0.25, 0.75])
    assert kl_divergence(P, P) == 0.0
    assert kl_divergence(P, Q) == pytest.approx(0.5 * math.log2(2) + 0.5 * math.log2(2 / 3), abs=1e-12)
    assert kl_divergence(P, Q) == pytest.approx(0.20752, abs=5e-6)
    assert kl_divergence(P, Q) == pytest.approx(two_term_kl([0.5, 0.5], [0.25, 0.75]), rel=1e-12)


def test_kl_grid_mismatch():
    a = build_histogram([10.0], n_bins=10)
    b = build_histogram([10.0], n_bins=20)
    c = build_histogram([10.0], n_bins=10, score_max=50)
    with pytest.raises(IncompatibleHistogramError):
        kl_divergence(a, b)
    with pytest.raises(IncompatibleHistogramError):
        kl_divergence(a, c)


@settings(max_examples=200)
@given(st.integers(0, 2**32 - 1))
def test_kl_random_pairs(seed):
    rng = np.random.default_rng(seed)
    P = build_histogram(rng.uniform(0, 100, rng.integers(1, 60)), epsilon=0.5)
    Q = build_histogram(rng.beta(2, 5, rng.integers(1, 60)) * 100, epsilon=0.5)
    d = kl_divergence(P, Q)
    assert d >= 0
    assert d == pytest.approx(two_term_kl(P.p, Q.p), rel=1e-9, abs=1e-12)
    assert kl_divergence(P, P) <= 1e-12


def reference_fixture():
    gen = {
        "g1": [5.0, 12.0, 14.0],
        "g2": [8.0, 13.0],
        "s1": [80.0, 85.0, 90.0],
        "s2": [70.0, 99.0],
        "w1": [75.0, 77.0],
    }
    imp = {"g1": [10.0], "g2": [11.0], "s1": [20.0, 25.0], "s2": [15.0], "w1": [65.0, 70.0, 72.0]}
    pop = make_population(gen, imp)
    assign = MenagerieAssignment.from_sides(gen, ["g1", "g2"], ["w1"], 2)
    return pop, assign


def test_references_concatenation_oracle():
    pop, assign = reference_fixture()
    b = Binning(n_bins=10, epsilon=0.5)
    refs = build_references(pop, assign, b)
    for sc, store in (("genuine", pop.genuine), ("impostor", pop.impostor)):
        for cat, subs in ((Category.GOAT, ["g1", "g2"]), (Category.SHEEP, ["s1", "s2"]), (Category.WOLF_LAMB, ["w1"])):
            concat = [x for s in subs for x in store[s]]
            expected = build_histogram(concat, 10, 100, 0.5)
            np.testing.assert_array_equal(refs.get(sc, cat).p, expected.p)
            members = [build_histogram(store[s], 10, 100, 0.5) for s in subs]
            n = sum(len(store[s]) for s in subs)
            averaged = sum(len(store[s]) / n * (m.counts / m.counts.sum()) for s, m in zip(subs, members))
            smoothed = (averaged * n + 0.5) / (n + 10 * 0.5)
            np.testing.assert_allclose(refs.get(sc, cat).p, smoothed, atol=1e-9)
            np.testing.assert_allclose(pool_histograms(members).p, expected.p, atol=1e-9)


def test_single_and_identical_member_references():
    pop, assign = reference_fixture()
    refs = build_references(pop, assign, Binning(10))
    np.testing.assert_array_equal(
        refs.get("genuine", Category.WOLF_LAMB).p, build_histogram(pop.genuine["w1"], 10).p
    )
    twins = make_population({"a": [40.0, 60.0], "b": [40.0, 60.0]}, {"a": [1.0], "b": [1.0]})
    twin_assign = MenagerieAssignment({"a": Category.GOAT, "b": Category.GOAT}, k=2, goat_side=("a", "b"))
    ref = build_references(twins, twin_assign, Binning(10)).get("genuine", Category.GOAT)
    np.testing.assert_allclose(ref.p, build_histogram([40.0, 60.0, 40.0, 60.0], 10).p)
    # identical member lists: same normalized counts as either member alone
    np.testing.assert_allclose(ref.counts / ref.n, build_histogram([40.0, 60.0], 10).counts / 2)


def test_worms_feed_both_references():
    gen = {"x": [10.0], "s": [90.0]}
    imp = {"x": [95.0], "s": [5.0]}
    pop = make_population(gen, imp)
    assign = MenagerieAssignment.from_sides(gen, ["x"], ["x"], 1)
    refs = build_references(pop, assign, Binning(10))
    assert refs.members[Category.GOAT] == ("x",)
    assert refs.members[Category.WOLF_LAMB] == ("x",)
    assert refs.missing("genuine") == []


REFERENCE_TRAVELERS = [
    # traveler, d_goat, d_wl, d_sheep, R(kl|x)
    ("4315", 19.3834, 1.5000, 1.2857, 12.2086),
    ("4472", 8.1941, 1.2029, 1.0842, 5.3858),
    ("4408", 44.6677, 1.1112, 0.3347, 27.1675),
    ("4435", 84.4652, 1.2451, 0.0621, 51.0589),
]


@pytest.mark.parametrize("tid, dg, dwl, ds, r", REFERENCE_TRAVELERS)
def test_bayes_risk_table_rows(tid, dg, dwl, ds, r):
    assert traveler_bayes_risk(dg, dwl, ds, LossVector(0.1, 0.6, 0.3)) == pytest.approx(r, abs=5e-4)
    assert risk_from_divergences(dg, dwl, ds).r == pytest.approx(r, abs=5e-4)


def test_bayes_risk_zero_and_linear():
    assert traveler_bayes_risk(0, 0, 0) == 0
    base = traveler_bayes_risk(3.0, 2.0, 1.0, LossVector(0.1, 0.6, 0.3))
    assert traveler_bayes_risk(3.0, 2.0, 1.0, LossVector(0.25, 1.5, 0.75)) == pytest.approx(2.5 * base)


def test_loss_vector_validation():
    assert LossVector.parse("0.1,0.6,0.3") == LossVector()
    with pytest.raises(ConfigError):
        LossVector(0, 0, 0)
    with pytest.raises(ConfigError):
        LossVector(-0.1, 0.6, 0.3)
    with pytest.raises(ConfigError):
        LossVector.parse("1,2")


@settings(max_examples=100)
@given(st.tuples(*[st.floats(0, 100)] * 3), st.floats(1e-3, 1e3))
def test_band_invariant_under_rescaling(divs, a):
    base = risk_from_divergences(*divs)
    scaled = risk_from_divergences(*(a * d for d in divs))
    if len({a * d for d in divs}) == len(set(divs)):
        assert scaled.band == base.band
        assert scaled.nearest_category == base.nearest_category


def test_band_rule_and_ties():
    assert risk_from_divergences(0.1, 1.0, 2.0).band is Band.HIGH
    assert risk_from_divergences(1.0, 0.1, 2.0).band is Band.MEDIUM
    assert risk_from_divergences(1.0, 2.0, 0.1).band is Band.LOW
    # a sheep with a large goat divergence still bands by nearest divergence
    assert risk_from_divergences(38.2000, 1.3801, 0.8165).band is Band.LOW
    assert risk_from_divergences(1.0, 1.0, 1.0).nearest_category is Category.GOAT


def test_traveler_equal_to_reference():
    pop, assign = reference_fixture()
    refs = build_references(pop, assign, Binning(10))
    risk = assess_traveler("w1", pop.impostor["w1"], refs, min_scores=1, score_class="impostor")
    assert risk.divergences[Category.WOLF_LAMB] == 0.0
    assert risk.nearest_category is Category.WOLF_LAMB
    assert risk.band is Band.MEDIUM
    assert risk.r == pytest.approx(0.6 * risk.divergences[Category.GOAT] + 0.1 * risk.divergences[Category.SHEEP])


def test_orientation_flag():
    pop, assign = reference_fixture()
    refs = build_references(pop, assign, Binning(10))
    scores = pop.genuine["s1"]
    fwd = assess_traveler("s1", scores, refs, min_scores=1, orientation="ref-first")
    rev = assess_traveler("s1", scores, refs, min_scores=1, orientation="traveler-first")
    h = ScoreHistogram(refs.binning.edges, np.histogram(scores, refs.binning.edges)[0], 0.5)
    goat = refs.get("genuine", Category.GOAT)
    assert fwd.divergences[Category.GOAT] == pytest.approx(two_term_kl(goat.p, h.p))
    assert rev.divergences[Category.GOAT] == pytest.approx(two_term_kl(h.p, goat.p))
    assert fwd.divergences[Category.GOAT] != pytest.approx(rev.divergences[Category.GOAT])
    with pytest.raises(ConfigError):
        assess_traveler("s1", scores, refs, min_scores=1, orientation="sideways")


def test_insufficient_and_missing():
    pop, assign = reference_fixture()
    refs = build_references(pop, assign, Binning(10))
    with pytest.raises(InsufficientDataError):
        assess_traveler("g2", pop.genuine["g2"], refs)
    no_wolves = MenagerieAssignment.from_sides(pop.subjects, ["g1", "g2"], [], 2)
    partial = build_references(pop, no_wolves, Binning(10))
    risk = assess_traveler("s1", pop.genuine["s1"], partial, min_scores=1)
    assert risk.missing == (Category.WOLF_LAMB,)
    assert not risk.complete
    assert risk.r is None and risk.band is None
    assert risk.divergences[Category.WOLF_LAMB] is None
    results, skipped = assess_travelers(pop, refs, ["g1", "nobody"], min_scores=3)
    assert [(r.traveler_id, r.score_class) for r in results] == [("g1", "genuine")]
    assert {(s["traveler_id"], s["class"]) for s in skipped} == {("g1", "impostor"), ("nobody", None)}


def test_goat_traveler_monte_carlo():
    spec = SynthSpec(n_subjects=200, n_genuine_per_subject=10, n_impostor_per_subject=20, seed=42,
                     fractions={Category.GOAT: 0.025, Category.WOLF_LAMB: 0.025})
    pop, _ = generate(spec)
    refs = build_references(pop, categorize(pop), Binning())
    goat = default_profiles()[Category.GOAT]
    a, b = (0 - goat.genuine_center) / goat.genuine_spread, (100 - goat.genuine_center) / goat.genuine_spread
    rng = np.random.default_rng(2017)
    hits = 0
    for trial in range(200):
        scores = truncnorm.rvs(a, b, loc=goat.genuine_center, scale=goat.genuine_spread, size=10, random_state=rng)
        risk = assess_traveler(f"t{trial}", scores, refs)
        hits += risk.nearest_category is Category.GOAT
    assert hits >= 190


def test_relative_entropy_shape_check():
    with pytest.raises(IncompatibleHistogramError):
        relative_entropy([0.5, 0.5], [1.0])
