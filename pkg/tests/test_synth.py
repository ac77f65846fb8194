import json
import math

import pytest

from watchrisk.errors import ConfigError
from watchrisk.menagerie import Category, categorize
from watchrisk.synth import (
    SynthSpec,
    generate,
    generate_records,
    ground_truth_csv,
    benchmark_spec,
)


def test_all_sheep_spec():
    spec = SynthSpec(n_subjects=50, fractions={})
    pop, truth = generate(spec)
    assert set(truth.categories.values()) == {Category.SHEEP}
    assert len(pop.eligible) == 50


def test_same_seed_bit_identical():
    a, ta = generate(benchmark_spec(seed=99))
    b, tb = generate(benchmark_spec(seed=99))
    assert a == b
    assert ta == tb
    c, _ = generate(benchmark_spec(seed=100))
    assert a != c


def test_record_layout():
    spec = SynthSpec(n_subjects=30, n_genuine_per_subject=3, n_impostor_per_subject=7, seed=1)
    records, planted = generate_records(spec)
    assert len(records) == 30 * (3 + 7)
    for s in planted:
        galleries = [r.gallery_id for r in records if r.probe_id == s and not r.is_genuine]
        assert len(galleries) == len(set(galleries)) == 7
        assert s not in galleries
    assert all(0 <= r.score <= 100 for r in records)


def test_benchmark_spec_counts():
    spec = benchmark_spec()
    assert spec.planted_counts()[Category.GOAT] == math.ceil(0.025 * 568) == 15
    assert spec.planted_counts()[Category.WOLF_LAMB] == 15
    _, truth = generate(spec)
    assert len(truth.members(Category.GOAT)) == 15
    worms = benchmark_spec(worms=True).planted_counts()
    assert worms[Category.GOAT] + worms[Category.WORM] == 15
    assert worms[Category.WOLF_LAMB] + worms[Category.WORM] == 15


@pytest.mark.parametrize("worms", [False, True])
def test_recovery_exact_when_separated(worms):
    for seed in range(3):
        pop, truth = generate(benchmark_spec(seed=seed, separation=6.0, worms=worms))
        assert categorize(pop).categories == truth.categories


def test_recovery_degrades_with_overlap():
    def recovery(sep):
        hit = 0.0
        for seed in range(6):
            pop, truth = generate(benchmark_spec(seed=seed, separation=sep))
            got = categorize(pop)
            hit += len(set(got.goat_side) & set(truth.goat_side)) + len(set(got.wolf_side) & set(truth.wolf_side))
        return hit / (6 * 30)

    levels = [recovery(s) for s in (6.0, 1.0, 0.25)]
    assert levels[0] == 1.0
    assert levels[0] >= levels[1] >= levels[2]
    assert levels[2] < levels[0]


@pytest.mark.parametrize(
    "kwargs",
    [
        {"fractions": {Category.GOAT: 0.6, Category.WOLF_LAMB: 0.6}},
        {"fractions": {Category.GOAT: -0.1}},
        {"n_subjects": 1},
        {"n_subjects": 10, "n_impostor_per_subject": 10},
        {"seed": -1},
        {"seed": 2**64},
    ],
)
def test_validation(kwargs):
    with pytest.raises(ConfigError):
        SynthSpec(**kwargs)


def test_spec_dict_roundtrip(tmp_path):
    spec = benchmark_spec(seed=12, separation=7.0, worms=True)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_dict()))
    loaded = SynthSpec.from_json(path)
    assert loaded == spec
    with pytest.raises(ConfigError):
        SynthSpec.from_dict({"n_subjects": 10, "colour": "blue"})


def test_ground_truth_csv():
    _, planted = generate_records(SynthSpec(n_subjects=40, seed=3))
    lines = ground_truth_csv(planted).splitlines()
    assert lines[0] == "subject_id,planted_class"
    assert len(lines) == 41
    assert sum(1 for line in lines if line.endswith(",goat")) == 1
