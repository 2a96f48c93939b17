import json
from fractions import Fraction
from math import log2

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsicsim import (
    DimensionMismatch,
    RankOneProjector,
    QsicSet,
    ResourceLimit,
    StateDistribution,
    ValidationError,
    canonicalize,
    entropy_curve,
    entropy_of,
    evolve_step,
    iter_distributions,
    noncontextual_baseline,
    reachable_counts,
)
from qsicsim.evolve import _Engine
from qsicsim.exact import GaussianRational

from oracles import brute_force_distribution


def test_pm_uniform_is_fixed_point(pm, pm_init):
    out = evolve_step(pm_init, pm)
    assert dict(out.entries) == dict(pm_init.entries)


def test_yo_one_step_support_25(yo, yo_init):
    assert evolve_step(yo_init, yo).support_size() == 25


def test_point_distribution_matches_brute_force(yo):
    init = StateDistribution.point(canonicalize([1, 1, 1]))
    stepped = evolve_step(init, yo)
    oracle = brute_force_distribution(yo, init, 1)
    assert dict(stepped.entries) == oracle


def test_mass_conservation_exact(yo, yo_init):
    d = yo_init
    for _ in range(3):
        d = evolve_step(d, yo)
        assert sum(d.entries.values()) == 1


def test_oracle_equivalence_two_steps(pm, pm_init, yo, yo_init):
    d = evolve_step(evolve_step(yo_init, yo), yo)
    assert dict(d.entries) == brute_force_distribution(yo, yo_init, 2)
    e = evolve_step(evolve_step(pm_init, pm), pm)
    assert dict(e.entries) == brute_force_distribution(pm, pm_init, 2)


def test_engine_matches_evolve_step(yo, yo_init):
    dists = list(iter_distributions(yo, yo_init, 3))
    d = yo_init
    for step, engine_dist in enumerate(dists):
        if step > 0:
            d = evolve_step(d, yo)
        assert dict(engine_dist.entries) == dict(d.entries)


def test_engine_matches_evolve_step_complex_set():
    # a qubit set with complex rays exercises the Gaussian kernel
    rays = [
        [GaussianRational.of(1), GaussianRational.of(0)],
        [GaussianRational.of(1), GaussianRational.of(0, 1)],   # |0> + i|1>
        [GaussianRational.of(1), GaussianRational.of(1)],
    ]
    qset = QsicSet(
        "complex-qubit",
        2,
        tuple(
            RankOneProjector(f"r{i}", canonicalize(v)) for i, v in enumerate(rays)
        ),
        contexts=((0,), (1,), (2,)),
    )
    init = StateDistribution.point(canonicalize([1, 0]))
    dists = list(iter_distributions(qset, init, 3))
    d = init
    seen_complex = False
    for step, engine_dist in enumerate(dists):
        if step > 0:
            d = evolve_step(d, qset)
        assert dict(engine_dist.entries) == dict(d.entries)
        seen_complex = seen_complex or any(
            not ray.is_real() for ray in engine_dist.entries
        )
    assert seen_complex


def test_reachable_counts_equal_evolve_step_supports(yo, yo_init):
    counts = reachable_counts(yo, yo_init, 3)
    d = yo_init
    expected = [d.support_size()]
    for _ in range(3):
        d = evolve_step(d, yo)
        expected.append(d.support_size())
    assert counts == expected


def test_counts_pm_closed(pm, pm_init):
    assert reachable_counts(pm, pm_init, 5) == [24] * 6


def test_counts_yo_initial_support(yo, yo_init):
    assert reachable_counts(yo, yo_init, 0) == [13]


def test_entropy_values(pm_init):
    assert entropy_of(pm_init) == pytest.approx(log2(24), abs=1e-12)
    point = StateDistribution.point(canonicalize([1, 0, 0]))
    assert entropy_of(point) == 0.0
    three = StateDistribution.uniform(
        [canonicalize([1, 0, 0]), canonicalize([0, 1, 0]), canonicalize([0, 0, 1])]
    )
    assert entropy_of(three) == pytest.approx(log2(3), abs=1e-12)


def test_baselines(pm, yo):
    assert noncontextual_baseline(pm) == 2.0
    assert noncontextual_baseline(yo) == pytest.approx(log2(3), abs=1e-12)
    one = QsicSet(
        "trivial", 1, (RankOneProjector("p", canonicalize([1])),), ((0,),)
    )
    assert noncontextual_baseline(one) == 0.0


def test_entropy_curve_pm_flat(pm, pm_init):
    curve = entropy_curve(pm, pm_init, 4)
    assert curve.counts() == [24] * 5
    for e in curve.entropies():
        assert e == pytest.approx(log2(24), abs=1e-9)
    # digest is stable across runs and steps for a fixed-point distribution
    digests = [p.exact_distribution_digest for p in curve.points]
    assert len(set(digests)) == 1


def test_entropy_upper_bound(yo, yo_init):
    curve = entropy_curve(yo, yo_init, 4)
    for p in curve.points:
        assert p.entropy_bits <= log2(p.reachable_count) + 1e-9


def test_curve_digest_matches_distribution_digest(yo, yo_init):
    curve = entropy_curve(yo, yo_init, 2)
    dists = list(iter_distributions(yo, yo_init, 2))
    for point, dist in zip(curve.points, dists):
        assert point.exact_distribution_digest == dist.digest()


def test_resource_limit(yo, yo_init):
    with pytest.raises(ResourceLimit):
        reachable_counts(yo, yo_init, 3, max_support=50)


def test_dimension_mismatch(pm, yo_init):
    with pytest.raises(DimensionMismatch):
        evolve_step(yo_init, pm)


def test_workers_determinism(yo, yo_init, monkeypatch):
    monkeypatch.setattr(_Engine, "PARALLEL_THRESHOLD", 10)
    seq = entropy_curve(yo, yo_init, 3, workers=1)
    par = entropy_curve(yo, yo_init, 3, workers=3)
    assert seq == par


def test_weighted_choice_in_evolve_step():
    a = RankOneProjector("a", canonicalize([1, 0]))
    b = RankOneProjector("b", canonicalize([0, 1]))
    qset = QsicSet(
        "biased", 2, (a, b), ((0, 1),), weights=(Fraction(3, 4), Fraction(1, 4))
    )
    init = StateDistribution.point(canonicalize([1, 1]))
    out = evolve_step(init, qset)
    # each projector splits 50/50; mass follows the measurement weights
    assert out.entries[canonicalize([1, 0])] == Fraction(3, 8) + Fraction(1, 8)
    assert out.entries[canonicalize([0, 1])] == Fraction(1, 8) + Fraction(3, 8)


def test_engine_rejects_weighted_sets():
    a = RankOneProjector("a", canonicalize([1, 0]))
    b = RankOneProjector("b", canonicalize([0, 1]))
    qset = QsicSet(
        "biased", 2, (a, b), ((0, 1),), weights=(Fraction(1, 2), Fraction(1, 2))
    )
    init = StateDistribution.point(canonicalize([1, 1]))
    with pytest.raises(ValidationError):
        reachable_counts(qset, init, 1)


def test_distribution_validation():
    with pytest.raises(ValidationError):
        StateDistribution(2, {canonicalize([1, 0]): Fraction(1, 2)})
    with pytest.raises(ValidationError):
        StateDistribution(
            2,
            {
                canonicalize([1, 0]): Fraction(3, 2),
                canonicalize([0, 1]): Fraction(-1, 2),
            },
        )


small_vectors = st.lists(
    st.integers(-4, 4), min_size=3, max_size=3
).filter(any)


@given(st.lists(small_vectors, min_size=1, max_size=4, unique_by=tuple))
@settings(max_examples=40, deadline=None)
def test_evolve_step_mass_conservation_property(yo, vecs):
    rays = {canonicalize(v) for v in vecs}
    init = StateDistribution.uniform(sorted(rays, key=lambda r: r.sort_key()))
    out = evolve_step(init, yo)
    assert sum(out.entries.values()) == 1
    assert all(p > 0 for p in out.entries.values())
