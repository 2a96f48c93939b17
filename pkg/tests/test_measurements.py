from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsicsim import (
    DichotomicObservable,
    DimensionMismatch,
    RankOneProjector,
    ValidationError,
    ZeroProbabilityBranch,
    canonicalize,
    commute,
    outcome_probability,
    post_measurement_state,
)
from qsicsim.exact import GR_I, GR_ONE, GR_ZERO, GaussianRational
from qsicsim.measurements import identity_matrix, kron, mat_mul
from qsicsim.sets import _pauli, _square_operator


def proj(label, vec):
    return RankOneProjector(label, canonicalize(vec))


def obs(label, name):
    return DichotomicObservable(label, _square_operator(name))


def test_eigenstate_clicks_with_certainty():
    p = proj("e0", [1, 0, 0])
    state = canonicalize([1, 0, 0])
    assert outcome_probability(state, p, 1) == 1
    assert outcome_probability(state, p, 0) == 0


def test_born_rule_unbalanced_state():
    p = proj("e0", [1, 0, 0])
    state = canonicalize([1, 1, 1])
    assert outcome_probability(state, p, 1) == Fraction(1, 3)
    assert outcome_probability(state, p, 0) == Fraction(2, 3)


def test_observable_probability_product_state():
    xx = obs("xx", "xx")
    state = canonicalize([0, 1, 0, 0])  # |01>
    assert outcome_probability(state, xx, 1) == Fraction(1, 2)
    assert outcome_probability(state, xx, -1) == Fraction(1, 2)


def test_projection_fixed_point():
    p = proj("e0", [1, 0, 0])
    state = canonicalize([1, 0, 0])
    assert post_measurement_state(state, p, 1) == state


def test_projection_complement():
    p = proj("e0", [1, 0, 0])
    state = canonicalize([1, 1, 1])
    assert post_measurement_state(state, p, 0) == canonicalize([0, 1, 1])


def test_observable_update():
    xx = obs("xx", "xx")
    state = canonicalize([0, 1, 0, 0])
    assert post_measurement_state(state, xx, 1) == canonicalize([0, 1, 1, 0])


def test_zero_probability_branches_raise():
    p = proj("e0", [1, 0, 0])
    orthogonal = canonicalize([0, 1, 0])
    with pytest.raises(ZeroProbabilityBranch):
        post_measurement_state(orthogonal, p, 1)
    aligned = canonicalize([1, 0, 0])
    with pytest.raises(ZeroProbabilityBranch):
        post_measurement_state(aligned, p, 0)
    z1 = obs("z1", "z1")
    plus_eigen = canonicalize([1, 0, 0, 0])
    with pytest.raises(ZeroProbabilityBranch):
        post_measurement_state(plus_eigen, z1, -1)


def test_commute_same_context():
    assert commute(obs("z1", "z1"), obs("z2", "z2"))


def test_commute_examples():
    assert commute(obs("z1", "z1"), obs("x2", "x2"))
    assert not commute(obs("z1", "z1"), obs("xx", "xx"))


def test_commute_self():
    m = obs("yy", "yy")
    assert commute(m, m)
    p = proj("e0", [1, 0, 0])
    assert commute(p, p)


def test_rank1_compatibility_is_orthogonality_or_identity():
    a = proj("a", [1, 0, 0])
    b = proj("b", [0, 1, -1])
    c = proj("c", [1, 1, 0])
    assert commute(a, b)       # orthogonal
    assert not commute(a, c)   # oblique


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        outcome_probability(canonicalize([1, 0]), proj("e0", [1, 0, 0]), 1)
    with pytest.raises(DimensionMismatch):
        commute(proj("a", [1, 0]), proj("b", [1, 0, 0]))


def test_observable_validation():
    bad = ((GR_ZERO, GR_ONE), (GR_ZERO, GR_ZERO))  # not Hermitian
    with pytest.raises(ValidationError):
        DichotomicObservable("bad", bad)
    hermitian = ((GR_ZERO, GR_I), (GR_I.conjugate(), GR_ZERO))
    # Hermitian, but halving breaks the involution
    half = tuple(
        tuple(GaussianRational(e.re / 2, e.im / 2) for e in row) for row in hermitian
    )
    with pytest.raises(ValidationError):
        DichotomicObservable("half", half)


def test_pauli_products_involution():
    for name in ("z1", "z2", "zz", "x1", "x2", "xx", "zx", "xz", "yy"):
        m = _square_operator(name)
        assert mat_mul(m, m) == identity_matrix(4)


def test_kron_identity():
    assert kron(_pauli("1"), _pauli("1")) == identity_matrix(4)


# --- property tests -----------------------------------------------------------

entries = st.tuples(st.integers(-6, 6), st.integers(-6, 6))
rays3 = st.lists(entries, min_size=3, max_size=3).filter(
    lambda v: any(e != (0, 0) for e in v)
).map(canonicalize)

pm_observables = st.sampled_from(
    ["z1", "z2", "zz", "x1", "x2", "xx", "zx", "xz", "yy"]
)
rays4 = st.lists(entries, min_size=4, max_size=4).filter(
    lambda v: any(e != (0, 0) for e in v)
).map(canonicalize)


@given(rays3, rays3)
def test_outcome_probabilities_sum_to_one(state, target):
    p = RankOneProjector("t", target)
    assert outcome_probability(state, p, 1) + outcome_probability(state, p, 0) == 1


@given(rays4, pm_observables)
def test_observable_probabilities_sum_to_one(state, name):
    m = obs(name, name)
    total = outcome_probability(state, m, 1) + outcome_probability(state, m, -1)
    assert total == 1


@given(rays3, rays3)
@settings(max_examples=60)
def test_repetition_stability(state, target):
    p = RankOneProjector("t", target)
    for o in (1, 0):
        if outcome_probability(state, p, o) == 0:
            continue
        after = post_measurement_state(state, p, o)
        assert outcome_probability(after, p, o) == 1
        assert post_measurement_state(after, p, o) == after


@given(rays4, pm_observables)
@settings(max_examples=60)
def test_observable_repetition_stability(state, name):
    m = obs(name, name)
    for o in (1, -1):
        if outcome_probability(state, m, o) == 0:
            continue
        after = post_measurement_state(state, m, o)
        assert outcome_probability(after, m, o) == 1
        assert post_measurement_state(after, m, o) == after


@given(rays3, rays3)
@settings(max_examples=60)
def test_update_stays_on_gaussian_integer_lattice(state, target):
    p = RankOneProjector("t", target)
    for o in (1, 0):
        if outcome_probability(state, p, o) == 0:
            continue
        after = post_measurement_state(state, p, o)
        assert all(isinstance(re, int) and isinstance(im, int) for re, im in after.entries)
