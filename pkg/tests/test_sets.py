import json
from fractions import Fraction
from itertools import combinations

import pytest

from qsicsim import (
    ParseError,
    QsicSet,
    RankOneProjector,
    ValidationError,
    canonicalize,
    commute,
    load_set,
    outcome_probability,
    pm_eigenstate_signatures,
    pm_eigenstates,
)
from qsicsim.measurements import identity_matrix, mat_mul
from qsicsim.sets import orthogonality_contexts, parse_entry


def test_pm_counts(pm):
    assert pm.size == 9
    assert len(pm.contexts) == 6
    assert [m.label for m in pm.measurements] == [
        "z1", "z2", "zz", "x2", "x1", "xx", "zx", "xz", "yy",
    ]


def test_pm_in_context_pairs_commute(pm):
    pairs = [
        (i, j) for ctx in pm.contexts for i, j in combinations(ctx, 2)
    ]
    assert len(pairs) == 18
    for i, j in pairs:
        assert commute(pm.measurements[i], pm.measurements[j])


def test_pm_context_product_signs(pm):
    # each context multiplies to +-identity; an odd number of minus signs is
    # what makes the square state-independently contextual
    signs = []
    for ctx in pm.contexts:
        mats = [pm.measurements[i].matrix for i in ctx]
        prod = mat_mul(mat_mul(mats[0], mats[1]), mats[2])
        ident = identity_matrix(4)
        neg = tuple(tuple(-e for e in row) for row in prod)
        assert prod == ident or neg == ident
        signs.append(1 if prod == ident else -1)
    assert signs.count(-1) % 2 == 1


def test_pm_eigenstate_count_and_uniqueness():
    states = pm_eigenstates()
    assert len(states) == 24
    assert len(set(states)) == 24


def test_pm_state_2_anchor():
    # the state with z1 -> +1, z2 -> -1, zz -> -1 is |01>
    sigs = pm_eigenstate_signatures()
    anchored = [s for s, (ci, signs) in sigs.items() if ci == 0 and signs == (1, -1, -1)]
    assert anchored == [canonicalize([0, 1, 0, 0])]


def test_pm_eigenstates_are_context_eigenstates(pm):
    sigs = pm_eigenstate_signatures()
    for state, (ci, signs) in sigs.items():
        for mi, sign in zip(pm.contexts[ci], signs):
            m = pm.measurements[mi]
            assert outcome_probability(state, m, sign) == 1


def test_pm_eigenstates_partition_into_orthonormal_fours(pm):
    sigs = pm_eigenstate_signatures()
    by_context = {}
    for state, (ci, _) in sigs.items():
        by_context.setdefault(ci, []).append(state)
    assert sorted(by_context) == list(range(6))
    for states in by_context.values():
        assert len(states) == 4
        for a, b in combinations(states, 2):
            inner_re = inner_im = 0
            for (ar, ai), (br, bi) in zip(a.entries, b.entries):
                inner_re += ar * br + ai * bi
                inner_im += ar * bi - ai * br
            assert inner_re == 0 and inner_im == 0


def test_yo_counts(yo):
    assert yo.size == 13
    assert yo.dim == 3


def test_yo_every_ray_orthogonal_to_another(yo):
    rays = [m.target for m in yo.measurements]
    for i, a in enumerate(rays):
        assert any(
            sum(x * y for (x, _), (y, _) in zip(a.entries, b.entries)) == 0
            for j, b in enumerate(rays)
            if i != j
        )


def test_yo_every_measurement_in_two_contexts(yo):
    for i in range(yo.size):
        appearances = sum(1 for ctx in yo.contexts if i in ctx)
        assert appearances >= 2


def test_yo_contexts_are_maximal_orthogonal_cliques(yo):
    rays = [m.target for m in yo.measurements]
    recomputed = orthogonality_contexts(rays)
    assert recomputed == yo.contexts
    for ctx in yo.contexts:
        for i, j in combinations(ctx, 2):
            assert commute(yo.measurements[i], yo.measurements[j])


def test_parse_entry_grammar():
    assert parse_entry("3").re == 3
    assert parse_entry("-1/2").re == Fraction(-1, 2)
    e = parse_entry("1/2+3/4i")
    assert (e.re, e.im) == (Fraction(1, 2), Fraction(3, 4))
    e = parse_entry("-1-2i")
    assert (e.re, e.im) == (-1, -2)
    assert parse_entry("i").im == 1
    assert parse_entry("-i").im == -1
    assert parse_entry("2i").im == 2
    with pytest.raises(ParseError):
        parse_entry("one half")
    with pytest.raises(ParseError):
        parse_entry("1.5")


def test_load_set_round_trip(tmp_path, yo):
    doc = {
        "name": "yu-oh",
        "dim": 3,
        "kind": "rank1",
        "vectors": [
            ["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"],
            ["0", "1", "-1"], ["1", "0", "-1"], ["1", "-1", "0"],
            ["0", "1", "1"], ["1", "0", "1"], ["1", "1", "0"],
            ["-1", "1", "1"], ["1", "-1", "1"], ["1", "1", "-1"],
            ["1", "1", "1"],
        ],
    }
    path = tmp_path / "yo.json"
    path.write_text(json.dumps(doc))
    loaded = load_set(path)
    assert loaded.dim == yo.dim
    assert [m.target for m in loaded.measurements] == [m.target for m in yo.measurements]
    assert loaded.contexts == yo.contexts


def test_load_set_accepts_plain_integers(tmp_path):
    doc = {"name": "basis", "dim": 2, "kind": "rank1", "vectors": [[1, 0], [0, 1]]}
    path = tmp_path / "b.json"
    path.write_text(json.dumps(doc))
    loaded = load_set(path)
    assert loaded.size == 2
    assert loaded.contexts == ((0, 1),)


def test_load_set_malformed_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(ParseError) as exc:
        load_set(path)
    assert "line" in str(exc.value)


def test_load_set_non_hermitian_matrix(tmp_path):
    doc = {
        "name": "bad",
        "dim": 2,
        "kind": "observable",
        "matrices": [[["0", "1"], ["0", "0"]]],
        "contexts": [[0]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as exc:
        load_set(path)
    assert "Hermitian" in str(exc.value)


def test_load_set_noncommuting_context_names_pair(tmp_path):
    doc = {
        "name": "bad-ctx",
        "dim": 2,
        "kind": "observable",
        "labels": ["sz", "sx"],
        "matrices": [
            [["1", "0"], ["0", "-1"]],
            [["0", "1"], ["1", "0"]],
        ],
        "contexts": [[0, 1]],
    }
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError) as exc:
        load_set(path)
    msg = str(exc.value)
    assert "sz" in msg and "sx" in msg


def test_load_set_observables_require_contexts(tmp_path):
    doc = {
        "name": "no-ctx",
        "dim": 2,
        "kind": "observable",
        "matrices": [[["1", "0"], ["0", "-1"]]],
    }
    path = tmp_path / "n.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError):
        load_set(path)


def test_duplicate_labels_rejected():
    a = RankOneProjector("p", canonicalize([1, 0]))
    b = RankOneProjector("p", canonicalize([0, 1]))
    with pytest.raises(ValidationError):
        QsicSet("dup", 2, (a, b), ((0, 1),))


def test_weights_validated():
    a = RankOneProjector("a", canonicalize([1, 0]))
    b = RankOneProjector("b", canonicalize([0, 1]))
    with pytest.raises(ValidationError):
        QsicSet("w", 2, (a, b), ((0, 1),), weights=(Fraction(1, 2), Fraction(1, 3)))
    ok = QsicSet("w", 2, (a, b), ((0, 1),), weights=(Fraction(2, 3), Fraction(1, 3)))
    assert ok.weights is not None
