import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from loophom import errors
from loophom.forms import (
    E8,
    adapted_basis,
    base_change,
    integral_basis,
    is_adapted,
    make_form,
    permute,
    preset,
    reduced_basis,
    unit_splitting,
    validate,
)
from loophom.linalg import bareiss_det
from loophom.oracles import random_form, random_unimodular


def test_valid_examples():
    f = make_form(5, [[0, 1], [-1, 0]], "Q")
    assert f.m == 2 and f.ring.label() == "Q" and f.skew
    g = make_form(6, [[0, 1], [1, 0]], "Z")
    assert g.m == 2 and not g.skew


def test_excluded_dimension():
    with pytest.raises(errors.ExcludedDimension):
        make_form(4, [[1]], "Z")
    forced = make_form(4, [[1]], "Z", force=True)
    assert forced.warnings


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_excluded_values(n):
    C = [[1]] if n % 2 == 0 else [[0, 1], [-1, 0]]
    with pytest.raises(errors.ExcludedDimension):
        make_form(n, C)


@pytest.mark.parametrize(
    "n, C, exc",
    [
        (6, [[0, 1]], errors.NonSquareMatrix),
        (6, [[0, 1], [-1, 0]], errors.SymmetryViolation),
        (5, [[0, 1], [1, 0]], errors.SymmetryViolation),
        (5, [[1, 1], [-1, 0]], errors.SymmetryViolation),
        (6, [[2, 0], [0, 1]], errors.NotUnimodular),
        (5, [[0, 1, 0], [-1, 0, 0], [0, 0, 0]], errors.OddRankSkew),
        (7, [[0]], errors.OddRankSkew),
    ],
)
def test_rejections(n, C, exc):
    with pytest.raises(exc):
        make_form(n, C)


def test_odd_rank_skew_ignores_force():
    with pytest.raises(errors.OddRankSkew):
        make_form(5, [[0]], force=True, allow_nonunimodular=True)


def test_nonunimodular_override():
    f = make_form(6, [[2]], allow_nonunimodular=True)
    assert f.det() == 2 and f.warnings


def test_validate_config():
    raw = json.loads('{"n": 5, "intersection_matrix": [[0, 1], [-1, 0]], "ring": {"Fp": 3}, "max_degree": 20}')
    f = validate(raw)
    assert f.ring.label() == "F3" and f.m == 2
    with pytest.raises(errors.ValidationError):
        validate({"n": 5})
    with pytest.raises(errors.ValidationError):
        validate({"n": 5, "intersection_matrix": [[0, 1.5], [-1.5, 0]]})


def test_presets():
    assert preset("hyperbolic", 5).matrix == ((0, 1), (-1, 0))
    assert preset("hyperbolic", 6, g=2).matrix == ((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0))
    with pytest.raises(errors.ParityMismatch):
        preset("e8", 5)
    with pytest.raises(errors.UnknownPreset):
        preset("k3", 6)
    e8 = preset("e8", 6)
    assert e8.det() == 1 and all(e8.c(i, i) == 2 for i in range(8))
    assert preset("diag", 6, entries=[1, -1, 1]).det() == -1


def test_e8_is_even_unimodular_positive_definite():
    # leading principal minors of a positive definite matrix are positive
    for k in range(1, 9):
        assert bareiss_det([row[:k] for row in E8[:k]]) > 0
    assert bareiss_det(E8) == 1


@pytest.mark.parametrize(
    "C, P, expected",
    [
        (((0, 1), (-1, 0)), ((1, 0), (0, 1)), ((0, 1), (-1, 0))),
        (((0, 1), (-1, 0)), ((0, 1), (1, 0)), ((0, -1), (1, 0))),
        (((0, 1), (1, 0)), ((1, 1), (0, 1)), ((0, 1), (1, 2))),
    ],
)
def test_base_change_examples(C, P, expected):
    n = 5 if C[0][1] == -C[1][0] else 6
    assert base_change(make_form(n, C), P).matrix == expected


def test_base_change_rejects_singular():
    with pytest.raises(errors.NotUnimodularChange):
        base_change(preset("hyperbolic", 6), [[1, 1], [1, 1]])
    with pytest.raises(errors.DimensionMismatch):
        base_change(preset("hyperbolic", 6), [[1]])


def test_permute():
    f = permute(preset("hyperbolic", 5), [1, 0])
    assert f.matrix == ((0, -1), (1, 0))


parities = st.sampled_from([(5, 2), (5, 4), (7, 2), (6, 1), (6, 2), (6, 3), (10, 4)])


@given(parities, st.integers(0, 10_000))
def test_random_forms_are_valid(nm, seed):
    n, m = nm
    f = random_form(n, m, seed)
    assert f.m == m and abs(f.det()) == 1
    make_form(f.n, f.matrix)  # passes validation again


@given(st.integers(1, 6), st.integers(0, 1000))
def test_random_unimodular(m, seed):
    assert abs(bareiss_det(random_unimodular(m, seed))) == 1


@given(parities, st.integers(0, 10_000), st.integers(0, 100))
def test_base_change_preserves_validity(nm, seed, pseed):
    f = random_form(*nm, seed)
    g = base_change(f, random_unimodular(f.m, pseed))
    assert abs(g.det()) == 1
    make_form(g.n, g.matrix)


def test_random_form_determinism_and_parity():
    assert random_form(5, 4, 3) == random_form(5, 4, 3)
    with pytest.raises(errors.OddRankSkew):
        random_form(7, 3, 0)
    f = random_form(6, 1, 9)
    assert f.matrix in (((1,),), ((-1,),))


@given(parities, st.integers(0, 10_000))
def test_integral_basis(nm, seed):
    f = random_form(*nm, seed)
    P = integral_basis(f)
    if P is None:
        return
    assert abs(bareiss_det(P)) == 1
    g = base_change(f, P)
    if f.skew:
        assert is_adapted(g)
    assert max(abs(x) for r in g.matrix for x in r) <= max(abs(x) for r in f.matrix for x in r)


def test_adapted_basis_skew():
    f = random_form(5, 4, 11)
    P = adapted_basis(f)
    assert P is None or is_adapted(base_change(f, P))


def test_reduced_and_split_definite():
    f = random_form(6, 3, 10)  # a conjugated diagonal form
    R = reduced_basis(f)
    g = base_change(f, R) if R is not None else f
    S = unit_splitting(g)
    assert S is not None
    h = base_change(g, S)
    assert all(h.c(i, j) == 0 for i in range(3) for j in range(3) if i != j)
    assert all(abs(h.c(i, i)) == 1 for i in range(3))
