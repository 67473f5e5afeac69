import pytest
from hypothesis import given
from hypothesis import strategies as st

from loophom import errors
from loophom.forms import make_form, preset
from loophom.linalg import axpy, rank, smith_invariants
from loophom.oracles import random_form
from loophom.rings import GF, QQ, ZZ
from loophom.tensor import UAlgebra, bracket_left, chi, ideal_slice, index_word, u_slice, word_index, word_str

H5 = preset("hyperbolic", 5)
H6 = preset("hyperbolic", 6)


def test_chi_examples():
    assert chi(H5).coefficients == {(0, 1): 1, (1, 0): -1}
    assert chi(H6).coefficients == {(0, 1): 1, (1, 0): 1}
    assert chi(make_form(6, [[2]], allow_nonunimodular=True)).coefficients == {(0, 0): 2}


def test_ideal_slice_examples():
    assert ideal_slice(chi(H5), 2) == [{1: 1, 2: -1}]
    cols = ideal_slice(chi(H5), 3)
    assert len(cols) == 4 and all(max(c) < 8 for c in cols)
    assert rank(QQ, cols) == 4
    with pytest.raises(ValueError):
        ideal_slice(chi(H5), 1)


def test_words():
    assert word_str((0, 0, 1)) == "u1^2u2" and word_str(()) == "1"
    assert index_word(word_index((1, 0, 1), 3), 3, 3) == (1, 0, 1)


@pytest.mark.parametrize("form, ell, dim", [(H5, 0, 1), (H5, 1, 2), (H5, 2, 3), (H6, 2, 3), (H6, 4, 5)])
def test_slice_dims(form, ell, dim):
    s = u_slice(form, ell)
    assert s.dim == dim and s.ambient_dim == 2**ell


def test_unit_slice_basis():
    assert u_slice(H5, 0).basis == ["1"]


def test_reduce_word_examples():
    a5 = UAlgebra(H5, ZZ)
    a6 = UAlgebra(H6, ZZ)
    s5, s6 = a5.slice(2), a6.slice(2)
    assert s5.reduce_word({(1, 0): 1}) == a5.reduce_word_tuple((0, 1))
    assert s6.reduce_word({(1, 0): 1}) == {k: -v for k, v in a6.reduce_word_tuple((0, 1)).items()}
    assert s5.reduce_word([0, 0, 0, 0]) == {}
    with pytest.raises(errors.DimensionMismatch):
        s5.reduce_word([1, 0])


def _coords(algebra, word):
    return algebra.reduce_word_tuple(word)


def test_bracket_left_examples():
    a6 = UAlgebra(H6, ZZ)
    u1 = _coords(a6, (0,))
    assert bracket_left(H6, 0, u1, 1) == {k: 2 * v for k, v in _coords(a6, (0, 0)).items()}
    a5 = UAlgebra(H5, ZZ)
    assert bracket_left(H5, 0, _coords(a5, (1,)), 1) == {}
    assert bracket_left(H6, 1, {0: 1}, 0) == {}
    with pytest.raises(errors.DimensionMismatch):
        bracket_left(H6, 0, {7: 1}, 1)


def test_size_cap():
    with pytest.raises(errors.SizeCapExceeded):
        UAlgebra(H6, ZZ, size_cap=10).slice(4)
    with pytest.raises(errors.SizeCapExceeded):
        ideal_slice(chi(H6), 4, cap=10)


forms = st.sampled_from([(5, 2), (5, 4), (7, 2), (6, 1), (6, 2), (6, 3), (10, 3)]).flatmap(
    lambda nm: st.integers(0, 500).map(lambda seed: random_form(nm[0], nm[1], seed))
)


@given(forms)
def test_hilbert_series(form):
    # for m >= 2 U has Hilbert series 1/(1 - m t + t^2); for m = 1 it is R[u]/(u^2)
    want = [1, form.m]
    for _ in range(4):
        want.append(max(form.m * want[-1] - want[-2], 0))
    for ring in (ZZ, QQ, GF(2)):
        algebra = UAlgebra(form, ring)
        assert [algebra.dim(ell) for ell in range(6)] == want


@given(forms)
def test_incremental_matches_literal_ideal(form):
    algebra = UAlgebra(form, ZZ)
    rel = chi(form)
    for ell in range(2, 5):
        cols = ideal_slice(rel, ell)
        r, factors = smith_invariants(cols, form.m**ell)
        assert algebra.dim(ell) == form.m**ell - r
        assert factors == []  # V^l / I_l is torsion-free


@given(forms, st.data())
def test_reduce_lift_identity(form, data):
    for ring in (ZZ, GF(3)):
        algebra = UAlgebra(form, ring)
        ell = data.draw(st.integers(0, 4))
        dim = algebra.dim(ell)
        x = {k: ring.norm(c) for k, c in enumerate(data.draw(st.lists(st.integers(-3, 3), min_size=dim, max_size=dim))) if ring.norm(c)}
        assert algebra.reduce_ambient(algebra.lift(x, ell), ell) == x


@given(forms, st.data())
def test_bracket_is_commutator_of_words(form, data):
    """[u_i, w] computed on U agrees with u_i w - s w u_i reduced from the free algebra."""
    algebra = UAlgebra(form, ZZ)
    ell = data.draw(st.integers(0, 4))
    w = tuple(data.draw(st.lists(st.integers(0, form.m - 1), min_size=ell, max_size=ell)))
    i = data.draw(st.integers(0, form.m - 1))
    s = algebra.bracket_sign(ell)
    want = dict(algebra.reduce_word_tuple((i,) + w))
    axpy(ZZ, want, -s, algebra.reduce_word_tuple(w + (i,)))
    assert algebra.bracket_left(i, algebra.reduce_word_tuple(w), ell) == want


@given(forms)
def test_dims_agree_across_rings(form):
    algebra_q = UAlgebra(form, QQ)
    for p in (2, 3):
        algebra_p = UAlgebra(form, GF(p))
        assert [algebra_p.dim(ell) for ell in range(5)] == [algebra_q.dim(ell) for ell in range(5)]


def test_permutation_invariance_of_dims():
    from loophom.forms import permute

    f = random_form(6, 3, 4)
    g = permute(f, [2, 0, 1])
    assert [UAlgebra(f, ZZ).dim(ell) for ell in range(6)] == [UAlgebra(g, ZZ).dim(ell) for ell in range(6)]


def test_dim_two():
    for f in (H5, H6, preset("e8", 6), preset("hyperbolic", 7, g=2)):
        assert UAlgebra(f, QQ).dim(2) == f.m**2 - 1
