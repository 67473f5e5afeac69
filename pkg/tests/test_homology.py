import pytest
from hypothesis import given
from hypothesis import strategies as st

from loophom import errors
from loophom.forms import preset
from loophom.homology import (
    LoopComplex,
    check_composition,
    compute,
    degree_of,
    homology_field,
    homology_integer,
    max_slice,
    verify_complex,
    word_lengths,
)
from loophom.linalg import rank
from loophom.oracles import random_form
from loophom.rings import GF, QQ, ZZ

H5 = preset("hyperbolic", 5)
H6 = preset("hyperbolic", 6)


def test_d_vanishes_for_h5():
    cx = LoopComplex(H5, ZZ)
    for ell in range(5):
        assert all(not c for c in cx.d(ell)) and all(not c for c in cx.dprime(ell))


def test_d_h6_length_one():
    cx = LoopComplex(H6, ZZ)
    u11 = cx.algebra.reduce_word_tuple((0, 0))
    u22 = cx.algebra.reduce_word_tuple((1, 1))
    cols = cx.d(1)
    assert rank(QQ, cols) == 2
    image = [c for c in cols if c]
    assert sorted(sorted(c.items()) for c in image) == sorted(sorted({k: 2 * v for k, v in w.items()}.items()) for w in (u11, u22))
    assert len(cx.d(0)) == 2 and all(not c for c in cx.d(0))


def test_dprime_h6_length_one():
    cx = LoopComplex(H6, ZZ)
    assert len(cx.dprime(0)) == 1 and not cx.dprime(0)[0]
    k = next(iter(cx.algebra.reduce_word_tuple((0,))))
    width = cx.dim(2)
    u11 = cx.algebra.reduce_word_tuple((0, 0))
    assert cx.dprime(1)[k] == {width + t: 2 * v for t, v in u11.items()}


def test_homology_middle_terms():
    cx = LoopComplex(H6, QQ)
    assert homology_field(cx.dprime(0), cx.d(1), QQ)[2] == 2
    assert cx.w_piece(1) == (2, [])
    assert cx.q_piece(2) == (1, [])
    assert homology_field([], [{}, {}, {}], QQ) == (3, 0, 3)


def test_homology_integer_examples():
    cx = LoopComplex(H6, ZZ)
    assert homology_integer(cx.d(1), [{}] * cx.dim(2)) == (1, [2, 2])
    assert homology_integer([], [{}] * 4) == (4, [])
    assert cx.z_piece(3)[1] == []


def test_composition_not_zero():
    with pytest.raises(errors.CompositionNotZero):
        check_composition(ZZ, [{0: 1}], [{0: 1}])
    with pytest.raises(errors.CompositionNotZero):
        homology_integer([{0: 1}], [{0: 1}])


def test_h6_degree_ten():
    summary = compute(H6, ZZ, 10)
    assert summary.totals()[10] == (1, [2, 2])
    assert summary.provenance()[10] == ["Q"]


def test_h5_series():
    from loophom.oracles import sphere_product_series

    got = {k: r for k, r in compute(H5, QQ, 20).ranks().items() if r}
    assert got == sphere_product_series(5, 1, 20)


def test_degree_bookkeeping():
    assert degree_of("Q", 2, 6) == 10 and degree_of("W", 1, 6) == 11 and degree_of("Z", 0, 6) == 12
    assert list(word_lengths("Z", 5, 9)) == []
    assert list(word_lengths("W", 5, 13)) == [0, 1, 2]
    assert max_slice(6, 10) == 2


forms = st.sampled_from([(5, 2), (5, 4), (7, 4), (6, 1), (6, 2), (6, 3), (10, 4)]).flatmap(
    lambda nm: st.integers(0, 500).map(lambda seed: random_form(nm[0], nm[1], seed))
)


@given(forms, st.sampled_from([ZZ, QQ, GF(2), GF(3)]))
def test_forced_low_degrees(form, ring):
    n, m = form.n, form.m
    summary = compute(form, ring, 2 * n)
    totals = summary.totals()
    assert totals[0] == (1, [])
    assert totals[n][0] == m
    z0 = summary.piece("Z", 0)
    assert z0.free_rank == 1 and z0.degree == 2 * n


@given(forms)
def test_sparse_path_matches_dict_path(form):
    for ring in (ZZ, GF(5)):
        fast = LoopComplex(form, ring)
        slow = LoopComplex(form, ring, algebra=fast.algebra)
        slow._matrices = None
        for ell in range(4):
            assert fast.d(ell) == slow.d(ell)
            assert fast.dprime(ell) == slow.dprime(ell)


@given(forms)
def test_composites_vanish(form):
    rec = verify_complex(form, 4, ZZ)
    assert rec.ok and rec.checked == [0, 1, 2, 3, 4]


@pytest.mark.parametrize("form", [H5, H6, random_form(7, 4, 0)])
def test_verify_examples(form):
    assert verify_complex(form, 6 if form.m == 2 else 4, ZZ).ok


@given(forms)
def test_z_is_torsion_free_and_field_counts(form):
    zs = compute(form, ZZ, 4 * form.n)
    for p in (2, 3):
        fs = compute(form, GF(p), 4 * form.n)
        for k, (r, t) in zs.totals().items():
            below = zs.totals().get(k - 1, (0, []))[1]
            assert fs.totals()[k][0] == r + sum(f % p == 0 for f in t) + sum(f % p == 0 for f in below)
