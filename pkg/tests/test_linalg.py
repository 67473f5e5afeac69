import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form

from loophom.linalg import (
    bareiss_det,
    from_dense,
    invariant_factors_from_diagonal,
    inverse_unimodular,
    nullity,
    rank,
    smith_invariants,
    to_dense,
)
from loophom.rings import GF, QQ, ZZ

small = st.integers(-6, 6)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    )


def _sympy_invariants(rows):
    snf = smith_normal_form(sympy.Matrix(rows), domain=sympy.ZZ)
    diag = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    nonzero = [d for d in diag if d]
    return len(nonzero), sorted(d for d in nonzero if d > 1)


def test_dense_round_trip():
    rows = [[1, 0, 2], [0, -3, 0]]
    cols, nrows = from_dense(rows)
    assert nrows == 2 and to_dense(cols, nrows) == rows


@given(matrices())
def test_smith_matches_sympy(rows):
    cols, nrows = from_dense(rows)
    r, factors = smith_invariants(cols, nrows)
    assert (r, sorted(factors)) == _sympy_invariants(rows)


@given(matrices())
def test_rank_over_fields(rows):
    cols, _ = from_dense(rows)
    M = sympy.Matrix(rows)
    assert rank(QQ, cols) == M.rank()
    assert rank(ZZ, cols) == M.rank()
    # over F_p the rank drops exactly by the invariant factors divisible by p
    r, factors = smith_invariants(cols)
    for p in (2, 3, 5):
        assert rank(GF(p), cols) == r - sum(1 for f in factors if f % p == 0)


@given(st.integers(1, 5).flatmap(lambda k: st.lists(st.lists(small, min_size=k, max_size=k), min_size=k, max_size=k)))
def test_det_matches_sympy(rows):
    assert bareiss_det(rows) == sympy.Matrix(rows).det()


def test_nullity():
    cols, _ = from_dense([[1, 2], [2, 4]])
    assert nullity(QQ, cols) == 1


@pytest.mark.parametrize(
    "diag, expected",
    [
        ([2, 2], [2, 2]),
        ([2, 3], [6]),
        ([4, 6, 1, -1], [2, 12]),
        ([0, 1], []),
    ],
)
def test_invariant_factors_from_diagonal(diag, expected):
    assert invariant_factors_from_diagonal(diag) == expected


def test_inverse_unimodular():
    S = [[2, 1], [1, 1]]
    inv = inverse_unimodular(S)
    prod = [[sum(S[i][k] * inv[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
    assert prod == [[1, 0], [0, 1]]
