import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from loophom import errors
from loophom.forms import preset
from loophom.homology import compute
from loophom.oracles import euler_check, random_form, sphere_check, sphere_product_series, ucoeff_check
from loophom.rings import GF, QQ, ZZ

H6 = preset("hyperbolic", 6)


def test_sphere_series_examples():
    assert sphere_product_series(5, 1, 14) == {0: 1, 4: 2, 5: 2, 8: 3, 9: 4, 10: 1, 12: 4, 13: 6, 14: 2}
    assert sphere_product_series(5, 1, 0) == {0: 1}
    assert sphere_product_series(7, 1, 6) == {0: 1, 6: 2}


@pytest.mark.parametrize("n, g", [(5, 1), (5, 2), (7, 1), (9, 2)])
def test_sphere_series_against_sympy(n, g):
    t = sympy.symbols("t")
    expr = ((1 + t**n) / (1 - t ** (n - 1))) ** (2 * g)
    poly = sympy.series(expr, t, 0, 31).removeO()
    want = {k: int(poly.coeff(t, k)) for k in range(31) if poly.coeff(t, k)}
    assert sphere_product_series(n, g, 30) == want


def test_sphere_series_guards():
    with pytest.raises(errors.ParityUnsupported):
        sphere_product_series(6, 1, 10)
    with pytest.raises(errors.ValidationError):
        sphere_product_series(1, 1, 10)


@pytest.mark.parametrize("n", [5, 7, 9])
def test_sphere_check(n):
    assert sphere_check(n, 1, 40)


def test_ucoeff_examples():
    z = compute(H6, ZZ, 12)
    f2 = compute(H6, GF(2), 12)
    f3 = compute(H6, GF(3), 12)
    assert f2.totals()[10][0] == 3 and f3.totals()[10][0] == 1
    assert ucoeff_check(z, f2, 2) and ucoeff_check(z, f3, 3)
    q = compute(H6, QQ, 12)
    assert ucoeff_check(q, q, 5)


def test_ucoeff_reports_mismatch():
    z = compute(H6, ZZ, 12)
    f3 = compute(H6, GF(3), 12)
    res = ucoeff_check(z, f3, 2)
    assert not res and res.mismatch["degree"] == 10
    assert not ucoeff_check(z, compute(H6, GF(2), 11), 2)


def test_euler_examples():
    assert euler_check(H6, QQ, 2)
    assert euler_check(preset("hyperbolic", 5), QQ, 2)
    assert euler_check(H6, GF(2), 6)
    with pytest.raises(errors.InvalidRing):
        euler_check(H6, ZZ, 2)


def test_random_form_examples():
    f = random_form(5, 2, 7)
    assert f.det() == 1 and f.skew
    for seed in range(5):
        assert random_form(6, 1, seed).matrix in (((1,),), ((-1,),))
    with pytest.raises(errors.OddRankSkew):
        random_form(7, 3, 1)


@given(st.sampled_from([(5, 2), (6, 2), (6, 3), (7, 4), (10, 4)]), st.integers(0, 1000))
def test_euler_on_random_forms(nm, seed):
    form = random_form(*nm, seed)
    assert euler_check(form, QQ, 4)
    assert euler_check(form, GF(2), 4)
