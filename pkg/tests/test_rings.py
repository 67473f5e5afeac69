from fractions import Fraction

import pytest

from loophom import errors
from loophom.rings import GF, QQ, ZZ, parse_ring


@pytest.mark.parametrize(
    "raw, label",
    [("Z", "Z"), ("Q", "Q"), ({"Fp": 7}, "F7"), ("F2", "F2"), ("Fp:3", "F3"), ("GF(5)", "F5")],
)
def test_parse(raw, label):
    assert parse_ring(raw).label() == label


@pytest.mark.parametrize("raw", [{"Fp": 4}, "F1", "R", {"Fp": 2**31 + 11}, 3])
def test_parse_rejects(raw):
    with pytest.raises(errors.ValidationError):
        parse_ring(raw)


def test_units_and_inverses():
    assert ZZ.is_unit(-1) and not ZZ.is_unit(2)
    assert QQ.inv(3) == Fraction(1, 3)
    assert QQ.norm(Fraction(4, 2)) == 2 and type(QQ.norm(Fraction(4, 2))) is int
    F = GF(7)
    assert F.inv(3) * 3 % 7 == 1
    assert F.norm(-1) == 6
    with pytest.raises(ZeroDivisionError):
        ZZ.inv(2)


def test_field_flags():
    assert not ZZ.is_field and QQ.is_field and GF(3).is_field
    assert GF(3).characteristic == 3 and QQ.characteristic == 0
