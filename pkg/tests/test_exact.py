from fractions import Fraction

import pytest
import sympy

from src.arith.exact import (
    AllZero,
    BinaryQuadratic,
    BinaryQuartic,
    IdenticallyZero,
    NonSquareDiscriminant,
    NotTripleRoot,
    ProjPoint,
    ZeroForm,
    deflate_triple_root,
    digits,
    format_rat,
    height,
    linear_root,
    normalize_pair,
    normalize_point,
    nullspace,
    primitive,
    rank,
    rational_sqrt,
    split_square_disc_quadratic,
    to_rat,
)


def test_normalize_point_clears_content_and_sign():
    assert normalize_point([84, -60, 324, -348]) == ProjPoint((7, -5, 27, -29))
    assert normalize_point([-3, 3, 3, 3]) == ProjPoint((1, -1, -1, -1))
    assert normalize_point([Fraction(1, 2), Fraction(1, 3), 0, 1]) == ProjPoint((3, 2, 0, 6))


def test_normalize_point_scale_invariant_and_idempotent():
    P = ProjPoint((133, 134, 158, 59))
    for k in (2, -3, Fraction(1, 7), Fraction(-5, 4)):
        assert normalize_point([k * c for c in P.coords]) == P
    Q = normalize_point([-6, 0, 4, 2])
    assert normalize_point(Q.coords) == Q


def test_normalize_point_rejects_zero_vector():
    with pytest.raises(AllZero):
        normalize_point([0, 0, 0, 0])


def test_point_str_and_height():
    P = ProjPoint((133, 134, 158, 59))
    assert str(P) == "133:134:158:59"
    assert height(P) == 158
    assert digits(height(P)) == 3
    assert P.zero_count == 0
    assert ProjPoint((0, 1, 1, 1)).zero_count == 1


def test_to_rat_and_format():
    assert to_rat("3/6") == Fraction(1, 2)
    assert to_rat(sympy.Rational(-4, 6)) == Fraction(-2, 3)
    assert format_rat(Fraction(6, 3)) == "2"
    assert format_rat(Fraction(-1, 4)) == "-1/4"
    with pytest.raises(TypeError):
        to_rat(1.5)


def test_rational_sqrt():
    assert rational_sqrt(Fraction(4, 9)) == Fraction(2, 3)
    assert rational_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert rational_sqrt(144) == 12
    assert rational_sqrt(2) is None


def test_primitive_and_pairs():
    assert primitive([0, -4, 6]) == (0, 2, -3)
    assert primitive([0, -4, 6], canonical_sign=False) == (0, -2, 3)
    assert normalize_pair(-7275, 21437) == (75, -221)
    with pytest.raises(AllZero):
        normalize_pair(0, 0)


def test_split_square_disc_quadratic():
    assert split_square_disc_quadratic(BinaryQuadratic.of(1, 0, -1)) == ((1, -1), (1, 1))
    assert split_square_disc_quadratic(BinaryQuadratic.of(1, 0, 0)) == ((1, 0), (1, 0))
    # A = 0: β(Bα + Cβ)
    assert split_square_disc_quadratic(BinaryQuadratic.of(0, 2, 4)) == ((0, 1), (1, 2))
    with pytest.raises(NonSquareDiscriminant):
        split_square_disc_quadratic(BinaryQuadratic.of(1, 0, -2))
    with pytest.raises(ZeroForm):
        split_square_disc_quadratic(BinaryQuadratic.of(0, 0, 0))


def test_linear_root():
    assert linear_root((1, -1)) == (1, 1)
    assert linear_root((0, 1)) == (1, 0)


def test_deflate_triple_root():
    # (t - u)^3 (t - 5u)
    q = BinaryQuartic.of(1, -8, 18, -16, 5)
    assert deflate_triple_root(q, (1, 1)) == (5, 1)
    # (t - u)^4: 4 つ目の根も (1:1)
    assert deflate_triple_root(BinaryQuartic.of(1, -4, 6, -4, 1), (1, 1)) == (1, 1)
    # u^3 (2t - 3u): 3 重根 (1:0)、残りの根 (3:2)
    assert deflate_triple_root(BinaryQuartic.of(0, 0, 0, 2, -3), (1, 0)) == (3, 2)


def test_deflate_triple_root_errors():
    with pytest.raises(NotTripleRoot):
        deflate_triple_root(BinaryQuartic.of(1, 0, -1, 0, 0), (1, 1))
    with pytest.raises(IdenticallyZero):
        deflate_triple_root(BinaryQuartic.of(0, 0, 0, 0, 0), (1, 0))


def test_linear_algebra():
    assert rank([[1, 2, 3], [2, 4, 6]]) == 1
    assert rank([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]]) == 3
    assert nullspace([[1, 1, 0], [0, 1, 1]]) == [(1, -1, 1)]


def test_digits_of_long_integers():
    assert digits(0) == 1
    assert digits(-999) == 3
    assert digits(1000) == 4
    assert digits(10 ** 5000) == 5001
    assert digits(10 ** 5000 - 1) == 5000
    assert digits(-(2 ** 20000)) == 6021
    # 4300 桁を超える座標も 10 進表記にできる
    assert str(ProjPoint((10 ** 5000, 1, 0, 0))).startswith("1" + "0" * 10)
