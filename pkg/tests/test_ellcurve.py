from fractions import Fraction

import pytest

from src.curves.ellcurve import (
    INFINITY,
    EllPoint,
    PointNotOnCurve,
    SingularFibre,
    WeierstrassCurve,
    bounded_torsion_order,
    fibre_to_weierstrass,
    group_op,
    iterate_coefficients,
    multiply,
    transport_point,
)
from src.geometry.endo import richmond_pair

from tests.conftest import SEED, ON_ONE_LINE


def curve(a4, a6) -> WeierstrassCurve:
    return WeierstrassCurve(*(Fraction(v) for v in (0, 0, 0, a4, a6)))


def pt(x, y) -> EllPoint:
    return EllPoint(Fraction(x), Fraction(y))


def test_discriminant():
    assert curve(-1, 0).discriminant == 64
    assert curve(0, 0).discriminant == 0


def test_group_law_two_torsion():
    E = curve(-1, 0)
    assert group_op(E, "add", pt(0, 0), pt(1, 0)) == pt(-1, 0)
    assert group_op(E, "add", pt(0, 0), pt(0, 0)) == INFINITY
    assert group_op(E, "neg", pt(1, 0)) == pt(1, 0)
    assert bounded_torsion_order(E, pt(0, 0)) == 2


def test_order_six_point():
    E = curve(0, 1)
    P = pt(2, 3)
    assert group_op(E, "mul", 2, P) == pt(0, 1)
    assert group_op(E, "mul", 3, P) == pt(-1, 0)
    assert multiply(E, 6, P) == INFINITY
    assert multiply(E, -1, P) == pt(2, -3)
    assert bounded_torsion_order(E, P) == 6
    assert bounded_torsion_order(E, INFINITY) == 1


def test_infinite_order_point():
    E = curve(0, -2)
    assert E.contains(pt(3, 5))
    assert bounded_torsion_order(E, pt(3, 5)) is None


def test_point_not_on_curve():
    with pytest.raises(PointNotOnCurve):
        group_op(curve(0, 1), "add", pt(1, 1), pt(2, 3))
    with pytest.raises(ValueError):
        group_op(curve(0, 1), "sub", pt(2, 3))


def test_to_json():
    assert INFINITY.to_json() == "O"
    assert pt(Fraction(1, 4), -3).to_json() == ["1/4", "-3"]
    assert curve(-1, 0).to_json() == ["0", "0", "0", "-1", "0"]


def test_iterate_coefficients():
    assert iterate_coefficients(4) == [1, -2, 7, -20]


@pytest.mark.slow
def test_seed_fibre_model(v0, r0):
    E, cmap = fibre_to_weierstrass(v0, r0, 1, SEED)
    assert E.discriminant != 0
    assert transport_point(cmap, SEED) == INFINITY

    e1 = richmond_pair(v0, r0, SEED).e1
    Q = cmap.forward(e1)
    assert E.contains(Q)
    assert transport_point(cmap, Q, "inverse") == e1

    # e_1^2(P) の像は -2 倍
    e2 = richmond_pair(v0, r0, e1).e1
    assert cmap.forward(e2) == multiply(E, -2, Q)


@pytest.mark.slow
def test_singular_fibre_has_no_model(v0, r0):
    with pytest.raises(SingularFibre):
        fibre_to_weierstrass(v0, r0, 2, ON_ONE_LINE)
    E, cmap = fibre_to_weierstrass(v0, r0, 1, ON_ONE_LINE)
    e1 = richmond_pair(v0, r0, ON_ONE_LINE).e1
    assert bounded_torsion_order(E, cmap.forward(e1)) == 2
