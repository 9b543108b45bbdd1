import pytest

from src.arith.exact import ProjPoint
from src.curves.torsion import (
    CertificateRefused,
    OrderKind,
    TorsionError,
    certify_infinite_order,
    fourtorsion_candidates,
    order_class,
)
from src.geometry.fibration import fibre_value
from src.geometry.surface import contains, make_surface

from tests.conftest import SEED, ON_ONE_LINE, ONES


def test_zero_coordinate_is_order_one():
    S = make_surface(-2, 1, 1, -2)
    P = ProjPoint((0, 1, 1, 1))
    # 0 座標の点はファイバーを見る前に決まる
    oc = order_class(S, None, 1, P)
    assert oc.kind is OrderKind.ONE
    assert oc.order == 1


def test_point_on_one_line(v0, r0):
    oc = order_class(v0, r0, 1, ON_ONE_LINE)
    assert oc.kind is OrderKind.TWO
    assert oc.witness["matched"] == "sigma_xz"
    assert oc.to_json()["order"] == "Two"
    assert order_class(v0, r0, 2, ON_ONE_LINE).kind is OrderKind.UNDEFINED_SINGULAR_FIBRE


def test_ones_sits_on_singular_fibres(v0, r0):
    for i in (1, 2):
        oc = order_class(v0, r0, i, ONES)
        assert oc.kind is OrderKind.UNDEFINED_SINGULAR_FIBRE
        with pytest.raises(TorsionError):
            oc.order


def test_seed_point_has_infinite_order(v0, r0):
    for i in (1, 2):
        assert order_class(v0, r0, i, SEED).kind is OrderKind.INFINITE


def test_certificate_refused_for_finite_class(v0, r0):
    with pytest.raises(CertificateRefused):
        certify_infinite_order(v0, r0, 1, ON_ONE_LINE)


@pytest.mark.slow
def test_certificate_for_seed_point(v0, r0):
    cert = certify_infinite_order(v0, r0, 1, SEED)
    assert cert["point"] == str(SEED)
    assert len(cert["multiples"]) == 12
    assert "O" not in cert["multiples"]


def test_fourtorsion_candidates(v0, r0):
    cands = fourtorsion_candidates(v0, r0, 1, SEED)
    assert len(cands) == 4
    fid = fibre_value(v0, r0, 1, SEED)
    for Q in cands:
        assert contains(v0, Q)
        assert fibre_value(v0, r0, 1, Q) == fid
        assert sorted(map(abs, Q.coords)) == sorted(SEED.coords)
