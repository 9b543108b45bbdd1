import pytest

from src.arith.exact import ProjPoint
from src.geometry.endo import apply_endo, node_directions, restricted_quartic, richmond_pair
from src.geometry.fibration import fibre_value
from src.geometry.surface import (
    ALL_SIGN_AUTS,
    OmegaPoint,
    apply_sign_aut,
    contains,
    make_surface,
)

from tests.conftest import SEED, ON_ONE_LINE, ONES


def test_ones_on_v0(v0, r0):
    pair = richmond_pair(v0, r0, ONES)
    assert pair.e1 == ProjPoint((1, -1, 1, -1))
    assert pair.e2 == ProjPoint((1, -1, -1, 1))
    assert pair.get(1) == pair.e1
    with pytest.raises(ValueError):
        pair.get(0)


def test_ones_on_general_surface(v1863, r1863):
    pair = richmond_pair(v1863, r1863, ONES)
    assert {pair.e1, pair.e2} == {ProjPoint((9, -3, -7, 1)), ProjPoint((23, -13, 7, -17))}


def test_point_on_one_line(v0, r0):
    assert richmond_pair(v0, r0, ON_ONE_LINE).e1 == ProjPoint((1, -2, 1, -2))


def test_seed_images(v0, r0):
    pair = richmond_pair(v0, r0, SEED)
    for i in (1, 2):
        image = pair.get(i)
        assert contains(v0, image)
        assert image != SEED
        assert fibre_value(v0, r0, i, image) == fibre_value(v0, r0, i, SEED)
    assert apply_endo(v0, r0, 1, SEED) == pair.e1


def test_commutes_with_sign_automorphisms(v0, r0):
    pair = richmond_pair(v0, r0, SEED)
    for sigma in ALL_SIGN_AUTS:
        img = richmond_pair(v0, r0, apply_sign_aut(sigma, SEED))
        assert img.e1 == apply_sign_aut(sigma, pair.e1)
        assert img.e2 == apply_sign_aut(sigma, pair.e2)


def test_zero_coordinate_point_is_fixed():
    S = make_surface(-2, 1, 1, -2)
    P = ProjPoint((0, 1, 1, 1))
    # 0 座標の点では ruling を参照しない
    pair = richmond_pair(S, None, P)
    assert (pair.e1, pair.e2) == (P, P)


def test_omega_rejected(v0, r0):
    with pytest.raises(OmegaPoint):
        richmond_pair(v0, r0, ProjPoint((1, 0, 1, 0)))


def test_node_directions_lie_in_tangent_plane(v0):
    for D in node_directions(v0, SEED):
        q = restricted_quartic(v0, SEED, D)
        # P は V 上、D は接平面内で結節の接線なので t^4, t^3u, t^2u^2 が消える
        assert q.coeffs[:3] == (0, 0, 0)
