from fractions import Fraction

import pytest

from src.arith.exact import ProjPoint
from src.geometry.surface import (
    ALL_PERMUTATIONS,
    ALL_SIGN_AUTS,
    NotOnSurface,
    NotSumZero,
    OmegaPoint,
    PointKind,
    ProductNotSquare,
    SignAut,
    ZeroCoefficient,
    ZeroCoordinate,
    apply_sign_aut,
    classify_point,
    contains,
    has_real_points,
    make_surface,
    permutation_parity,
    permute_point,
    permute_surface,
    require_not_omega,
    sign_orbit,
    sum_zero_companion,
    tangent_plane,
    transport_sum_zero,
)

from tests.conftest import SEED, ONES


def test_make_surface_validates_product():
    assert make_surface(1, 1, -1, -1).N == 1
    assert make_surface(1, 8, -3, -6).N == 12
    with pytest.raises(ProductNotSquare):
        make_surface(1, 1, 1, -1)
    # 6·(-2)·(-3)·(-1) = -36
    with pytest.raises(ProductNotSquare):
        make_surface(6, -2, -3, -1)
    with pytest.raises(ZeroCoefficient):
        make_surface(1, 0, -1, -1)


def test_surface_str(v0):
    assert str(v0) == "1,1,-1,-1"
    assert str(make_surface(Fraction(1, 2), 2, -1, -1)) == "1/2,2,-1,-1"


def test_seed_point_on_v0(v0):
    assert contains(v0, SEED)
    assert not contains(v0, ProjPoint((1, 2, 3, 4)))


def test_classify_point(v0):
    cls = classify_point(v0, ONES)
    assert cls.kind is PointKind.ON_LINE
    assert cls.pairings == ("xz|yw", "xw|yz")
    assert classify_point(v0, ProjPoint((1, 2, 1, 2))).pairings == ("xz|yw",)
    assert classify_point(v0, SEED).kind is PointKind.GENERIC
    assert classify_point(v0, ProjPoint((1, 0, 1, 0))).kind is PointKind.OMEGA
    v = make_surface(-2, 1, 1, -2)
    assert classify_point(v, ProjPoint((0, 1, 1, 1))).kind is PointKind.COORDINATE_PLANE


def test_require_not_omega(v0):
    with pytest.raises(OmegaPoint):
        require_not_omega(v0, ProjPoint((1, 0, 1, 0)))
    with pytest.raises(NotOnSurface):
        require_not_omega(v0, ProjPoint((1, 2, 3, 4)))


def test_sign_automorphisms():
    assert len(ALL_SIGN_AUTS) == 8
    # w を含む集合は補集合で持つ
    assert SignAut.of("w") == SignAut.of("xyz")
    assert str(SignAut.of("xz")) == "sigma_xz"
    assert SignAut.of("x").compose(SignAut.of("z")) == SignAut.of("xz")
    assert apply_sign_aut(SignAut.of("xz"), ONES) == ProjPoint((1, -1, 1, -1))
    images = {Q for _, Q in sign_orbit(ONES)} | {ONES}
    assert len(images) == 8


def test_sum_zero_companion(v0, v1863):
    assert sum_zero_companion(v0, 1) == ProjPoint((1, -1, -1, 1))
    assert sum_zero_companion(v0, -1) == ProjPoint((1, -1, 1, -1))
    assert sum_zero_companion(v1863, 1) == ProjPoint((9, -3, -7, 1))
    assert sum_zero_companion(v1863, -1) == ProjPoint((23, -13, 7, -17))
    for sign in (1, -1):
        assert contains(v1863, sum_zero_companion(v1863, sign))
    with pytest.raises(NotSumZero):
        sum_zero_companion(make_surface(1, 1, 1, 1))


def test_transport_sum_zero(v0):
    new, forward, backward = transport_sum_zero(v0, SEED)
    assert sum(new.coeffs) == 0
    assert forward(SEED) == ONES
    assert backward(ONES) == SEED
    with pytest.raises(ZeroCoordinate):
        transport_sum_zero(make_surface(-2, 1, 1, -2), ProjPoint((0, 1, 1, 1)))


def test_permutations(v0, v1863):
    assert len(ALL_PERMUTATIONS) == 24
    assert permutation_parity((1, 0, 2, 3)) == -1
    assert permutation_parity((1, 0, 3, 2)) == 1
    assert permutation_parity((1, 2, 0, 3)) == 1
    for perm in ALL_PERMUTATIONS:
        S2 = permute_surface(v1863, perm)
        assert contains(S2, permute_point(ONES, perm))
        assert contains(permute_surface(v0, perm), permute_point(SEED, perm))


def test_has_real_points(v0):
    assert has_real_points(v0)
    assert not has_real_points(make_surface(1, 1, 1, 1))


def test_tangent_plane(v0):
    assert tangent_plane(v0, ONES) == (1, 1, -1, -1)
