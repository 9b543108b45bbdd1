from fractions import Fraction

import pytest

from src.arith.exact import ProjPoint
from src.common.spec_parser import (
    BadPointSpec,
    BadSurfaceSpec,
    InvocationError,
    normalize_spec,
    parse_point,
    parse_surface,
)


def test_normalize_spec():
    assert normalize_spec(" 1, 1 ,−1,-1 ") == "1,1,-1,-1"
    assert normalize_spec("１，１，－１，－１") == "1,1,-1,-1"
    assert normalize_spec(None) == ""


def test_parse_surface():
    S = parse_surface("1,8,-3,-6")
    assert S.coeffs == (1, 8, -3, -6)
    assert S.N == 12
    assert parse_surface("1/2,2,-1,-1").a == Fraction(1, 2)


@pytest.mark.parametrize("text", ["", "1,1,-1", "1,1,x,-1", "1,1,1,-1", "0,1,-1,-1", "1/0,1,-1,-1"])
def test_parse_surface_rejects(text):
    with pytest.raises(BadSurfaceSpec):
        parse_surface(text)


def test_parse_point():
    assert parse_point("133:134:158:59") == ProjPoint((133, 134, 158, 59))
    assert parse_point("-2:-4:-2:-4") == ProjPoint((1, 2, 1, 2))
    assert parse_point("1/2:1:1:1") == ProjPoint((1, 2, 2, 2))


@pytest.mark.parametrize("text", ["1:1:1", "0:0:0:0", "a:1:1:1", "1:1:1:1/0"])
def test_parse_point_rejects(text):
    with pytest.raises(BadPointSpec) as exc:
        parse_point(text)
    assert isinstance(exc.value, InvocationError)
