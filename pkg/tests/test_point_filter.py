from src.arith.exact import ProjPoint
from src.filters.point_filter import admit_point, load_orbit_config

from tests.conftest import SEED, ON_ONE_LINE


def test_load_default_config():
    config = load_orbit_config()
    assert config["strategy"]["max_nodes"] == 200
    assert config["strategy"]["policy"] == "lowest-height-first"
    assert config["admission"]["skip_singular_fibres"] is False


def test_load_config_from_path(tmp_path):
    path = tmp_path / "orbit.yml"
    path.write_text("admission:\n  skip_singular_fibres: true\n", encoding="utf-8")
    assert load_orbit_config(path) == {"admission": {"skip_singular_fibres": True}}


def test_admission_order(v0, r0):
    assert admit_point(v0, r0, ProjPoint((1, 2, 3, 4)), 10, {}).reason == "off_surface"
    assert admit_point(v0, r0, ProjPoint((1, 0, 1, 0)), 10, {}).reason == "omega"
    res = admit_point(v0, r0, SEED, 2, {})
    assert not res.pass_through
    assert (res.reason, res.detail) == ("height", "3")
    assert admit_point(v0, r0, SEED, 3, {}).pass_through


def test_singular_fibres_are_recorded(v0, r0):
    res = admit_point(v0, r0, ON_ONE_LINE, 3, {})
    assert res.pass_through
    assert res.singular == (2,)

    skip = {"admission": {"skip_singular_fibres": True}}
    res = admit_point(v0, r0, ON_ONE_LINE, 3, skip)
    assert not res.pass_through
    assert (res.reason, res.detail) == ("singular_fibre", "2")
