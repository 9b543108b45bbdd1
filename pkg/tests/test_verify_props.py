import pytest

from src.arith.exact import ProjPoint
from src.geometry.fibration import fibre_value
from src.jobs.verify_props import (
    PROPS,
    PropContext,
    PropResult,
    check_esquared,
    check_phipistwo,
    run_suite,
    sample_points,
)

from tests.conftest import SEED, ON_ONE_LINE, ONES

# x^4 + y^4 = z^4 + w^4 の小さな解
SMALL_SOLUTIONS = [
    ProjPoint((157, 227, 7, 239)),
    ProjPoint((256, 257, 193, 292)),
    ProjPoint((298, 497, 271, 502)),
    ProjPoint((359, 514, 103, 542)),
    ProjPoint((503, 558, 222, 631)),
    ProjPoint((471, 681, 21, 717)),
    ProjPoint((653, 1176, 76, 1203)),
]


def test_prop_result_keeps_first_failures():
    res = PropResult("demo")
    for k in range(8):
        res.fail(str(k))
    assert not res.passed
    assert res.failures == ["0", "1", "2", "3", "4"]
    assert res.to_json()["status"] == "FAIL"


def test_registry_names():
    assert len(PROPS) == 12
    assert "essence-tangent-in-A" in PROPS


def test_sample_points_are_sorted(v0, r0):
    samples = sample_points(v0, r0, SEED, count=10)
    assert len(samples) == 10
    assert samples == sorted(samples, key=lambda P: P.sort_key())


@pytest.mark.parametrize("seed", [SEED, ON_ONE_LINE])
def test_cheap_props_pass(v0, r0, seed):
    names = ["zerofix", "onlines", "sigmacomm", "essence-tangent-in-A", "ordtwo"]
    results = run_suite(v0, r0, seed, names, count=12)
    assert [r.name for r in results] == names
    for res in results:
        assert res.passed, res.to_json()


def test_onlines_checks_line_points(v0, r0):
    (res,) = run_suite(v0, r0, ON_ONE_LINE, ["onlines"], count=8)
    assert res.checked >= 8


def test_general_surface(v1863, r1863):
    results = run_suite(v1863, r1863, ONES, ["zerofix", "sigmacomm", "essence-tangent-in-A"], count=8)
    assert all(r.passed for r in results)


def test_elliptic_points_prefer_new_fibres(v0, r0):
    samples = sorted({P for seed in (SEED, *SMALL_SOLUTIONS[:2])
                      for P in sample_points(v0, r0, seed, count=8)}, key=lambda P: P.sort_key())
    ctx = PropContext(v0, r0, samples, elliptic_samples=3)
    for i in (1, 2):
        picked = ctx.elliptic_points(i)
        assert len({fibre_value(v0, r0, i, P) for P in picked}) == 3


@pytest.mark.slow
def test_esquared_iterates_three_times(v0, r0):
    res = check_esquared(PropContext(v0, r0, [SEED], elliptic_samples=1))
    assert res.passed, res.to_json()
    # n = 2, 3 を 2 つのファイブレーションで
    assert res.checked == 4


@pytest.mark.slow
def test_elliptic_identities_on_twenty_fibres(v0, r0):
    samples = sorted({P for seed in (SEED, *SMALL_SOLUTIONS)
                      for P in sample_points(v0, r0, seed, count=24, max_digits=80)},
                     key=lambda P: P.sort_key())
    ctx = PropContext(v0, r0, samples, elliptic_samples=12, deep_iterate_digits=0)
    fibres = sum(len({fibre_value(v0, r0, i, P) for P in ctx.elliptic_points(i)}) for i in (1, 2))
    assert fibres >= 20
    for check in (check_esquared, check_phipistwo):
        res = check(ctx)
        assert res.passed, res.to_json()
        assert res.checked >= 20


@pytest.mark.slow
def test_full_suite_on_seed_point(v0, r0):
    results = run_suite(v0, r0, SEED, count=16, elliptic_samples=2)
    failed = [r.to_json() for r in results if not r.passed]
    assert not failed
    by_name = {r.name: r for r in results}
    assert by_name["esquared"].checked > 0
    assert by_name["fourtorsion-rational"].checked > 0
