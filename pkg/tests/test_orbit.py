import time

import pytest

from src.arith.exact import ProjPoint, height
from src.geometry.endo import apply_endo
from src.geometry.surface import contains
from src.orbit.engine import (
    EmptyBudget,
    SeedInOmega,
    Strategy,
    UnknownPolicy,
    fibre_spread,
    generate_orbit,
    run_orbit,
)
from src.orbit.histogram import density_histogram

from tests.conftest import SEED, ONES

SIGN_ONLY = Strategy(max_nodes=50, use_endomorphisms=False)


def test_sign_closure_only(v0, r0):
    run = run_orbit(v0, r0, ONES, SIGN_ONLY)
    coords = {n.point.coords for n in run.nodes}
    assert len(coords) == 8
    assert all(abs(c) == 1 for p in coords for c in p)
    assert [n.id for n in run.nodes] == list(range(8))

    seed = next(n for n in run.nodes if n.op == "seed")
    assert seed.point == ONES
    assert seed.parent is None
    assert all(n.parent == seed.id for n in run.nodes if n is not seed)
    # (1:1:1:1) は両方のファイブレーションで特異ファイバー上
    assert run.singular == {1: 8, 2: 8}
    assert fibre_spread(run.nodes, 1) == 1


def test_nodes_sorted_by_height(v0, r0):
    nodes = generate_orbit(v0, r0, SEED, Strategy(max_nodes=20, max_height_digits=60))
    keys = [n.point.sort_key() for n in nodes]
    assert keys == sorted(keys)
    for n in nodes:
        assert contains(v0, n.point)
        assert n.height_digits <= 60


def test_height_budget_prunes(v0, r0):
    run = run_orbit(v0, r0, SEED, Strategy(max_nodes=50, max_height_digits=3))
    assert len(run.nodes) >= 8
    assert all(n.height_digits <= 3 for n in run.nodes)
    assert run.pruned
    row = run.pruned[0]
    assert set(row) == {"coords", "op", "parent", "height_digits"}
    assert row["height_digits"] > 3


def test_budget_errors(v0, r0):
    with pytest.raises(EmptyBudget):
        run_orbit(v0, r0, SEED, Strategy(max_nodes=0))
    with pytest.raises(EmptyBudget):
        run_orbit(v0, r0, SEED, Strategy(max_height_digits=2))
    with pytest.raises(SeedInOmega):
        run_orbit(v0, r0, ProjPoint((1, 0, 1, 0)), Strategy())
    with pytest.raises(UnknownPolicy):
        run_orbit(v0, r0, SEED, Strategy(policy="breadth-first"))


def test_strategy_from_config():
    config = {"strategy": {"max_nodes": 50, "sign_closure": False, "unknown": 1}}
    assert Strategy.from_config(config, max_nodes=None).max_nodes == 50
    strat = Strategy.from_config(config, max_nodes=10)
    assert strat.max_nodes == 10
    assert strat.sign_closure is False
    assert Strategy.from_config({}).max_height_digits == 2000


def test_fibre_spread_rejects_bad_index(v0, r0):
    with pytest.raises(ValueError):
        fibre_spread([], 3)


@pytest.mark.slow
def test_output_independent_of_threads(v0, r0):
    strat = Strategy(max_nodes=40, max_height_digits=400)
    one = [n.to_row() for n in generate_orbit(v0, r0, SEED, strat, threads=1)]
    four = [n.to_row() for n in generate_orbit(v0, r0, SEED, strat, threads=4)]
    assert one == four


@pytest.mark.slow
def test_seed_orbit_spreads_over_fibres(v0, r0):
    started = time.perf_counter()
    run = run_orbit(v0, r0, SEED, Strategy(max_nodes=200, max_height_digits=2000))
    elapsed = time.perf_counter() - started

    assert len(run.nodes) >= 25
    assert len({n.point for n in run.nodes}) == len(run.nodes)
    assert fibre_spread(run.nodes, 1) >= 5
    assert fibre_spread(run.nodes, 2) >= 5
    assert density_histogram(v0, run.nodes, bins=10).occupied >= 10
    assert elapsed < 60
    assert run.report()["nodes"] == len(run.nodes)
    # 3 段目の像は 2000 桁を超えて枝刈りされる
    assert run.pruned


@pytest.mark.slow
def test_spread_and_bins_grow_with_budget(v0, r0):
    runs = [generate_orbit(v0, r0, SEED, Strategy(max_nodes=n)) for n in (30, 80, 200)]
    chart = density_histogram(v0, runs[-1]).chart
    for i in (1, 2):
        spreads = [fibre_spread(nodes, i) for nodes in runs]
        assert spreads == sorted(spreads)
    occupied = [density_histogram(v0, nodes, chart).occupied for nodes in runs]
    assert occupied == sorted(occupied)
    small, large = ({n.point for n in nodes} for nodes in (runs[0], runs[-1]))
    assert small <= large


@pytest.mark.slow
@pytest.mark.parametrize("i", [1, 2])
def test_heights_increase_under_iteration(v0, r0, i):
    P = SEED
    heights = [height(P)]
    for _ in range(3):
        P = apply_endo(v0, r0, i, P)
        assert contains(v0, P)
        heights.append(height(P))
    assert heights == sorted(set(heights))
