import math

import numpy as np
import pytest

from statarb.backtest import run_policy_backtest
from statarb.errors import EmptyGrid, NonPositiveStart, NoSuccessfulPoint
from statarb.grid_tuner import (
    GridSpec,
    default_grid,
    grid_search,
    rtot,
    select_best,
    write_grid_csv,
)
from statarb.ledger import FeeModel
from statarb.policies import gatev_policy
from statarb.spread_engine import Thresholds
from statarb.synthetic import make_series, pulse_pair

FEE = FeeModel(0.0002)
MINI_SPEC = GridSpec((1.9, 4.0), (0.4, 2.0), (900, 2000))


def test_rtot_flat_is_zero():
    assert rtot(100.0, 100.0, 10) == 0.0


def test_rtot_known_value():
    assert rtot(100.0, 121.0, 2) == pytest.approx(10.0, abs=1e-9)


def test_rtot_rejects_nonpositive_start():
    with pytest.raises(NonPositiveStart):
        rtot(0.0, 10.0, 5)


def test_combos_skip_inverted_thresholds():
    spec = GridSpec((1.0, 2.5), (0.5, 2.0), (500,))
    combos = spec.combos()
    assert (1.0, 2.0, 500) not in combos
    assert (2.5, 2.0, 500) in combos
    assert all(ot > ct for ot, ct, _ in combos)


def test_empty_grid_raises():
    with pytest.raises(EmptyGrid):
        grid_search(pulse_pair(1000), GridSpec((0.5,), (0.5, 2.0), (100,)), FEE)


def test_single_point_grid(planted_series):
    points = grid_search(planted_series, GridSpec((1.9,), (0.4,), (900,)), FEE)
    assert len(points) == 1
    assert points[0].status == "ok"
    assert select_best(points) == points[0]


def test_no_trigger_point_has_zero_rtot(planted_series):
    # z never reaches 4.0 on this fixture, so nothing ever trades
    points = grid_search(planted_series, GridSpec((4.0,), (2.0,), (900,)), FEE)
    assert points[0].trades == 0
    assert points[0].rtot == 0.0


def test_ranking_matches_sequential_reevaluation(planted_series):
    points = grid_search(planted_series, MINI_SPEC, FEE)
    ok = [p for p in points if p.status == "ok"]
    for point in ok:
        result = run_policy_backtest(
            planted_series,
            point.window,
            Thresholds(point.open_threshold, point.close_threshold),
            FEE,
            gatev_policy,
        )
        steps = len(planted_series) - point.window + 1
        again = rtot(10_000.0, float(result.equity[-1]), steps)
        assert again == point.rtot  # bitwise
        assert len(result.trades) == point.trades
    assert [(-p.rtot, p.window, -p.open_threshold, -p.close_threshold)
            for p in ok] == sorted(
        (-p.rtot, p.window, -p.open_threshold, -p.close_threshold) for p in ok
    )


def test_parallel_equals_sequential(planted_series):
    sequential = grid_search(planted_series, MINI_SPEC, FEE, workers=1)
    parallel = grid_search(planted_series, MINI_SPEC, FEE, workers=3)
    assert sequential == parallel


def test_planted_optimum_recovered(planted_series):
    points = grid_search(planted_series, MINI_SPEC, FEE)
    best = select_best(points)
    assert (best.open_threshold, best.close_threshold, best.window) == (1.9, 0.4, 900)
    assert best.rtot > 0
    runner_up = [p for p in points if p.status == "ok"][1]
    assert best.rtot > 2 * max(runner_up.rtot, 0.0)


def test_wide_thresholds_rank_below_planted_optimum(planted_series):
    points = grid_search(planted_series, MINI_SPEC, FEE)
    by_key = {(p.open_threshold, p.close_threshold, p.window): p.rtot for p in points}
    assert by_key[(1.9, 0.4, 900)] > by_key[(4.0, 2.0, 2000)]


def test_failed_points_reported_not_ranked():
    series = make_series(np.full(1200, 50.0), np.full(1200, 25.0))
    points = grid_search(series, GridSpec((1.9,), (0.4,), (900,)), FEE)
    assert points[0].status == "SingularDesign"
    assert math.isnan(points[0].rtot)
    with pytest.raises(NoSuccessfulPoint):
        select_best(points)


def test_window_longer_than_series_is_failed_point(planted_series):
    points = grid_search(planted_series, GridSpec((1.9,), (0.4,), (900, 99_000)), FEE)
    statuses = {p.window: p.status for p in points}
    assert statuses[900] == "ok"
    assert statuses[99_000] == "WindowTooShort"


def test_default_grid_covers_reference_rows():
    spec = default_grid()
    combos = spec.combos()
    for row in ((4.0, 2.0, 2000), (1.9, 0.4, 900), (1.8, 0.4, 900), (2.5, 0.3, 700)):
        assert row in combos


def test_grid_csv_dump(tmp_path, planted_series):
    points = grid_search(planted_series, MINI_SPEC, FEE)
    path = tmp_path / "grid.csv"
    write_grid_csv(path, points)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "open_threshold,close_threshold,window,rtot,trades,status"
    assert len(lines) == 1 + len(points)
