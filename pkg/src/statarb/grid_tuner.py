"""Exhaustive threshold/window search maximizing total compound return.

Every valid (open threshold, close threshold, window) combination is
backtested with the rule-based policy on the formation series; points are
ranked by per-interval total compound return. Evaluation is embarrassingly
parallel across windows and must rank identically however it is scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path


from .backtest import run_policy_backtest
from .errors import EmptyGrid, NonPositiveStart, NoSuccessfulPoint, StatArbError
from .ledger import FeeModel
from .market_data import AlignedPairSeries
from .policies import gatev_policy
from .spread_engine import Thresholds, rolling_spread


@dataclass(frozen=True)
class GridSpec:
    open_thresholds: tuple[float, ...]
    close_thresholds: tuple[float, ...]
    windows: tuple[int, ...]

    def __post_init__(self):
        for name in ("open_thresholds", "close_thresholds", "windows"):
            values = getattr(self, name)
            if list(values) != sorted(values):
                raise ValueError(f"{name} must be ascending")

    def combos(self) -> list[tuple[float, float, int]]:
        """Valid combinations; open <= close pairs are skipped outright."""
        return [
            (ot, ct, w)
            for w in self.windows
            for ot in self.open_thresholds
            for ct in self.close_thresholds
            if ot > ct
        ]


def default_grid() -> GridSpec:
    """Default search pool spanning the regimes crypto pairs usually show."""
    return GridSpec(
        open_thresholds=tuple(round(1.5 + 0.1 * k, 1) for k in range(26)),
        close_thresholds=(0.2, 0.3, 0.4, 0.5, 1.0, 2.0),
        windows=(500, 700, 800, 900, 1000, 2000),
    )


@dataclass(frozen=True)
class GridPoint:
    open_threshold: float
    close_threshold: float
    window: int
    rtot: float
    trades: int
    status: str = "ok"


def rtot(v_start: float, v_end: float, t: float) -> float:
    """Per-interval total compound return in percent."""
    if v_start <= 0:
        raise NonPositiveStart("starting value must be positive")
    if t <= 0:
        raise ValueError("period count must be positive")
    return ((v_end / v_start) ** (1.0 / t) - 1.0) * 100.0


def _evaluate_window_group(args) -> list[GridPoint]:
    """All (OT, CT) points for one window; one spread fit, many backtests."""
    (timestamps, prices_i, prices_j, interval, window, pairs, fee_rate,
     initial_cash) = args
    series = AlignedPairSeries("i", "j", timestamps, prices_i, prices_j, interval)
    fee = FeeModel(fee_rate)
    points: list[GridPoint] = []
    try:
        _, z = rolling_spread(prices_i, prices_j, window)
    except StatArbError as exc:
        return [
            GridPoint(ot, ct, window, math.nan, 0, type(exc).__name__)
            for ot, ct in pairs
        ]
    steps = len(prices_i) - window + 1
    for ot, ct in pairs:
        try:
            result = run_policy_backtest(
                series, window, Thresholds(ot, ct), fee, gatev_policy,
                initial_cash, z=z,
            )
            points.append(
                GridPoint(
                    ot, ct, window,
                    rtot(initial_cash, float(result.equity[-1]), steps),
                    len(result.trades),
                )
            )
        except StatArbError as exc:
            points.append(GridPoint(ot, ct, window, math.nan, 0, type(exc).__name__))
    return points


def _rank_key(p: GridPoint):
    # highest rtot first; ties prefer smaller window, then wider thresholds
    return (-p.rtot, p.window, -p.open_threshold, -p.close_threshold)


def grid_search(
    series: AlignedPairSeries,
    spec: GridSpec,
    fee: FeeModel,
    initial_cash: float = 10_000.0,
    workers: int = 1,
) -> list[GridPoint]:
    """Backtest every valid combination and rank by rtot.

    Successful points come first in ranking order; failed points follow in
    parameter order with their error class in ``status``. The ranking is
    identical for any worker count.
    """
    combos = spec.combos()
    if not combos:
        raise EmptyGrid("no valid (open, close, window) combination")
    by_window: dict[int, list[tuple[float, float]]] = {}
    for ot, ct, w in combos:
        by_window.setdefault(w, []).append((ot, ct))
    jobs = [
        (series.timestamps, series.prices_i, series.prices_j, series.interval,
         w, pairs, fee.rate, initial_cash)
        for w, pairs in sorted(by_window.items())
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            groups = list(pool.map(_evaluate_window_group, jobs))
    else:
        groups = [_evaluate_window_group(job) for job in jobs]
    points = [p for group in groups for p in group]
    ok = sorted((p for p in points if p.status == "ok"), key=_rank_key)
    failed = [p for p in points if p.status != "ok"]
    return ok + failed


def select_best(points: list[GridPoint]) -> GridPoint:
    """Head of the ranking; the parameters handed to the RL environments."""
    for p in points:
        if p.status == "ok":
            return p
    raise NoSuccessfulPoint("every grid point failed")


def write_grid_csv(path: str | Path, points: list[GridPoint]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("open_threshold,close_threshold,window,rtot,trades,status\n")
        for p in points:
            fh.write(
                f"{p.open_threshold!r},{p.close_threshold!r},{p.window},"
                f"{p.rtot!r},{p.trades},{p.status}\n"
            )
