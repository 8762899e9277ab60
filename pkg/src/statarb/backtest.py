"""Close-price backtest loop shared by the grid tuner and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ledger import FeeModel, Portfolio, TradeRecord
from .market_data import AlignedPairSeries
from .policies import Observation
from .spread_engine import Thresholds, Zone, rolling_spread, zones_for


@dataclass(frozen=True)
class BacktestResult:
    timestamps: np.ndarray        # decision timestamps (post warm-up)
    equity: np.ndarray            # portfolio value after each decision
    positions: np.ndarray         # position fraction after each decision
    z: np.ndarray
    zones: np.ndarray
    trades: list[TradeRecord]
    portfolio: Portfolio

    @property
    def steps(self) -> int:
        return len(self.timestamps)


def run_policy_backtest(
    series: AlignedPairSeries,
    window: int,
    thresholds: Thresholds,
    fee: FeeModel,
    policy,
    initial_cash: float = 10_000.0,
    z: np.ndarray | None = None,
) -> BacktestResult:
    """Drive a policy over a series: one observe/decide/execute per interval.

    The first decision happens once the spread window is warm; fills occur
    at the decision interval's close price. A precomputed z series for the
    same window may be passed to skip the rolling regression.
    """
    if z is None:
        _, z = rolling_spread(series.prices_i, series.prices_j, window)
    zones = zones_for(z, thresholds)
    start = window - 1
    ts = series.timestamps[start:]
    pi = series.prices_i[start:]
    pj = series.prices_j[start:]

    portfolio = Portfolio(initial_cash, fee)
    n = len(ts)
    equity = np.empty(n)
    positions = np.empty(n)
    for k in range(n):
        obs = Observation(
            position=portfolio.position_fraction(pi[k], pj[k]),
            z=float(z[k]),
            zone=Zone(int(zones[k])),
        )
        target = policy(obs).target
        portfolio.execute(target, float(pi[k]), float(pj[k]), int(ts[k]))
        equity[k] = portfolio.mark_to_market(pi[k], pj[k])
        positions[k] = portfolio.position_fraction(pi[k], pj[k])
    return BacktestResult(ts, equity, positions, z, zones, portfolio.trades, portfolio)
