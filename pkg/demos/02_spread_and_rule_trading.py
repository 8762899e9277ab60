"""Rolling spread, zones, the rule-based strategy and threshold tuning.

Shows the z-score signal the strategies observe, runs the classic
full-allocation rule on it, and tunes (open, close, window) by grid search.
"""

import numpy as np

from statarb.backtest import run_policy_backtest
from statarb.grid_tuner import GridSpec, grid_search, select_best
from statarb.ledger import FeeModel
from statarb.metrics import EquityCurve, MetricsConfig, compute_report, report_text
from statarb.policies import gatev_policy
from statarb.spread_engine import SpreadEngine, Thresholds, Zone, rolling_spread, zones_for
from statarb.synthetic import cointegrated_pair

series = cointegrated_pair(6000, seed=11, theta=0.02, noise_sigma=0.05, walk_std=0.05)
WINDOW = 300
THRESHOLDS = Thresholds(1.8, 0.4)

# --- the signal: streaming engine vs batch computation ----------------------------

engine = SpreadEngine(WINDOW, THRESHOLDS)
first = None
for t in range(WINDOW):
    first = engine.push(int(series.timestamps[t]), series.prices_i[t],
                        series.prices_j[t])
print(f"first observation after warm-up: z = {first.z:+.3f}, zone = {first.zone.name}")

spread, z = rolling_spread(series.prices_i, series.prices_j, WINDOW)
zones = zones_for(z, THRESHOLDS)
counts = {zone.name: int(np.sum(zones == int(zone))) for zone in Zone}
print("zone occupancy over the whole series:", counts)

# --- the rule strategy --------------------------------------------------------------

fee = FeeModel(0.0002)
result = run_policy_backtest(series, WINDOW, THRESHOLDS, fee, gatev_policy, 10_000.0)
curve = EquityCurve(result.timestamps, result.equity, 525_600.0)
report = compute_report(curve, result.trades, result.positions, MetricsConfig())
print(f"\nrule strategy at OT={THRESHOLDS.open_threshold}, "
      f"CT={THRESHOLDS.close_threshold}, W={WINDOW}, fee={fee.rate:.2%}:")
print(report_text(report))

# --- grid search for better parameters ----------------------------------------------

spec = GridSpec(
    open_thresholds=(1.5, 1.8, 2.1, 2.5),
    close_thresholds=(0.3, 0.4, 0.5),
    windows=(200, 300, 500),
)
points = grid_search(series, spec, fee)
print("top five grid points (rtot % per interval):")
for p in points[:5]:
    print(f"  OT={p.open_threshold:<4} CT={p.close_threshold:<4} W={p.window:<4} "
          f"rtot={p.rtot:+.6f}  trades={p.trades}")
best = select_best(points)
print(f"\nbest point: OT={best.open_threshold} CT={best.close_threshold} "
      f"W={best.window} -> handed to the RL environments")
