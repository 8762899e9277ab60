"""Pair formation walkthrough: correlation + cointegration scoring.

Builds three synthetic assets (two of them genuinely cointegrated), scores
every pair over sliding windows and ranks them the way the research
pipeline selects its trading pair.
"""

import numpy as np

from statarb.econometrics import (
    adf_test,
    engle_granger,
    pearson,
    rank_pairs,
    ssd,
    windowed_pair_scores,
)
from statarb.market_data import align_pair
from statarb.synthetic import candles_from_prices, cointegrated_pair, random_walk

# --- build a tiny universe ------------------------------------------------------

N = 3000
pair = cointegrated_pair(N, seed=11, theta=0.05, noise_sigma=0.08, walk_std=0.05)
loner = random_walk(N, np.random.default_rng(99), start=70.0, step_std=0.05)

prices = {
    "COINA": pair.prices_i,   # = 5 + 2 * COINB + mean-reverting noise
    "COINB": pair.prices_j,
    "DRIFT": loner,           # unrelated walk
}
candles = {sym: candles_from_prices(p) for sym, p in prices.items()}

print("universe:", ", ".join(f"{s} ({len(c)} 1m candles)" for s, c in candles.items()))

# --- single-pair statistics ------------------------------------------------------

a, b = prices["COINA"], prices["COINB"]
print(f"\nCOINA~COINB pearson: {pearson(a, b):.4f}")
print(f"COINA~COINB ssd (normalized prices): "
      f"{ssd(a / a[0], b / b[0]):.4f}")

eg = engle_granger(a, b)
print(f"Engle-Granger: t = {eg.adf.t_stat:.2f}, cointegrated = {eg.cointegrated}")
print(f"hedge fit: alpha = {eg.fit.alpha:.3f}, beta = {eg.fit.beta:.3f}")

unit_root = adf_test(a)  # raw prices: a random walk, not stationary
print(f"ADF on raw COINA prices: t = {unit_root.t_stat:.2f}, "
      f"stationary = {unit_root.stationary}")

# --- windowed scoring over every pair, exactly like the pipeline ------------------

scores = {}
symbols = sorted(candles)
for i, sym_a in enumerate(symbols):
    for sym_b in symbols[i + 1 :]:
        series = align_pair(candles[sym_a], candles[sym_b],
                            symbol_i=sym_a, symbol_j=sym_b)
        scores[(sym_a, sym_b)] = windowed_pair_scores(series, window=600, step=600)

print("\npair                coint    corr     windows")
for key in rank_pairs(scores):
    s = scores[key]
    print(f"{key[0]}-{key[1]:<12} {s.coint_score:>6.4f}  {s.corr_score:>7.4f}  "
          f"{s.windows_evaluated:>4}")

best = rank_pairs(scores)[0]
print(f"\nselected pair: {best[0]}-{best[1]}")
