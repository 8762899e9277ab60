"""Seeded synthetic market generators for fixtures and demos.

Real exchange data is not bundled, so experiments and tests run on
constructed series whose statistical properties (cointegration, known
spread dynamics, analytic threshold crossings) hold by design.
"""

from __future__ import annotations

from decimal import Decimal

import numpy as np

from .market_data import INTERVAL_MS, AlignedPairSeries, Candle

MINUTE_MS = 60_000
DEFAULT_START_MS = 1_696_118_400_000  # 2023-10-01T00:00:00Z


def minute_stamps(n: int, start_ms: int = DEFAULT_START_MS,
                  interval: str = "1m") -> np.ndarray:
    return start_ms + INTERVAL_MS[interval] * np.arange(n, dtype=np.int64)


def random_walk(n: int, rng: np.random.Generator, start: float = 100.0,
                step_std: float = 0.05) -> np.ndarray:
    return start + np.cumsum(rng.normal(0.0, step_std, size=n))


def ou_process(n: int, rng: np.random.Generator, theta: float = 0.05,
               sigma: float = 0.1, x0: float = 0.0) -> np.ndarray:
    """Discrete mean-reverting noise: x' = (1 - theta) x + sigma * eps."""
    x = np.empty(n)
    value = x0
    shocks = rng.normal(0.0, sigma, size=n)
    for t in range(n):
        value = (1.0 - theta) * value + shocks[t]
        x[t] = value
    return x


def make_series(
    prices_i,
    prices_j,
    interval: str = "1m",
    start_ms: int = DEFAULT_START_MS,
    symbol_i: str = "SYNTHA",
    symbol_j: str = "SYNTHB",
) -> AlignedPairSeries:
    prices_i = np.asarray(prices_i, dtype=np.float64)
    prices_j = np.asarray(prices_j, dtype=np.float64)
    return AlignedPairSeries(
        symbol_i, symbol_j, minute_stamps(len(prices_i), start_ms),
        prices_i, prices_j, interval,
    )


def cointegrated_pair(
    n: int,
    seed: int = 0,
    beta0: float = 5.0,
    beta1: float = 2.0,
    theta: float = 0.05,
    noise_sigma: float = 0.08,
    walk_std: float = 0.05,
) -> AlignedPairSeries:
    """Shared random walk plus a mean-reverting offset: cointegrated by design."""
    rng = np.random.default_rng(seed)
    p_j = random_walk(n, rng, start=100.0, step_std=walk_std)
    spread = ou_process(n, rng, theta=theta, sigma=noise_sigma)
    p_i = beta0 + beta1 * p_j + spread
    return make_series(p_i, p_j)


def independent_walks(n: int, seed: int = 0) -> AlignedPairSeries:
    """Two unrelated random walks: not cointegrated."""
    rng = np.random.default_rng(seed)
    p_i = random_walk(n, rng, start=120.0, step_std=0.05)
    p_j = random_walk(n, rng, start=100.0, step_std=0.05)
    return make_series(p_i, p_j)


def sinusoid_pair(
    periods: int = 12,
    period: int = 64,
    base: float = 100.0,
    amplitude: float = 1.0,
    beta0: float = 10.0,
    beta1: float = 2.0,
) -> AlignedPairSeries:
    """Pair whose spread is an exact sinusoid the rolling fit recovers.

    With the hedge price a pure cosine of the same period and the window
    equal to one full period, sine and cosine are orthogonal over every
    window, so the fitted spread equals the sine term exactly and its
    z-score is sqrt(2) * sin(2 pi t / period).
    """
    n = periods * period
    t = np.arange(n)
    phase = 2.0 * np.pi * t / period
    p_j = base + np.cos(phase)
    p_i = beta0 + beta1 * p_j + amplitude * np.sin(phase)
    return make_series(p_i, p_j)


def pulse_pair(
    n: int = 4000,
    seed: int = 7,
    pulse_start: int = 950,
    pulse_every: int = 150,
    pulse_count: int = 7,
    pulse_rise: int = 20,
    pulse_fall: int = 40,
    amplitude: float = 0.35,
    noise_half_width: float = 0.3,
    walk_std: float = 0.02,
    beta0: float = 10.0,
    beta1: float = 2.0,
) -> AlignedPairSeries:
    """Pair whose spread is bounded noise plus a burst of full-reverting spikes.

    Uniform noise hard-caps the z range, so moderate open thresholds trade
    every spike while very wide ones never trigger; the spikes sit early
    enough that long windows spend them warming up. Used to plant a known
    grid-search optimum.
    """
    rng = np.random.default_rng(seed)
    p_j = random_walk(n, rng, start=100.0, step_std=walk_std)
    spread = rng.uniform(-noise_half_width, noise_half_width, size=n)
    shape = np.concatenate(
        [np.linspace(0.0, 1.0, pulse_rise, endpoint=False),
         np.linspace(1.0, 0.0, pulse_fall)]
    )
    sign = 1.0
    for k in range(pulse_count):
        start = pulse_start + k * pulse_every
        if start + len(shape) >= n:
            break
        spread[start : start + len(shape)] += sign * amplitude * shape
        sign = -sign
    p_i = beta0 + beta1 * p_j + spread
    return make_series(p_i, p_j)


def candles_from_prices(
    prices,
    interval: str = "1m",
    start_ms: int = DEFAULT_START_MS,
    volume: float = 10.0,
    volumes=None,
) -> list[Candle]:
    """Flat OHLC candles (open = high = low = close) for pipeline fixtures."""
    stamps = minute_stamps(len(prices), start_ms, interval)
    if volumes is None:
        volumes = np.full(len(prices), volume)
    out = []
    quantum = Decimal("0.00000001")
    for ts, price, vol in zip(stamps, prices, volumes):
        p = Decimal(repr(float(price))).quantize(quantum)
        out.append(
            Candle(int(ts), p, p, p, p, Decimal(repr(float(vol))).quantize(quantum),
                   interval)
        )
    return out
