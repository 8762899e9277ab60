"""Rolling-window spread regression, z-score normalization and zones.

Each step refits the hedge regression over the trailing window, standardizes
the newest residual by the window's spread moments and classifies the
z-score into one of five trading zones. A vectorized batch path computes the
same observations for a whole series at once; it must agree with the
step-by-step engine to 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import DegenerateSpread, NotWarm, SingularDesign, WindowTooShort

MIN_WINDOW = 30


@dataclass(frozen=True)
class Thresholds:
    """Open/close trigger levels in z-score units, open strictly wider."""

    open_threshold: float
    close_threshold: float

    def __post_init__(self):
        if not self.open_threshold > self.close_threshold > 0:
            raise ValueError(
                f"need open > close > 0, got ({self.open_threshold}, "
                f"{self.close_threshold})"
            )


class Zone(IntEnum):
    """Five-way partition of z-space, ordered from the short side down."""

    SHORT = 0
    NEUTRAL_SHORT = 1
    CLOSE = 2
    NEUTRAL_LONG = 3
    LONG = 4


@dataclass(frozen=True)
class SpreadModel:
    """Hedge regression and residual moments over one trailing window."""

    beta0: float
    beta1: float
    window: int
    spread_mean: float
    spread_std: float
    latest_spread: float


@dataclass(frozen=True)
class SpreadObservation:
    z: float
    zone: Zone
    timestamp: int


def fit_spread(window_prices_i, window_prices_j) -> SpreadModel:
    """Fit p_i = beta0 + beta1 * p_j over one window of W aligned samples.

    Spread mean and standard deviation are population moments of the W
    residuals; ``latest_spread`` is the residual at the window's last sample.
    """
    pi = np.asarray(window_prices_i, dtype=np.float64)
    pj = np.asarray(window_prices_j, dtype=np.float64)
    if len(pi) != len(pj):
        raise WindowTooShort("window legs differ in length")
    if len(pj) > 0 and np.ptp(pj) == 0:
        raise SingularDesign("p_j is constant over the window")
    if len(pi) < MIN_WINDOW:
        raise WindowTooShort(f"window must hold >= {MIN_WINDOW} samples, got {len(pi)}")

    mj = np.mean(pj)
    mi = np.mean(pi)
    jc = pj - mj
    ic = pi - mi
    var_j = np.mean(jc * jc)
    if var_j <= 0:
        raise SingularDesign("p_j has zero variance over the window")
    beta1 = np.mean(jc * ic) / var_j
    beta0 = mi - beta1 * mj
    resid = ic - beta1 * jc
    s_mean = np.mean(resid)
    s_std = np.sqrt(np.mean((resid - s_mean) ** 2))
    return SpreadModel(
        float(beta0),
        float(beta1),
        len(pi),
        float(s_mean),
        float(s_std),
        float(resid[-1]),
    )


def zscore(model: SpreadModel, s: float) -> float:
    """Standardize a spread value by the model's window moments."""
    if model.spread_std <= 1e-12:
        raise DegenerateSpread("spread standard deviation is (near) zero")
    return (s - model.spread_mean) / model.spread_std


def classify_zone(z: float, t: Thresholds) -> Zone:
    """Map a z-score to its zone.

    Values exactly at a threshold go to the more extreme zone on the open
    side and to the neutral zone on the close side, so the partition is
    total and deterministic.
    """
    ot, ct = t.open_threshold, t.close_threshold
    if z >= ot:
        return Zone.SHORT
    if z >= ct:
        return Zone.NEUTRAL_SHORT
    if z > -ct:
        return Zone.CLOSE
    if z > -ot:
        return Zone.NEUTRAL_LONG
    return Zone.LONG


class SpreadEngine:
    """Single-owner streaming state: push one aligned sample per interval.

    ``push`` returns None while warming up (fewer than ``window`` samples
    seen) and a SpreadObservation afterwards, refitting the regression over
    the trailing window each step.
    """

    def __init__(self, window: int, thresholds: Thresholds):
        if window < MIN_WINDOW:
            raise WindowTooShort(f"window must be >= {MIN_WINDOW}")
        self.window = window
        self.thresholds = thresholds
        self._prices_i: list[float] = []
        self._prices_j: list[float] = []
        self._model: SpreadModel | None = None
        self._observation: SpreadObservation | None = None

    @property
    def warm(self) -> bool:
        return len(self._prices_i) >= self.window

    def push(self, timestamp: int, price_i: float, price_j: float):
        self._prices_i.append(float(price_i))
        self._prices_j.append(float(price_j))
        if not self.warm:
            return None
        wi = np.array(self._prices_i[-self.window :])
        wj = np.array(self._prices_j[-self.window :])
        model = fit_spread(wi, wj)
        z = zscore(model, model.latest_spread)
        self._model = model
        self._observation = SpreadObservation(
            z, classify_zone(z, self.thresholds), timestamp
        )
        return self._observation

    def current(self) -> SpreadObservation:
        if self._observation is None:
            raise NotWarm("engine has not completed warm-up")
        return self._observation

    def model(self) -> SpreadModel:
        if self._model is None:
            raise NotWarm("engine has not completed warm-up")
        return self._model


def rolling_spread(
    prices_i: np.ndarray,
    prices_j: np.ndarray,
    window: int,
    chunk: int = 1024,
):
    """Batch equivalent of the streaming engine over a full series.

    Returns ``(spread, z)`` arrays for indices ``window-1 .. n-1``. Windows
    are evaluated independently (no running sums), matching the per-step
    refit to within float reduction noise.
    """
    pi = np.asarray(prices_i, dtype=np.float64)
    pj = np.asarray(prices_j, dtype=np.float64)
    n = len(pi)
    if n < window:
        raise WindowTooShort(f"series of {n} samples shorter than window {window}")
    if window < MIN_WINDOW:
        raise WindowTooShort(f"window must be >= {MIN_WINDOW}")
    m = n - window + 1
    spread_out = np.empty(m)
    z_out = np.empty(m)
    wi_all = np.lib.stride_tricks.sliding_window_view(pi, window)
    wj_all = np.lib.stride_tricks.sliding_window_view(pj, window)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        wi = wi_all[lo:hi]
        wj = wj_all[lo:hi]
        mj = wj.mean(axis=1, keepdims=True)
        mi = wi.mean(axis=1, keepdims=True)
        jc = wj - mj
        ic = wi - mi
        var_j = np.mean(jc * jc, axis=1)
        if np.any(var_j <= 0):
            raise SingularDesign("p_j is constant over some window")
        beta1 = np.mean(jc * ic, axis=1) / var_j
        resid = ic - beta1[:, None] * jc
        s_mean = resid.mean(axis=1)
        s_std = np.sqrt(np.mean((resid - s_mean[:, None]) ** 2, axis=1))
        if np.any(s_std <= 1e-12):
            raise DegenerateSpread("spread variance vanished in some window")
        latest = resid[:, -1]
        spread_out[lo:hi] = latest
        z_out[lo:hi] = (latest - s_mean) / s_std
    return spread_out, z_out


def zones_for(z: np.ndarray, thresholds: Thresholds) -> np.ndarray:
    """Vectorized classify_zone over an array of z-scores."""
    ot, ct = thresholds.open_threshold, thresholds.close_threshold
    out = np.full(len(z), int(Zone.CLOSE), dtype=np.int64)
    out[z >= ct] = int(Zone.NEUTRAL_SHORT)
    out[z >= ot] = int(Zone.SHORT)
    out[z <= -ct] = int(Zone.NEUTRAL_LONG)
    out[z <= -ot] = int(Zone.LONG)
    return out


def write_spread_trace(
    path: str | Path,
    timestamps: np.ndarray,
    spread: np.ndarray,
    z: np.ndarray,
    zones: np.ndarray,
) -> None:
    """Debug trace for plotting spread/zone charts."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("timestamp,spread,z,zone\n")
        for ts, s, zz, zn in zip(timestamps, spread, z, zones):
            fh.write(f"{ts},{s!r},{zz!r},{Zone(int(zn)).name}\n")
