"""Evaluation metrics: profitability, activity and risk indicators.

All statistics are computed from an equity curve (portfolio value per
interval) and the trade blotter. Returns are simple per-interval returns;
moments use population normalization and kurtosis is reported raw
(normal = 3).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateSpan, InsufficientData, NonPositiveStart, ZeroVolatility
from .ledger import TradeRecord

MS_PER_YEAR = 365.25 * 86_400_000.0

_INTERVALS_PER_YEAR = {"1m": 525_600.0, "3m": 175_200.0, "5m": 105_120.0}


def intervals_per_year(interval: str) -> float:
    return _INTERVALS_PER_YEAR[interval]


@dataclass(frozen=True)
class EquityCurve:
    timestamps: np.ndarray
    values: np.ndarray
    interval_per_year: float

    def __post_init__(self):
        if len(self.timestamps) != len(self.values):
            raise ValueError("timestamps and values must share a length")
        if self.interval_per_year <= 0:
            raise ValueError("interval_per_year must be positive")

    def returns(self) -> np.ndarray:
        v = np.asarray(self.values, dtype=np.float64)
        return np.diff(v) / v[:-1]


@dataclass(frozen=True)
class MetricsConfig:
    risk_free_rate: float = 0.055

    def __post_init__(self):
        if self.risk_free_rate < 0:
            raise ValueError("risk-free rate must be nonnegative")


@dataclass(frozen=True)
class TradeStats:
    total_actions: int
    won_actions: int
    lost_actions: int
    win_loss_ratio: float
    max_win: float
    max_loss: float
    avg_win: float
    avg_loss: float


@dataclass(frozen=True)
class Moments:
    volatility_ann: float
    skew: float
    kurtosis: float


@dataclass(frozen=True)
class MetricsReport:
    cumulative_return: float
    cagr: float
    sharpe: float
    total_actions: int
    won_actions: int
    lost_actions: int
    win_loss_ratio: float
    max_win: float
    max_loss: float
    avg_win: float
    avg_loss: float
    time_in_market: float
    volatility_ann: float
    skew: float
    kurtosis: float
    mean_return: float        # R_p, per interval
    excess_return_std: float  # sigma_p, per interval


def cumulative_return(curve: EquityCurve) -> float:
    """Total percentage gain over the whole curve."""
    v = curve.values
    if v[0] <= 0:
        raise NonPositiveStart("starting value must be positive")
    return (float(v[-1]) / float(v[0]) - 1.0) * 100.0


def cagr(curve: EquityCurve) -> float:
    """Compound annual growth rate (percent), calendar 365.25-day years."""
    v = curve.values
    if v[0] <= 0 or v[-1] <= 0:
        raise NonPositiveStart("curve endpoints must be positive")
    years = (float(curve.timestamps[-1]) - float(curve.timestamps[0])) / MS_PER_YEAR
    if years <= 0:
        raise DegenerateSpan("curve must span a positive amount of time")
    exponent = math.log(float(v[-1]) / float(v[0])) / years
    if exponent > 700.0:  # annualizing a short hot streak overflows a double
        return math.inf
    return (math.exp(exponent) - 1.0) * 100.0


def sharpe(curve: EquityCurve, cfg: MetricsConfig = MetricsConfig()) -> float:
    """Annualized Sharpe ratio of per-interval excess returns.

    The annual risk-free rate is de-annualized geometrically to the
    interval; the ratio is scaled back by sqrt(intervals per year).
    """
    r = curve.returns()
    if len(r) < 2:
        raise InsufficientData("need at least 2 return observations")
    rf = (1.0 + cfg.risk_free_rate) ** (1.0 / curve.interval_per_year) - 1.0
    excess = r - rf
    mean = float(np.mean(excess))
    std = float(np.sqrt(np.mean((excess - mean) ** 2)))
    # returns reconstructed from a value curve carry ~1e-16 rounding dust;
    # below this floor the excess return is indistinguishable from zero
    if std <= 1e-15:
        if abs(mean) <= 1e-15:
            return 0.0
        raise ZeroVolatility("constant nonzero excess returns")
    return mean / std * math.sqrt(curve.interval_per_year)


def trade_stats(blotter: list[TradeRecord]) -> TradeStats:
    """Win/loss activity indicators; zero-P&L trades count only in the total."""
    pnls = [t.realized_pnl for t in blotter]
    wins = [p for p in pnls if p > 0]
    losses = [p for p in pnls if p < 0]
    ratio = len(wins) / len(losses) if losses else math.inf
    return TradeStats(
        total_actions=len(pnls),
        won_actions=len(wins),
        lost_actions=len(losses),
        win_loss_ratio=ratio,
        max_win=max(wins) if wins else 0.0,
        max_loss=min(losses) if losses else 0.0,
        avg_win=float(np.mean(wins)) if wins else 0.0,
        avg_loss=float(np.mean(losses)) if losses else 0.0,
    )


def time_in_market(position_fractions) -> float:
    """Share of intervals with any open position, in percent."""
    p = np.asarray(position_fractions, dtype=np.float64)
    if len(p) == 0:
        raise InsufficientData("no position observations")
    return float(np.mean(np.abs(p) > 1e-9)) * 100.0


def return_moments(returns, interval_per_year: float) -> Moments:
    """Annualized volatility plus standardized third/fourth moments."""
    r = np.asarray(returns, dtype=np.float64)
    if len(r) == 0:
        raise InsufficientData("no return observations")
    mean = np.mean(r)
    centered = r - mean
    m2 = float(np.mean(centered**2))
    vol_ann = math.sqrt(m2) * math.sqrt(interval_per_year) * 100.0
    if m2 == 0.0:
        return Moments(0.0, 0.0, 0.0)
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    return Moments(vol_ann, m3 / m2**1.5, m4 / m2**2)


def compute_report(
    curve: EquityCurve,
    blotter: list[TradeRecord],
    position_fractions,
    cfg: MetricsConfig = MetricsConfig(),
) -> MetricsReport:
    """Bundle every indicator; degenerate Sharpe inputs report as NaN."""
    stats = trade_stats(blotter)
    r = curve.returns()
    moments = return_moments(r, curve.interval_per_year) if len(r) else Moments(0, 0, 0)
    try:
        sharpe_value = sharpe(curve, cfg)
    except (ZeroVolatility, InsufficientData):
        sharpe_value = math.nan
    rf = (1.0 + cfg.risk_free_rate) ** (1.0 / curve.interval_per_year) - 1.0
    excess = r - rf if len(r) else np.array([])
    sigma_p = (
        float(np.sqrt(np.mean((excess - np.mean(excess)) ** 2))) if len(r) else 0.0
    )
    return MetricsReport(
        cumulative_return=cumulative_return(curve),
        cagr=cagr(curve),
        sharpe=sharpe_value,
        total_actions=stats.total_actions,
        won_actions=stats.won_actions,
        lost_actions=stats.lost_actions,
        win_loss_ratio=stats.win_loss_ratio,
        max_win=stats.max_win,
        max_loss=stats.max_loss,
        avg_win=stats.avg_win,
        avg_loss=stats.avg_loss,
        time_in_market=time_in_market(position_fractions),
        volatility_ann=moments.volatility_ann,
        skew=moments.skew,
        kurtosis=moments.kurtosis,
        mean_return=float(np.mean(r)) if len(r) else 0.0,
        excess_return_std=sigma_p,
    )


_GROUPS = (
    ("Profitability", ("cumulative_return", "cagr", "sharpe")),
    (
        "Activity",
        (
            "total_actions",
            "won_actions",
            "lost_actions",
            "win_loss_ratio",
            "max_win",
            "max_loss",
            "avg_win",
            "avg_loss",
            "time_in_market",
        ),
    ),
    ("Risk", ("volatility_ann", "skew", "kurtosis")),
)


def report_json(report: MetricsReport) -> str:
    payload = asdict(report)
    for key, value in payload.items():
        if isinstance(value, float) and not math.isfinite(value):
            payload[key] = repr(value)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def report_text(report: MetricsReport) -> str:
    """Aligned three-group indicator table."""
    payload = asdict(report)
    lines = []
    width = max(len(name) for _, names in _GROUPS for name in names)
    for group, names in _GROUPS:
        lines.append(f"-- {group} --")
        for name in names:
            value = payload[name]
            rendered = f"{value:.6g}" if isinstance(value, float) else str(value)
            lines.append(f"{name.ljust(width)}  {rendered}")
    return "\n".join(lines) + "\n"


def write_report(path_base: str | Path, report: MetricsReport) -> None:
    with open(f"{path_base}.json", "w", encoding="utf-8") as fh:
        fh.write(report_json(report))
    with open(f"{path_base}.txt", "w", encoding="utf-8") as fh:
        fh.write(report_text(report))


def drawdown_series(values) -> np.ndarray:
    """Percent distance below the running equity peak."""
    v = np.asarray(values, dtype=np.float64)
    peaks = np.maximum.accumulate(v)
    return (v - peaks) / peaks * 100.0


def write_equity_csv(path: str | Path, curve: EquityCurve) -> None:
    dd = drawdown_series(curve.values)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("timestamp,value,drawdown_pct\n")
        for ts, v, d in zip(curve.timestamps, curve.values, dd):
            fh.write(f"{int(ts)},{float(v)!r},{float(d)!r}\n")
