"""Exchange candle ingestion, validation, resampling and pair alignment.

Raw kline CSVs are parsed into exact-decimal ``Candle`` records; statistics
downstream always work on float64 views produced by :func:`align_pair`.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .errors import (
    BadFactor,
    DuplicateTimestamp,
    EmptyIntersection,
    InvariantViolation,
    LengthMismatch,
    MalformedRow,
    UnsortedInput,
)

INTERVAL_MS = {"1m": 60_000, "3m": 180_000, "5m": 300_000}

# Exchange feeds quote 8 fractional digits; quantities are carried exactly.
_QUANTUM = Decimal("0.00000001")


@dataclass(frozen=True)
class Candle:
    """One OHLCV bar keyed by its open time (epoch milliseconds, UTC)."""

    open_time: int
    open: Decimal
    high: Decimal
    low: Decimal
    close: Decimal
    volume: Decimal
    interval: str = "1m"


@dataclass(frozen=True)
class AlignedPairSeries:
    """Inner-joined close-price series of two instruments on one clock."""

    symbol_i: str
    symbol_j: str
    timestamps: np.ndarray  # int64, strictly increasing epoch ms
    prices_i: np.ndarray    # float64 close prices
    prices_j: np.ndarray
    interval: str = "1m"

    def __post_init__(self):
        if not (len(self.timestamps) == len(self.prices_i) == len(self.prices_j)):
            raise LengthMismatch("timestamps and price sequences must share a length")
        if len(self.timestamps) > 1 and not np.all(np.diff(self.timestamps) > 0):
            raise UnsortedInput("aligned timestamps must be strictly increasing")

    def __len__(self) -> int:
        return len(self.timestamps)

    def slice_span(self, start_ms: int, end_ms: int) -> "AlignedPairSeries":
        """Return the sub-series with start_ms <= timestamp < end_ms."""
        mask = (self.timestamps >= start_ms) & (self.timestamps < end_ms)
        return AlignedPairSeries(
            self.symbol_i,
            self.symbol_j,
            self.timestamps[mask],
            self.prices_i[mask],
            self.prices_j[mask],
            self.interval,
        )


def _parse_decimal(token: str, line_no: int, field: str) -> Decimal:
    try:
        value = Decimal(token)
    except InvalidOperation:
        raise MalformedRow(line_no, f"bad {field} value {token!r}") from None
    return value.quantize(_QUANTUM)


def _validate_candle(c: Candle, line_no: int) -> None:
    if c.open_time % INTERVAL_MS[c.interval] != 0:
        raise InvariantViolation(
            line_no, f"open_time {c.open_time} not aligned to {c.interval} boundary"
        )
    if min(c.open, c.high, c.low, c.close) <= 0:
        raise InvariantViolation(line_no, "non-positive price")
    if c.low > min(c.open, c.close) or c.high < max(c.open, c.close):
        raise InvariantViolation(line_no, "OHLC ordering violated")
    if c.volume < 0:
        raise InvariantViolation(line_no, "negative volume")


def parse_klines(path: str | Path, interval: str = "1m") -> list[Candle]:
    """Parse a headerless kline CSV into validated, time-sorted candles.

    Expected columns are ``open_time_ms, open, high, low, close, volume``;
    any further columns are ignored. Rows sharing an ``open_time`` are
    rejected rather than deduplicated.
    """
    if interval not in INTERVAL_MS:
        raise BadFactor(f"unsupported interval {interval!r}")
    candles: list[Candle] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) < 6:
                raise MalformedRow(line_no, f"expected >= 6 fields, got {len(fields)}")
            try:
                open_time = int(fields[0])
            except ValueError:
                raise MalformedRow(line_no, f"bad open_time {fields[0]!r}") from None
            c = Candle(
                open_time=open_time,
                open=_parse_decimal(fields[1], line_no, "open"),
                high=_parse_decimal(fields[2], line_no, "high"),
                low=_parse_decimal(fields[3], line_no, "low"),
                close=_parse_decimal(fields[4], line_no, "close"),
                volume=_parse_decimal(fields[5], line_no, "volume"),
                interval=interval,
            )
            _validate_candle(c, line_no)
            candles.append(c)
    candles.sort(key=lambda c: c.open_time)
    for prev, cur in zip(candles, candles[1:]):
        if prev.open_time == cur.open_time:
            raise DuplicateTimestamp(f"duplicate open_time {cur.open_time}")
    return candles


def write_klines(candles: list[Candle], path: str | Path) -> None:
    """Write candles back to the same headerless CSV layout (round-trippable)."""
    with open(path, "w", encoding="utf-8") as fh:
        for c in candles:
            fh.write(
                f"{c.open_time},{c.open},{c.high},{c.low},{c.close},{c.volume}\n"
            )


def resample(candles: list[Candle], factor: int) -> list[Candle]:
    """Aggregate 1m candles into factor-minute bars on aligned boundaries.

    Only groups containing all ``factor`` constituent minutes are emitted;
    partial groups (trailing or gapped) are dropped.
    """
    if factor not in (3, 5):
        raise BadFactor(f"resample factor must be 3 or 5, got {factor}")
    if any(c.interval != "1m" for c in candles):
        raise BadFactor("resample input must be at 1m interval")
    for prev, cur in zip(candles, candles[1:]):
        if cur.open_time <= prev.open_time:
            raise UnsortedInput("candles must be sorted by open_time")

    span = factor * INTERVAL_MS["1m"]
    out: list[Candle] = []
    group: list[Candle] = []

    def flush():
        if len(group) == factor:
            out.append(
                Candle(
                    open_time=group[0].open_time - group[0].open_time % span,
                    open=group[0].open,
                    high=max(c.high for c in group),
                    low=min(c.low for c in group),
                    close=group[-1].close,
                    volume=sum((c.volume for c in group), Decimal(0)),
                    interval=f"{factor}m",
                )
            )

    current_key = None
    for c in candles:
        key = c.open_time // span
        if key != current_key:
            flush()
            group = []
            current_key = key
        group.append(c)
    flush()
    return out


def _quantile_threshold(volumes: np.ndarray, q: float) -> float:
    """Empirical volume quantile used as the low-liquidity cutoff."""
    if q == 0.0:
        return 0.0
    return float(np.quantile(volumes, q))


def align_pair(
    a: list[Candle],
    b: list[Candle],
    min_volume_quantile: float = 0.0,
    symbol_i: str = "asset_i",
    symbol_j: str = "asset_j",
) -> AlignedPairSeries:
    """Inner-join two candle streams on open_time and filter thin intervals.

    A joined row is dropped when either leg's volume falls strictly below
    that leg's ``min_volume_quantile`` empirical quantile (computed over the
    full input, before joining). Zero-volume rows are always dropped.
    """
    if not 0.0 <= min_volume_quantile < 1.0:
        raise BadFactor("min_volume_quantile must lie in [0, 1)")
    for stream in (a, b):
        for prev, cur in zip(stream, stream[1:]):
            if cur.open_time <= prev.open_time:
                raise UnsortedInput("candles must be sorted by open_time")
    if a and b and a[0].interval != b[0].interval:
        raise BadFactor("cannot align candles of different intervals")

    ts_a = np.array([c.open_time for c in a], dtype=np.int64)
    ts_b = np.array([c.open_time for c in b], dtype=np.int64)
    common, idx_a, idx_b = np.intersect1d(ts_a, ts_b, return_indices=True)
    if len(common) == 0:
        raise EmptyIntersection(f"{symbol_i} and {symbol_j} share no timestamps")

    vol_a = np.array([float(c.volume) for c in a])
    vol_b = np.array([float(c.volume) for c in b])
    thr_a = _quantile_threshold(vol_a, min_volume_quantile)
    thr_b = _quantile_threshold(vol_b, min_volume_quantile)

    keep = (
        (vol_a[idx_a] > 0)
        & (vol_b[idx_b] > 0)
        & (vol_a[idx_a] >= thr_a)
        & (vol_b[idx_b] >= thr_b)
    )
    if not keep.any():
        raise EmptyIntersection("volume filter removed every joined row")

    prices_i = np.array([float(a[i].close) for i in idx_a[keep]])
    prices_j = np.array([float(b[i].close) for i in idx_b[keep]])
    interval = a[0].interval if a else "1m"
    return AlignedPairSeries(
        symbol_i, symbol_j, common[keep], prices_i, prices_j, interval
    )
