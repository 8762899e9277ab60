"""Cash and two-leg position accounting with per-transaction fees.

The portfolio holds cash plus opposite-signed quantities of the two assets.
Targets are expressed as a signed fraction of portfolio value deployed
across both legs; executing a target trades only the difference between the
target and the current fraction, half of the delta notional per leg. A
round trip (back to flat, or a sign flip) closes the trade and books its
realized P&L net of every fee paid over the trade's lifetime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import BankruptPortfolio, TargetOutOfRange

# Deltas below this are treated as "already at target" so float dust from
# repeated mark-to-market reads never generates phantom trades.
_DUST = 1e-12


@dataclass(frozen=True)
class FeeModel:
    """Flat percentage commission charged per asset per transaction."""

    rate: float = 0.0002

    def __post_init__(self):
        if not 0.0 <= self.rate <= 0.01:
            raise ValueError(f"fee rate {self.rate} outside [0, 0.01]")


class Direction(Enum):
    LONG_LEG = "long_leg"    # long asset i, short asset j
    SHORT_LEG = "short_leg"  # short asset i, long asset j


@dataclass(frozen=True)
class TradeRecord:
    """One closed round trip; adjustments fold into the single record."""

    open_time: int
    close_time: int
    direction: Direction
    max_fraction: float
    realized_pnl: float
    fees_paid: float
    adjustments: int


@dataclass(frozen=True)
class ActionLogEntry:
    timestamp: int
    target: float
    delta: float
    notional_i: float
    notional_j: float
    fees: float


@dataclass(frozen=True)
class ExecutionResult:
    trade: TradeRecord | None
    executed_delta: float
    fees: float
    traded_notional: float


@dataclass
class _OpenTrade:
    open_time: int
    direction: Direction
    open_value: float       # portfolio value just before opening from flat
    fees: float = 0.0
    adjustments: int = 0
    max_fraction: float = 0.0


class Portfolio:
    """Single-owner mutable ledger for one traded pair."""

    def __init__(self, cash: float, fee: FeeModel = FeeModel()):
        if cash <= 0:
            raise ValueError("initial cash must be positive")
        self.initial_cash = float(cash)
        self.cash = float(cash)
        self.qty_i = 0.0
        self.qty_j = 0.0
        self.fee = fee
        self.total_fees = 0.0
        self.traded_notional_i = 0.0
        self.traded_notional_j = 0.0
        self.trades: list[TradeRecord] = []
        self.action_log: list[ActionLogEntry] = []
        self._open: _OpenTrade | None = None

    # -- valuation -------------------------------------------------------

    def mark_to_market(self, price_i: float, price_j: float) -> float:
        return self.cash + self.qty_i * price_i + self.qty_j * price_j

    def position_fraction(self, price_i: float, price_j: float) -> float:
        """Signed share of portfolio value deployed across both legs."""
        value = self.mark_to_market(price_i, price_j)
        if value <= 0:
            raise BankruptPortfolio(f"portfolio value {value} is not positive")
        gross = abs(self.qty_i) * price_i + abs(self.qty_j) * price_j
        if self.qty_i == 0 and self.qty_j == 0:
            return 0.0
        sign = 1.0 if self.qty_i > 0 else -1.0
        return sign * gross / value

    @property
    def open_value(self) -> float | None:
        return self._open.open_value if self._open is not None else None

    # -- trading ----------------------------------------------------------

    def _charge(self, notional_i: float, notional_j: float) -> float:
        fee = self.fee.rate * notional_i + self.fee.rate * notional_j
        self.cash -= fee
        self.total_fees += fee
        self.traded_notional_i += notional_i
        self.traded_notional_j += notional_j
        if self._open is not None:
            self._open.fees += fee
        return fee

    def _open_position(self, target: float, price_i: float, price_j: float,
                       timestamp: int) -> tuple[float, float, float]:
        value = self.mark_to_market(price_i, price_j)
        per_leg = abs(target) * value / 2.0
        sign = 1.0 if target > 0 else -1.0
        self._open = _OpenTrade(
            open_time=timestamp,
            direction=Direction.LONG_LEG if target > 0 else Direction.SHORT_LEG,
            open_value=value,
        )
        dq_i = sign * per_leg / price_i
        dq_j = -sign * per_leg / price_j
        self.qty_i += dq_i
        self.qty_j += dq_j
        self.cash -= dq_i * price_i + dq_j * price_j
        fee = self._charge(per_leg, per_leg)
        return per_leg, per_leg, fee

    def _close_position(self, price_i: float, price_j: float,
                        timestamp: int) -> tuple[TradeRecord, float, float, float]:
        notional_i = abs(self.qty_i) * price_i
        notional_j = abs(self.qty_j) * price_j
        self.cash += self.qty_i * price_i + self.qty_j * price_j
        self.qty_i = 0.0
        self.qty_j = 0.0
        fee = self._charge(notional_i, notional_j)
        open_trade = self._open
        self._open = None
        record = TradeRecord(
            open_time=open_trade.open_time,
            close_time=timestamp,
            direction=open_trade.direction,
            max_fraction=min(1.0, open_trade.max_fraction),
            realized_pnl=self.cash - open_trade.open_value,
            fees_paid=open_trade.fees,
            adjustments=open_trade.adjustments,
        )
        self.trades.append(record)
        return record, notional_i, notional_j, fee

    def _adjust_position(self, delta: float, value: float, price_i: float,
                         price_j: float) -> tuple[float, float, float]:
        total = abs(delta) * value
        gross_i = abs(self.qty_i) * price_i
        gross_j = abs(self.qty_j) * price_j
        increasing = (delta > 0) == (self.qty_i > 0)
        if increasing:
            notional_i = total / 2.0
            notional_j = total / 2.0
        else:
            # Reductions split pro-rata over drifted legs so neither leg can
            # flip sign; the traded total is still exactly |delta| * value.
            gross = gross_i + gross_j
            notional_i = total * gross_i / gross
            notional_j = total * gross_j / gross
        sign = 1.0 if delta > 0 else -1.0
        dq_i = sign * notional_i / price_i
        dq_j = -sign * notional_j / price_j
        self.qty_i += dq_i
        self.qty_j += dq_j
        self.cash -= dq_i * price_i + dq_j * price_j
        fee = self._charge(notional_i, notional_j)
        self._open.adjustments += 1
        return notional_i, notional_j, fee

    def execute(self, target: float, price_i: float, price_j: float,
                timestamp: int) -> ExecutionResult:
        """Trade toward ``target`` position fraction at the given prices.

        Crossing through zero closes the trade first and reopens the
        residual from flat; exactly reaching zero just closes. Returns the
        TradeRecord when (and only when) the position round-trips.
        """
        if not -1.0 <= target <= 1.0 or math.isnan(target):
            raise TargetOutOfRange(f"target {target} outside [-1, 1]")
        value = self.mark_to_market(price_i, price_j)
        if value <= 0:
            raise BankruptPortfolio(f"portfolio value {value} is not positive")
        position = self.position_fraction(price_i, price_j)
        delta = target - position
        if abs(delta) <= _DUST:
            return ExecutionResult(None, 0.0, 0.0, 0.0)

        flat = self.qty_i == 0 and self.qty_j == 0
        record = None
        # one fill per phase; a zero-crossing produces two (close, reopen)
        fills: list[tuple[float, float, float, float]] = []
        if flat:
            n_i, n_j, fee = self._open_position(target, price_i, price_j, timestamp)
            fills.append((delta, n_i, n_j, fee))
        elif target == 0.0 or (target > 0) != (position > 0):
            record, n_i, n_j, fee = self._close_position(price_i, price_j, timestamp)
            fills.append((-position, n_i, n_j, fee))
            if target != 0.0:
                n_i, n_j, fee = self._open_position(
                    target, price_i, price_j, timestamp
                )
                fills.append((target, n_i, n_j, fee))
        else:
            n_i, n_j, fee = self._adjust_position(delta, value, price_i, price_j)
            fills.append((delta, n_i, n_j, fee))

        if self._open is not None:
            frac = abs(self.position_fraction(price_i, price_j))
            self._open.max_fraction = max(self._open.max_fraction, frac)
        for fill_delta, n_i, n_j, fee in fills:
            self.action_log.append(
                ActionLogEntry(timestamp, target, fill_delta, n_i, n_j, fee)
            )
        fees = sum(f[3] for f in fills)
        notional = sum(f[1] + f[2] for f in fills)
        return ExecutionResult(record, delta, fees, notional)


def write_blotter(path: str | Path, trades: list[TradeRecord]) -> None:
    """Export closed trades as CSV."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            "open_time,close_time,direction,max_fraction,"
            "realized_pnl,fees_paid,adjustments\n"
        )
        for t in trades:
            fh.write(
                f"{t.open_time},{t.close_time},{t.direction.value},"
                f"{t.max_fraction!r},{t.realized_pnl!r},{t.fees_paid!r},"
                f"{t.adjustments}\n"
            )


def write_action_log(path: str | Path, log: list[ActionLogEntry]) -> None:
    """Export the per-action trail (every execute, traded or not)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("timestamp,target,delta,notional_i,notional_j,fees\n")
        for e in log:
            fh.write(
                f"{e.timestamp},{e.target!r},{e.delta!r},"
                f"{e.notional_i!r},{e.notional_j!r},{e.fees!r}\n"
            )
