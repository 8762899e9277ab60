"""The two pair-trading MDP environments and their wire protocol.

RL1 exposes three discrete actions (open long leg, close, open short leg),
always at full allocation; RL2 takes a continuous target fraction in
[-1, 1]. Both observe (position, z-score, zone) and share the spread engine
and ledger with the rule-based strategies. Rewards come in a shaped variant
(weighted action/portfolio/transaction components) and a plain variant that
emits the raw per-step profit formulas.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum, IntEnum
from pathlib import Path

import numpy as np

from .errors import EpisodeFinished, ProtocolError, SeriesTooShort, TargetOutOfRange
from .ledger import FeeModel, Portfolio, TradeRecord
from .market_data import AlignedPairSeries
from .policies import Observation
from .spread_engine import Thresholds, Zone, rolling_spread, zones_for


class EnvMode(Enum):
    RL1 = "rl1"
    RL2 = "rl2"


class RewardVariant(Enum):
    SHAPED = "shaped"
    PLAIN = "plain"


class Rl1Action(IntEnum):
    OPEN_LONG_LEG = 0
    CLOSE = 1
    OPEN_SHORT_LEG = 2


_RL1_TARGETS = {
    Rl1Action.OPEN_LONG_LEG: 1.0,
    Rl1Action.CLOSE: 0.0,
    Rl1Action.OPEN_SHORT_LEG: -1.0,
}


@dataclass(frozen=True)
class RewardWeights:
    portfolio: float = 1.0
    action: float = 0.1
    transaction: float = 0.1

    def __post_init__(self):
        if min(self.portfolio, self.action, self.transaction) < 0:
            raise ValueError("reward weights must be nonnegative")


@dataclass(frozen=True)
class EnvConfig:
    mode: EnvMode
    thresholds: Thresholds
    window: int
    fee: FeeModel = FeeModel()
    gamma: float = 0.99
    reward_weights: RewardWeights = RewardWeights()
    reward_variant: RewardVariant = RewardVariant.SHAPED
    initial_cash: float = 10_000.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.initial_cash <= 0:
            raise ValueError("initial_cash must be positive")


@dataclass(frozen=True)
class RewardBreakdown:
    portfolio_component: float
    action_component: float
    transaction_component: float


@dataclass(frozen=True)
class StepInfo:
    delta_pnl: float       # holding P&L over the step, before fees
    fees: float            # fees charged this step
    trade_closed: bool


@dataclass(frozen=True)
class StepResult:
    observation: Observation
    reward: float
    done: bool
    breakdown: RewardBreakdown
    info: StepInfo


def zone_action_agreement(zone: Zone, target: float) -> float:
    """Score a target against the rewarded behavior of the pre-step zone.

    +1 when the action matches (short leg in the short zone, close in the
    close zone, long leg in the long zone), -1 when it contradicts a
    non-neutral zone, 0 anywhere in the neutral bands.
    """
    if zone == Zone.SHORT:
        return 1.0 if target < 0 else -1.0
    if zone == Zone.LONG:
        return 1.0 if target > 0 else -1.0
    if zone == Zone.CLOSE:
        return 1.0 if target == 0 else -1.0
    return 0.0


def transaction_punishment(position: float, target: float) -> float:
    """Magnitude of the requested position change."""
    return abs(target - position)


def plain_reward_rl1(delta_pnl: float, fees: float, traded: bool) -> float:
    """Raw timing reward: profit net of costs when a trade happened, else 0."""
    return delta_pnl - fees if traded else 0.0


def plain_reward_rl2(delta_pnl: float, action: float, fees: float) -> float:
    """Raw quantity reward: profit scaled by the action, net of costs."""
    return delta_pnl * action - fees


def discounted_return(rewards, gamma: float) -> float:
    """Total discounted reward sum_i gamma^i * r_i."""
    if not 0.0 <= gamma < 1.0:
        raise ValueError("gamma must lie in [0, 1)")
    total = 0.0
    factor = 1.0
    for r in rewards:
        total += factor * r
        factor *= gamma
    return total


@dataclass(frozen=True)
class TraceRow:
    timestamp: int
    z: float
    zone: Zone
    action: float
    target: float
    portfolio_component: float
    action_component: float
    transaction_component: float
    reward: float
    value: float
    position: float


class PairTradingEnv:
    """Episode over one aligned series; single-owner mutable state."""

    def __init__(self, series: AlignedPairSeries, config: EnvConfig):
        if len(series) < config.window:
            raise SeriesTooShort(
                f"need >= {config.window} samples for warm-up, got {len(series)}"
            )
        self.series = series
        self.config = config
        spread, z = rolling_spread(series.prices_i, series.prices_j, config.window)
        self._z = z
        self._zones = zones_for(z, config.thresholds)
        self._start = config.window - 1
        self.portfolio: Portfolio | None = None
        self._cursor = -1
        self._done = True
        self.trace: list[TraceRow] = []

    # -- episode protocol --------------------------------------------------

    def _prices(self, index: int) -> tuple[float, float]:
        return float(self.series.prices_i[index]), float(self.series.prices_j[index])

    def _observe(self, index: int) -> Observation:
        p_i, p_j = self._prices(index)
        position = self.portfolio.position_fraction(p_i, p_j)
        return Observation(
            position=position,
            z=float(self._z[index - self._start]),
            zone=Zone(int(self._zones[index - self._start])),
        )

    def reset(self) -> Observation:
        self.portfolio = Portfolio(self.config.initial_cash, self.config.fee)
        self._cursor = self._start
        self._done = False
        self.trace = []
        return self._observe(self._cursor)

    def _target_for(self, action) -> tuple[float, float]:
        """Map an action to (target fraction, numeric action value)."""
        if self.config.mode == EnvMode.RL1:
            act = Rl1Action(action)
            return _RL1_TARGETS[act], float(act.value)
        a = float(action)
        if not -1.0 <= a <= 1.0:
            raise TargetOutOfRange(f"RL2 action {a} outside [-1, 1]")
        return a, a

    def step(self, action) -> StepResult:
        if self._done or self.portfolio is None:
            raise EpisodeFinished("call reset() before stepping")
        t = self._cursor
        p_i, p_j = self._prices(t)
        obs_pre = self._observe(t)
        target, action_value = self._target_for(action)

        result = self.portfolio.execute(target, p_i, p_j, int(self.series.timestamps[t]))
        traded = result.traded_notional > 0.0

        last = len(self.series) - 1
        if t < last:
            p_i_next, p_j_next = self._prices(t + 1)
            delta_pnl = (
                self.portfolio.qty_i * (p_i_next - p_i)
                + self.portfolio.qty_j * (p_j_next - p_j)
            )
            self._cursor = t + 1
        else:
            delta_pnl = 0.0

        realized = result.trade.realized_pnl if result.trade is not None else 0.0
        breakdown = RewardBreakdown(
            portfolio_component=realized / self.config.initial_cash,
            action_component=zone_action_agreement(obs_pre.zone, target),
            transaction_component=transaction_punishment(obs_pre.position, target),
        )
        if self.config.reward_variant == RewardVariant.SHAPED:
            w = self.config.reward_weights
            reward = (
                w.portfolio * breakdown.portfolio_component
                + w.action * breakdown.action_component
                - w.transaction * breakdown.transaction_component
            )
        elif self.config.mode == EnvMode.RL1:
            reward = plain_reward_rl1(delta_pnl, result.fees, traded)
        else:
            reward = plain_reward_rl2(delta_pnl, action_value, result.fees)

        value_now = self.portfolio.mark_to_market(*self._prices(self._cursor))
        # One decision per observable index: the step taken at the final
        # index (no next price, zero holding P&L) ends the episode.
        self._done = t >= last or value_now <= 0
        obs = self._observe(self._cursor)
        self.trace.append(
            TraceRow(
                timestamp=int(self.series.timestamps[t]),
                z=obs_pre.z,
                zone=obs_pre.zone,
                action=action_value,
                target=target,
                portfolio_component=breakdown.portfolio_component,
                action_component=breakdown.action_component,
                transaction_component=breakdown.transaction_component,
                reward=reward,
                value=value_now,
                position=obs.position,
            )
        )
        return StepResult(
            observation=obs,
            reward=reward,
            done=self._done,
            breakdown=breakdown,
            info=StepInfo(delta_pnl=delta_pnl, fees=result.fees, trade_closed=result.trade is not None),
        )

    @property
    def done(self) -> bool:
        return self._done

    @property
    def blotter(self) -> list[TradeRecord]:
        return [] if self.portfolio is None else self.portfolio.trades

    def decision_timestamps(self) -> np.ndarray:
        return self.series.timestamps[self._start :]

    def write_trace(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(
                "timestamp,z,zone,action,target,portfolio_component,"
                "action_component,transaction_component,reward,value,position\n"
            )
            for r in self.trace:
                fh.write(
                    f"{r.timestamp},{r.z!r},{r.zone.name},{r.action!r},"
                    f"{r.target!r},{r.portfolio_component!r},"
                    f"{r.action_component!r},{r.transaction_component!r},"
                    f"{r.reward!r},{r.value!r},{r.position!r}\n"
                )


def _obs_payload(obs: Observation) -> list:
    return [obs.position, obs.z, int(obs.zone)]


def serve_external(env: PairTradingEnv, in_stream, out_stream) -> None:
    """Serve the environment over line-delimited JSON.

    ``{"cmd":"reset"}`` replies with the initial observation,
    ``{"cmd":"step","action":x}`` with observation/reward/done/breakdown,
    ``{"cmd":"close"}`` ends the session. Malformed lines are reported and
    the session continues.
    """

    def reply(payload: dict) -> None:
        out_stream.write(json.dumps(payload, sort_keys=True) + "\n")
        out_stream.flush()

    for line in in_stream:
        line = line.strip()
        if not line:
            continue
        try:
            msg = json.loads(line)
            if not isinstance(msg, dict) or "cmd" not in msg:
                raise ProtocolError("message must be an object with a 'cmd' field")
            cmd = msg["cmd"]
            if cmd == "close":
                return
            if cmd == "reset":
                obs = env.reset()
                reply({"obs": _obs_payload(obs)})
            elif cmd == "step":
                if "action" not in msg:
                    raise ProtocolError("step needs an 'action' field")
                try:
                    result = env.step(msg["action"])
                except EpisodeFinished:
                    reply({"error": "EpisodeFinished"})
                    continue
                reply(
                    {
                        "obs": _obs_payload(result.observation),
                        "reward": result.reward,
                        "done": result.done,
                        "breakdown": [
                            result.breakdown.portfolio_component,
                            result.breakdown.action_component,
                            result.breakdown.transaction_component,
                        ],
                    }
                )
            else:
                raise ProtocolError(f"unknown command {cmd!r}")
        except (json.JSONDecodeError, ProtocolError, TargetOutOfRange, ValueError) as exc:
            reply({"error": f"ProtocolError: {exc}"})
