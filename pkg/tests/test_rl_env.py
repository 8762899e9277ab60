import io
import json

import numpy as np
import pytest

from statarb.errors import EpisodeFinished, SeriesTooShort
from statarb.ledger import FeeModel
from statarb.policies import gatev_policy
from statarb.rl_env import (
    EnvConfig,
    EnvMode,
    PairTradingEnv,
    RewardVariant,
    RewardWeights,
    Rl1Action,
    discounted_return,
    plain_reward_rl1,
    plain_reward_rl2,
    serve_external,
    transaction_punishment,
    zone_action_agreement,
)
from statarb.spread_engine import Thresholds, Zone
from statarb.synthetic import cointegrated_pair

THRESHOLDS = Thresholds(1.8, 0.4)


def make_env(series=None, mode=EnvMode.RL1, variant=RewardVariant.SHAPED,
             fee=0.0, weights=RewardWeights(), window=60, seed=0):
    series = series if series is not None else cointegrated_pair(
        900, seed=11, theta=0.02, noise_sigma=0.05, walk_std=0.05)
    config = EnvConfig(
        mode=mode, thresholds=THRESHOLDS, window=window, fee=FeeModel(fee),
        gamma=0.95, reward_weights=weights, reward_variant=variant,
        initial_cash=10_000.0, seed=seed,
    )
    return PairTradingEnv(series, config)


# --- reward component functions -------------------------------------------------


def test_zone_action_agreement_table():
    assert zone_action_agreement(Zone.SHORT, -1.0) == 1.0
    assert zone_action_agreement(Zone.SHORT, 1.0) == -1.0
    assert zone_action_agreement(Zone.SHORT, 0.0) == -1.0
    assert zone_action_agreement(Zone.LONG, 1.0) == 1.0
    assert zone_action_agreement(Zone.LONG, -0.2) == -1.0
    assert zone_action_agreement(Zone.CLOSE, 0.0) == 1.0
    assert zone_action_agreement(Zone.CLOSE, 0.4) == -1.0
    assert zone_action_agreement(Zone.NEUTRAL_SHORT, -1.0) == 0.0
    assert zone_action_agreement(Zone.NEUTRAL_LONG, 0.3) == 0.0


def test_transaction_punishment_magnitude():
    assert transaction_punishment(0.7, 0.8) == pytest.approx(0.1)
    assert transaction_punishment(-0.5, 0.5) == pytest.approx(1.0)
    assert transaction_punishment(0.0, 0.0) == 0.0


def test_plain_reward_formulas():
    assert plain_reward_rl1(5.0, 0.2, traded=True) == pytest.approx(4.8)
    assert plain_reward_rl1(5.0, 0.2, traded=False) == 0.0
    assert plain_reward_rl2(5.0, 0.5, 0.2) == 2.3  # exact float identity


def test_discounted_return():
    assert discounted_return([1.0, 1.0, 1.0], 0.0) == 1.0
    assert discounted_return([1.0, 1.0], 0.5) == 1.5
    rng = np.random.default_rng(4)
    rewards = rng.normal(size=100)
    gamma = 0.97
    oracle = sum(gamma**i * r for i, r in enumerate(rewards))
    assert discounted_return(rewards, gamma) == pytest.approx(oracle, abs=1e-12)


# --- episode protocol -------------------------------------------------------------


def test_reset_starts_flat():
    env = make_env()
    observation = env.reset()
    assert observation.position == 0.0
    assert observation.zone == env.reset().zone  # deterministic


def test_series_must_cover_warmup():
    with pytest.raises(SeriesTooShort):
        make_env(series=cointegrated_pair(40, seed=1), window=60)


def test_minimal_series_done_on_first_step():
    series = cointegrated_pair(60, seed=3)
    env = make_env(series=series, window=60)
    env.reset()
    result = env.step(Rl1Action.CLOSE)
    assert result.done is True
    with pytest.raises(EpisodeFinished):
        env.step(Rl1Action.CLOSE)


def test_step_before_reset_raises():
    env = make_env()
    with pytest.raises(EpisodeFinished):
        env.step(Rl1Action.CLOSE)


def test_rl1_action_mapping_reaches_full_allocation():
    env = make_env(fee=0.0)
    env.reset()
    result = env.step(Rl1Action.OPEN_LONG_LEG)
    assert result.observation.position == pytest.approx(1.0, abs=5e-3)
    result = env.step(Rl1Action.OPEN_SHORT_LEG)
    assert result.observation.position == pytest.approx(-1.0, abs=5e-3)
    assert result.info.trade_closed is True


def test_rl2_continuous_target():
    env = make_env(mode=EnvMode.RL2, fee=0.0)
    env.reset()
    result = env.step(0.37)
    assert result.observation.position == pytest.approx(0.37, abs=5e-3)


def test_shaped_reward_decomposition_identity():
    weights = RewardWeights(1.0, 0.3, 0.2)
    env = make_env(weights=weights, fee=0.0002)
    rng = np.random.default_rng(2)
    env.reset()
    for _ in range(200):
        action = Rl1Action(int(rng.integers(0, 3)))
        result = env.step(action)
        b = result.breakdown
        expected = (
            weights.portfolio * b.portfolio_component
            + weights.action * b.action_component
            - weights.transaction * b.transaction_component
        )
        assert result.reward == expected  # exact, not approximate
        if result.done:
            break


def test_action_component_matches_pre_step_zone():
    env = make_env(fee=0.0)
    obs = env.reset()
    rng = np.random.default_rng(5)
    seen = set()
    for _ in range(700):
        action = Rl1Action(int(rng.integers(0, 3)))
        target = {Rl1Action.OPEN_LONG_LEG: 1.0, Rl1Action.CLOSE: 0.0,
                  Rl1Action.OPEN_SHORT_LEG: -1.0}[action]
        result = env.step(action)
        assert result.breakdown.action_component == zone_action_agreement(
            obs.zone, target
        )
        seen.add(obs.zone)
        obs = result.observation
        if result.done:
            obs = env.reset()
    assert Zone.SHORT in seen and Zone.LONG in seen and Zone.CLOSE in seen


def test_plain_rl1_zero_without_trade():
    env = make_env(variant=RewardVariant.PLAIN, fee=0.0002)
    env.reset()
    for _ in range(50):
        result = env.step(Rl1Action.CLOSE)  # flat close: never trades
        assert result.reward == 0.0
        assert result.info.fees == 0.0
        if result.done:
            break


def test_plain_rl2_reward_is_formula():
    env = make_env(mode=EnvMode.RL2, variant=RewardVariant.PLAIN, fee=0.0002)
    env.reset()
    rng = np.random.default_rng(7)
    for _ in range(100):
        action = float(rng.uniform(-1, 1))
        result = env.step(action)
        assert result.reward == pytest.approx(
            result.info.delta_pnl * action - result.info.fees, abs=1e-12
        )
        if result.done:
            break


def test_portfolio_components_sum_to_realized_pnl():
    env = make_env(fee=0.0002)
    env.reset()
    rng = np.random.default_rng(3)
    total = 0.0
    while True:
        result = env.step(Rl1Action(int(rng.integers(0, 3))))
        total += result.breakdown.portfolio_component
        if result.done:
            break
    realized = sum(t.realized_pnl for t in env.blotter)
    assert total * env.config.initial_cash == pytest.approx(realized, abs=1e-6)


def test_env_deterministic_given_action_sequence():
    rng = np.random.default_rng(10)
    actions = [Rl1Action(int(a)) for a in rng.integers(0, 3, 300)]

    def run():
        env = make_env(fee=0.0002)
        env.reset()
        rewards = []
        for action in actions:
            result = env.step(action)
            rewards.append(result.reward)
            if result.done:
                break
        return rewards

    assert run() == run()


def test_high_action_weight_argmax_matches_rule_policy():
    weights = RewardWeights(0.0, 100.0, 0.0)
    series = cointegrated_pair(900, seed=11, theta=0.02, noise_sigma=0.05,
                               walk_std=0.05)
    by_zone = {}
    for probe in (Rl1Action.OPEN_LONG_LEG, Rl1Action.CLOSE, Rl1Action.OPEN_SHORT_LEG):
        env = make_env(series=series, weights=weights, fee=0.0)
        obs = env.reset()
        for _ in range(400):
            result = env.step(probe)
            by_zone.setdefault(obs.zone, {})[probe] = max(
                by_zone.get(obs.zone, {}).get(probe, -np.inf), result.reward
            )
            obs = result.observation
            if result.done:
                break
    from statarb.policies import Observation

    target_action = {1.0: Rl1Action.OPEN_LONG_LEG, 0.0: Rl1Action.CLOSE,
                     -1.0: Rl1Action.OPEN_SHORT_LEG}
    for zone in (Zone.SHORT, Zone.CLOSE, Zone.LONG):
        rewards = by_zone[zone]
        best = max(rewards, key=rewards.get)
        gatev_target = gatev_policy(Observation(0.0, 0.0, zone)).target
        assert best == target_action[gatev_target]


# --- wire protocol ------------------------------------------------------------------


def run_protocol(env, lines):
    out = io.StringIO()
    serve_external(env, io.StringIO("".join(line + "\n" for line in lines)), out)
    return [json.loads(line) for line in out.getvalue().splitlines()]


def test_protocol_reset_reports_flat_observation():
    env = make_env()
    replies = run_protocol(env, ['{"cmd":"reset"}', '{"cmd":"close"}'])
    assert replies[0]["obs"][0] == 0.0
    assert replies[0]["obs"][2] in range(5)


def test_protocol_step_after_done():
    series = cointegrated_pair(60, seed=3)
    env = make_env(series=series, window=60)
    replies = run_protocol(env, [
        '{"cmd":"reset"}',
        '{"cmd":"step","action":1}',
        '{"cmd":"step","action":1}',
        '{"cmd":"close"}',
    ])
    assert replies[1]["done"] is True
    assert replies[2] == {"error": "EpisodeFinished"}


def test_protocol_malformed_line_keeps_session():
    env = make_env()
    replies = run_protocol(env, [
        '{"cmd":"reset"}',
        "this is not json",
        '{"cmd":"step"}',
        '{"cmd":"step","action":2}',
        '{"cmd":"close"}',
    ])
    assert "error" in replies[1]
    assert "error" in replies[2]
    assert "reward" in replies[3]


def test_protocol_matches_in_process_run():
    rng = np.random.default_rng(8)
    actions = [int(a) for a in rng.integers(0, 3, 40)]
    env = make_env(fee=0.0002)
    env.reset()
    expected = []
    for action in actions:
        result = env.step(Rl1Action(action))
        expected.append(result.reward)
        if result.done:
            break
    env2 = make_env(fee=0.0002)
    lines = ['{"cmd":"reset"}'] + [
        json.dumps({"cmd": "step", "action": a}) for a in actions[: len(expected)]
    ] + ['{"cmd":"close"}']
    replies = run_protocol(env2, lines)
    got = [r["reward"] for r in replies[1:] if "reward" in r]
    assert got == expected


def test_trace_export(tmp_path):
    env = make_env()
    env.reset()
    for _ in range(10):
        env.step(Rl1Action.OPEN_LONG_LEG)
    path = tmp_path / "trace.csv"
    env.write_trace(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0].startswith("timestamp,z,zone,action")
    assert len(lines) == 11
