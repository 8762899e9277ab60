"""Training the actor-critic agent in both trading environments.

RL1 decides only timing (three discrete actions at full allocation); RL2
also decides quantity (a continuous fraction). The shaped reward's action
component steers the agent toward the classic zone behavior; cranking its
weight up makes the learned policy collapse onto the rule strategy.
"""

import numpy as np

from statarb.actor_critic import PolicyAgent, TrainConfig, evaluate, grad_check, train
from statarb.actor_critic import ActorCritic, TransitionBatch
from statarb.ledger import FeeModel
from statarb.policies import RandomPolicy, flat_policy
from statarb.rl_env import (
    EnvConfig,
    EnvMode,
    PairTradingEnv,
    RewardVariant,
    RewardWeights,
)
from statarb.spread_engine import Thresholds, Zone
from statarb.synthetic import cointegrated_pair

series = cointegrated_pair(4000, seed=11, theta=0.02, noise_sigma=0.05, walk_std=0.05)


def env_factory(mode):
    config = EnvConfig(
        mode=mode,
        thresholds=Thresholds(1.8, 0.4),
        window=60,
        fee=FeeModel(0.0),
        gamma=0.95,
        reward_weights=RewardWeights(portfolio=1.0, action=5.0, transaction=0.1),
        reward_variant=RewardVariant.SHAPED,
        initial_cash=10_000.0,
    )
    return lambda: PairTradingEnv(series, config)


# --- sanity-check the hand-rolled backward pass first -------------------------------

agent_probe = ActorCritic("categorical", hidden=(8, 8), seed=0)
rng = np.random.default_rng(0)
batch = TransitionBatch(rng.normal(size=(16, 8)),
                        rng.integers(0, 3, size=16).astype(float),
                        rng.normal(size=16), rng.normal(size=16))
print(f"gradient check, max relative error: {grad_check(agent_probe, batch):.2e}")

# --- timing-only agent ----------------------------------------------------------------

factory = env_factory(EnvMode.RL1)
agent = train(factory, TrainConfig(learning_rate=0.05, n_steps=16, gamma=0.95,
                                   total_steps=30_000, seed=3))
env = factory()

for label, candidate in (
    ("trained A2C", agent),
    ("random", PolicyAgent(RandomPolicy(5), EnvMode.RL1)),
    ("flat", PolicyAgent(flat_policy, EnvMode.RL1)),
):
    returns, report = evaluate(candidate, env, episodes=3, mode="stochastic"
                               if label != "flat" else "deterministic", seed=7)
    print(f"{label:>12}: mean shaped return {np.mean(returns):>10.1f}   "
          f"cumret {report.cumulative_return:+.3f}%  trades {report.total_actions}")

obs = env.reset()
agree = total = 0
while True:
    step = env.step(agent.act(obs, "deterministic"))
    if obs.zone in (Zone.SHORT, Zone.LONG, Zone.CLOSE):
        total += 1
        agree += step.breakdown.action_component > 0
    obs = step.observation
    if step.done:
        break
print(f"zone-consistent decisions: {agree}/{total} = {agree / total:.1%}")

# --- quantity-varying agent -------------------------------------------------------------

factory2 = env_factory(EnvMode.RL2)
agent2 = train(factory2, TrainConfig(learning_rate=0.02, n_steps=16, gamma=0.95,
                                     total_steps=30_000, seed=4))
returns2, report2 = evaluate(agent2, factory2(), episodes=1)
print(f"\nRL2 (continuous quantity): cumret {report2.cumulative_return:+.3f}%  "
      f"trades {report2.total_actions}  time in market {report2.time_in_market:.0f}%")
