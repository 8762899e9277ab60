"""From-scratch n-step advantage actor-critic with hand-rolled gradients.

The policy and value networks are small dense ReLU nets over the encoded
observation [position, clipped z, one-hot zone]. The discrete head emits
three logits; the continuous head emits a Gaussian mean with a global
log-sigma, squashed through tanh so actions stay in [-1, 1]. Updates are
plain SGD with global gradient-norm clipping, so runs are bit-reproducible
from the seed. A finite-difference gradient check guards the backward pass.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DivergedTraining, NonFiniteParams
from .metrics import EquityCurve, MetricsConfig, compute_report, intervals_per_year
from .policies import Observation, PolicyDecision
from .rl_env import EnvMode, PairTradingEnv, Rl1Action

OBS_DIM = 8  # position, z (clipped to +-10), one-hot zone (5)
Z_CLIP = 10.0
_LOG_2PI = float(np.log(2.0 * np.pi))

CHECKPOINT_MAGIC = b"PTAC1"
CHECKPOINT_VERSION = 1


def encode_observation(obs: Observation) -> np.ndarray:
    vec = np.zeros(OBS_DIM)
    vec[0] = obs.position
    vec[1] = float(np.clip(obs.z, -Z_CLIP, Z_CLIP))
    vec[2 + int(obs.zone)] = 1.0
    return vec


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.05
    n_steps: int = 16
    gamma: float = 0.99
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    total_steps: int = 50_000
    seed: int = 0
    hidden: tuple[int, ...] = (64, 64)
    grad_clip: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.learning_rate < 0 or self.n_steps < 1 or self.total_steps < 1:
            raise ValueError("bad training configuration")


@dataclass
class TransitionBatch:
    """One rollout prepared for a gradient step.

    ``actions`` holds categorical indices for the discrete head and
    pre-squash samples for the continuous head. Returns and advantages are
    constants with respect to the parameters being differentiated.
    """

    obs: np.ndarray
    actions: np.ndarray
    returns: np.ndarray
    advantages: np.ndarray


class _Mlp:
    """Dense ReLU network with an explicit backward pass."""

    def __init__(self, sizes: list[int], rng: np.random.Generator,
                 head_scale: float = 0.01):
        self.sizes = list(sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for k, (fan_in, fan_out) in enumerate(zip(sizes, sizes[1:])):
            last = k == len(sizes) - 2
            scale = head_scale if last else np.sqrt(2.0 / fan_in)
            self.weights.append(rng.normal(0.0, scale, size=(fan_in, fan_out)))
            # small positive hidden bias keeps units off the ReLU kink at init
            self.biases.append(np.zeros(fan_out) if last else np.full(fan_out, 0.01))

    def forward(self, x: np.ndarray):
        acts = [x]
        pre = []
        h = x
        for k, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = h @ w + b
            pre.append(a)
            h = a if k == len(self.weights) - 1 else np.maximum(a, 0.0)
            acts.append(h)
        return h, (acts, pre)

    def backward(self, cache, d_out: np.ndarray):
        acts, pre = cache
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        grad = d_out
        for k in range(len(self.weights) - 1, -1, -1):
            grads_w[k] = acts[k].T @ grad
            grads_b[k] = grad.sum(axis=0)
            if k > 0:
                grad = (grad @ self.weights[k].T) * (pre[k - 1] > 0)
        return grads_w, grads_b

    def params(self) -> list[np.ndarray]:
        out = []
        for w, b in zip(self.weights, self.biases):
            out.append(w)
            out.append(b)
        return out


class ActorCritic:
    """Policy + value networks sharing one observation encoding."""

    def __init__(self, head: str = "categorical", hidden: tuple[int, ...] = (64, 64),
                 seed: int = 0, obs_dim: int = OBS_DIM):
        if head not in ("categorical", "gaussian"):
            raise ValueError("head must be 'categorical' or 'gaussian'")
        rng = np.random.default_rng(seed)
        self.head = head
        self.hidden = tuple(hidden)
        self.obs_dim = obs_dim
        out_dim = 3 if head == "categorical" else 1
        self.policy = _Mlp([obs_dim, *hidden, out_dim], rng)
        self.value = _Mlp([obs_dim, *hidden, 1], rng)
        self.log_sigma = np.array([-0.5]) if head == "gaussian" else None
        self.version = CHECKPOINT_VERSION

    # -- parameter plumbing -------------------------------------------------

    def params(self) -> list[np.ndarray]:
        out = self.policy.params()
        if self.log_sigma is not None:
            out.append(self.log_sigma)
        out.extend(self.value.params())
        return out

    def params_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.params()])

    def set_params_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for p in self.params():
            p.flat[:] = flat[offset : offset + p.size]
            offset += p.size
        if offset != len(flat):
            raise ValueError("parameter vector has wrong length")

    def n_params(self) -> int:
        return sum(p.size for p in self.params())

    # -- acting ---------------------------------------------------------------

    def _policy_out(self, x: np.ndarray) -> np.ndarray:
        out, _ = self.policy.forward(x)
        if not np.isfinite(out).all():
            raise NonFiniteParams("policy produced non-finite output")
        return out

    def action_distribution(self, obs: Observation) -> np.ndarray:
        """Categorical probabilities for one observation (discrete head)."""
        if self.head != "categorical":
            raise ValueError("distribution only defined for the discrete head")
        logits = self._policy_out(encode_observation(obs)[None, :])[0]
        return _softmax_row(logits)

    def act(self, obs: Observation, mode: str = "stochastic", rng=None):
        """Choose an action; returns Rl1Action (discrete) or float (continuous)."""
        if mode not in ("stochastic", "deterministic"):
            raise ValueError("mode must be 'stochastic' or 'deterministic'")
        if rng is None or isinstance(rng, (int, np.integer)):
            rng = np.random.default_rng(rng)
        action, _ = self._sample(encode_observation(obs), mode, rng)
        return action

    def _sample(self, x: np.ndarray, mode: str, rng: np.random.Generator):
        out = self._policy_out(x[None, :])[0]
        if self.head == "categorical":
            probs = _softmax_row(out)
            if mode == "deterministic":
                idx = int(np.argmax(probs))
            else:
                idx = int(np.searchsorted(np.cumsum(probs), rng.uniform()))
                idx = min(idx, 2)
            return Rl1Action(idx), idx
        sigma = float(np.exp(self.log_sigma[0]))
        mean = float(out[0])
        xi = mean if mode == "deterministic" else mean + sigma * rng.standard_normal()
        return float(np.tanh(xi)), xi

    # -- losses and gradients ---------------------------------------------------

    def loss_and_grads(self, batch: TransitionBatch, entropy_coef: float = 0.01,
                       value_coef: float = 0.5):
        """Total loss and its analytic gradient in params() order."""
        x = batch.obs
        n = len(x)
        adv = batch.advantages

        p_out, p_cache = self.policy.forward(x)
        if self.head == "categorical":
            idx = batch.actions.astype(int)
            log_probs = _log_softmax(p_out)
            probs = np.exp(log_probs)
            chosen = log_probs[np.arange(n), idx]
            entropy = -(probs * log_probs).sum(axis=1)
            policy_loss = float(np.mean(-adv * chosen) - entropy_coef * np.mean(entropy))
            d_logits = -adv[:, None] * (_one_hot(idx, p_out.shape[1]) - probs)
            d_logits += entropy_coef * probs * (log_probs + entropy[:, None])
            d_logits /= n
            grads_pw, grads_pb = self.policy.backward(p_cache, d_logits)
            grad_log_sigma = None
        else:
            xi = batch.actions
            mean = p_out[:, 0]
            sigma = float(np.exp(self.log_sigma[0]))
            std_err = (xi - mean) / sigma
            # tanh-squash correction is constant w.r.t. parameters for a
            # stored pre-squash sample, so it does not enter the gradient.
            log_probs = (
                -0.5 * std_err**2
                - self.log_sigma[0]
                - 0.5 * _LOG_2PI
                - np.log1p(-np.tanh(xi) ** 2 + 1e-12)
            )
            entropy = 0.5 * (_LOG_2PI + 1.0) + self.log_sigma[0]
            policy_loss = float(np.mean(-adv * log_probs) - entropy_coef * entropy)
            d_mean = (-adv * std_err / sigma) / n
            grads_pw, grads_pb = self.policy.backward(p_cache, d_mean[:, None])
            grad_log_sigma = np.array(
                [float(np.mean(-adv * (std_err**2 - 1.0)) - entropy_coef)]
            )

        v_out, v_cache = self.value.forward(x)
        v = v_out[:, 0]
        value_err = v - batch.returns
        value_loss = float(np.mean(value_err**2))
        d_v = (2.0 * value_err / n)[:, None] * value_coef
        grads_vw, grads_vb = self.value.backward(v_cache, d_v)

        total = policy_loss + value_coef * value_loss
        grads: list[np.ndarray] = []
        for w, b in zip(grads_pw, grads_pb):
            grads.append(w)
            grads.append(b)
        if grad_log_sigma is not None:
            grads.append(grad_log_sigma)
        for w, b in zip(grads_vw, grads_vb):
            grads.append(w)
            grads.append(b)
        return total, grads, {"policy_loss": policy_loss, "value_loss": value_loss}

    def apply_update(self, grads: list[np.ndarray], learning_rate: float,
                     grad_clip: float) -> None:
        norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads)))
        scale = 1.0 if norm <= grad_clip or norm == 0.0 else grad_clip / norm
        for p, g in zip(self.params(), grads):
            p -= learning_rate * scale * g


def _softmax_row(u: np.ndarray) -> np.ndarray:
    shifted = u - np.max(u)
    e = np.exp(shifted)
    return e / e.sum()


def _log_softmax(u: np.ndarray) -> np.ndarray:
    shifted = u - u.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def _one_hot(idx: np.ndarray, k: int) -> np.ndarray:
    out = np.zeros((len(idx), k))
    out[np.arange(len(idx)), idx] = 1.0
    return out


def head_for_mode(mode: EnvMode) -> str:
    return "categorical" if mode == EnvMode.RL1 else "gaussian"


def train(env_factory, cfg: TrainConfig) -> ActorCritic:
    """n-step advantage actor-critic training loop, deterministic per seed."""
    env: PairTradingEnv = env_factory()
    agent = ActorCritic(head_for_mode(env.config.mode), cfg.hidden, seed=cfg.seed)
    rng = np.random.default_rng(cfg.seed + 1)

    obs = env.reset()
    steps_done = 0
    while steps_done < cfg.total_steps:
        xs, acts, rewards = [], [], []
        done = False
        for _ in range(cfg.n_steps):
            x = encode_observation(obs)
            action, aux = agent._sample(x, "stochastic", rng)
            result = env.step(action)
            xs.append(x)
            acts.append(aux)
            rewards.append(result.reward)
            obs = result.observation
            steps_done += 1
            done = result.done
            if done or steps_done >= cfg.total_steps:
                break

        x_batch = np.array(xs)
        if done:
            bootstrap = 0.0
        else:
            v_next, _ = agent.value.forward(encode_observation(obs)[None, :])
            bootstrap = float(v_next[0, 0])
        returns = np.empty(len(rewards))
        acc = bootstrap
        for k in range(len(rewards) - 1, -1, -1):
            acc = rewards[k] + cfg.gamma * acc
            returns[k] = acc
        v_batch, _ = agent.value.forward(x_batch)
        advantages = returns - v_batch[:, 0]

        batch = TransitionBatch(x_batch, np.array(acts), returns, advantages)
        loss, grads, _ = agent.loss_and_grads(batch, cfg.entropy_coef, cfg.value_coef)
        if not np.isfinite(loss) or not all(np.isfinite(g).all() for g in grads):
            raise DivergedTraining(f"non-finite loss after {steps_done} steps")
        agent.apply_update(grads, cfg.learning_rate, cfg.grad_clip)

        if done:
            obs = env.reset()
    return agent


def evaluate(agent, env: PairTradingEnv, episodes: int, mode: str = "deterministic",
             seed: int = 0, metrics_config: MetricsConfig | None = None):
    """Run full episodes; returns per-episode reward totals and a MetricsReport.

    The report is computed from the last episode's trace and blotter.
    """
    head = getattr(agent, "head", None)
    if head is not None and head != head_for_mode(env.config.mode):
        raise ValueError(
            f"{head} head is incompatible with a {env.config.mode.value} environment"
        )
    episode_returns = []
    for ep in range(episodes):
        rng = np.random.default_rng(seed + ep)
        obs = env.reset()
        total = 0.0
        while True:
            action = agent.act(obs, mode, rng)
            result = env.step(action)
            total += result.reward
            obs = result.observation
            if result.done:
                break
        episode_returns.append(total)

    values = np.array([env.config.initial_cash] + [r.value for r in env.trace])
    stamps = np.concatenate(
        ([env.series.timestamps[env.config.window - 1]],
         [r.timestamp for r in env.trace])
    ).astype(np.int64)
    # the trace stamps the decision time; shift by one interval for the
    # post-step values so the curve clock stays strictly increasing
    interval_ms = stamps[1] - stamps[0] if len(stamps) > 1 else 60_000
    stamps = np.concatenate(([stamps[0]], stamps[1:] + interval_ms))
    curve = EquityCurve(stamps, values, intervals_per_year(env.series.interval))
    positions = np.array([r.position for r in env.trace])
    report = compute_report(
        curve, env.blotter, positions, metrics_config or MetricsConfig()
    )
    return episode_returns, report


def grad_check(agent: ActorCritic, batch: TransitionBatch, h: float = 1e-5,
               entropy_coef: float = 0.01, value_coef: float = 0.5,
               tamper_scale: float = 1.0) -> float:
    """Max relative error between analytic and central-difference gradients.

    ``tamper_scale`` multiplies the first weight-matrix gradient block and
    exists as a negative control for the check itself.
    """
    _, grads, _ = agent.loss_and_grads(batch, entropy_coef, value_coef)
    grads = [g.copy() for g in grads]
    grads[0] *= tamper_scale
    analytic = np.concatenate([g.ravel() for g in grads])

    theta = agent.params_flat()
    fd = np.empty_like(analytic)
    for i in range(len(theta)):
        bumped = theta.copy()
        bumped[i] = theta[i] + h
        agent.set_params_flat(bumped)
        loss_plus, _, _ = agent.loss_and_grads(batch, entropy_coef, value_coef)
        bumped[i] = theta[i] - h
        agent.set_params_flat(bumped)
        loss_minus, _, _ = agent.loss_and_grads(batch, entropy_coef, value_coef)
        fd[i] = (loss_plus - loss_minus) / (2.0 * h)
    agent.set_params_flat(theta)

    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(fd)), 1e-6)
    return float(np.max(np.abs(analytic - fd) / denom))


class PolicyAgent:
    """Adapter exposing a baseline policy through the agent interface."""

    def __init__(self, policy, mode: EnvMode):
        self.policy = policy
        self.mode = mode

    def act(self, obs: Observation, mode: str = "deterministic", rng=None):
        decision: PolicyDecision = self.policy(obs)
        if self.mode == EnvMode.RL2:
            return decision.target
        if decision.target > 0:
            return Rl1Action.OPEN_LONG_LEG
        if decision.target < 0:
            return Rl1Action.OPEN_SHORT_LEG
        return Rl1Action.CLOSE


# -- checkpoints ---------------------------------------------------------------

def save_checkpoint(path: str | Path, agent: ActorCritic,
                    sidecar: dict | None = None) -> None:
    """Write params as a flat little-endian binary plus a JSON sidecar."""
    path = Path(path)
    head_code = 0 if agent.head == "categorical" else 1
    sizes = [agent.obs_dim, *agent.hidden]
    with open(path, "wb") as fh:
        fh.write(CHECKPOINT_MAGIC)
        fh.write(struct.pack("<BB", CHECKPOINT_VERSION, head_code))
        fh.write(struct.pack("<I", len(sizes)))
        fh.write(struct.pack(f"<{len(sizes)}I", *sizes))
        fh.write(agent.params_flat().astype("<f8").tobytes())
    meta = {
        "version": CHECKPOINT_VERSION,
        "head": agent.head,
        "hidden": list(agent.hidden),
        "obs_dim": agent.obs_dim,
        "n_params": agent.n_params(),
    }
    if sidecar:
        meta.update(sidecar)
    with open(str(path) + ".json", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, sort_keys=True, indent=2)
        fh.write("\n")


def load_checkpoint(path: str | Path) -> ActorCritic:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(len(CHECKPOINT_MAGIC))
        if magic != CHECKPOINT_MAGIC:
            raise ValueError(f"not a checkpoint file: bad magic {magic!r}")
        version, head_code = struct.unpack("<BB", fh.read(2))
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        (n_sizes,) = struct.unpack("<I", fh.read(4))
        sizes = struct.unpack(f"<{n_sizes}I", fh.read(4 * n_sizes))
        flat = np.frombuffer(fh.read(), dtype="<f8").astype(np.float64)
    agent = ActorCritic(
        "categorical" if head_code == 0 else "gaussian",
        hidden=tuple(sizes[1:]),
        obs_dim=sizes[0],
    )
    agent.set_params_flat(flat)
    return agent
