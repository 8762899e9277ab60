"""Deterministic baseline decision rules behind the shared policy interface.

A policy maps an ``Observation`` to a ``PolicyDecision`` (a target position
fraction). Learned agents implement the same contract through an adapter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spread_engine import Zone


@dataclass(frozen=True)
class Observation:
    """What every strategy sees each interval: position, z-score, zone."""

    position: float
    z: float
    zone: Zone


@dataclass(frozen=True)
class PolicyDecision:
    target: float

    def __post_init__(self):
        if not -1.0 <= self.target <= 1.0:
            raise ValueError(f"target {self.target} outside [-1, 1]")


def gatev_policy(obs: Observation) -> PolicyDecision:
    """Classic full-allocation rule trading.

    Open a short leg when the spread deviates above the open threshold, a
    long leg below it, close on reversion into the close band, and hold the
    current position through the neutral bands.
    """
    if obs.zone == Zone.SHORT:
        return PolicyDecision(-1.0)
    if obs.zone == Zone.LONG:
        return PolicyDecision(1.0)
    if obs.zone == Zone.CLOSE:
        return PolicyDecision(0.0)
    # Hold through the neutral bands. Mark-to-market drift can push the
    # measured fraction a hair past full allocation; cap the echo there.
    return PolicyDecision(min(1.0, max(-1.0, obs.position)))


def flat_policy(obs: Observation) -> PolicyDecision:
    """Never trades."""
    return PolicyDecision(0.0)


class RandomPolicy:
    """Uniform draws over the environment's action set, seeded.

    Discrete mode draws from the three rule-trading targets {-1, 0, +1};
    continuous mode draws uniformly from [-1, 1].
    """

    def __init__(self, seed: int, continuous: bool = False):
        self._rng = np.random.default_rng(seed)
        self.continuous = continuous

    def __call__(self, obs: Observation) -> PolicyDecision:
        if self.continuous:
            return PolicyDecision(float(self._rng.uniform(-1.0, 1.0)))
        return PolicyDecision(float(self._rng.choice((-1.0, 0.0, 1.0))))
