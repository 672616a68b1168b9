"""Closed-form prediction of the number of rounds to reach a loss target.

With per-round participation probabilities P_i and curvature constants mu
(strong convexity) and U (smoothness), the expected loss gap contracts per
round by at least the factor 1 - rho with

    rho = sum_i N_i P_i mu / (N U),

and the predicted round count to bring the initial raw loss sum below a
target epsilon is ceil(log(epsilon / initial_loss_sum) / log(1 - rho)).
The prediction is an upper-bound-style estimate: it treats participation as
independent across rounds and followers with stationary probabilities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ConvergenceInputs", "convergence_speed", "convergence_round"]


@dataclass(frozen=True)
class ConvergenceInputs:
    """Everything the round predictor needs.

    success_prob     : per-follower probability of finishing both transfers
                       in time, shape (I,)
    counts           : samples per follower, shape (I,)
    mu               : strong convexity of the mean loss
    lipschitz_u      : smoothness of the mean loss
    epsilon          : target for the raw loss sum (same scale as
                       initial_loss_sum)
    initial_loss_sum : sum of all per-sample losses at the starting model
    """

    success_prob: np.ndarray
    counts: np.ndarray
    mu: float
    lipschitz_u: float
    epsilon: float
    initial_loss_sum: float

    def __post_init__(self):
        probs = np.asarray(self.success_prob, dtype=float)
        counts = np.asarray(self.counts, dtype=float)
        object.__setattr__(self, "success_prob", probs)
        object.__setattr__(self, "counts", counts)
        if probs.shape != counts.shape:
            raise ValueError("success_prob and counts must have matching shapes")
        if np.any(probs < 0.0) or np.any(probs > 1.0):
            raise ValueError("success probabilities must lie in [0, 1]")
        if np.any(counts <= 0):
            raise ValueError("counts must be positive")
        if not (0.0 < self.mu <= self.lipschitz_u):
            raise ValueError("need 0 < mu <= lipschitz_u")
        if not (self.epsilon > 0.0):
            raise ValueError("epsilon must be > 0")
        if not (self.initial_loss_sum > 0.0):
            raise ValueError("initial_loss_sum must be > 0")


def convergence_speed(inputs: ConvergenceInputs) -> float:
    """Per-round contraction speed rho in [0, mu/U]."""
    n = inputs.counts.sum()
    weighted = float((inputs.counts * inputs.success_prob).sum())
    return weighted * inputs.mu / (n * inputs.lipschitz_u)


def convergence_round(inputs: ConvergenceInputs) -> int:
    """Predicted rounds until the raw loss sum falls below epsilon.

    Raises ValueError when rho <= 0 (no participation, no finite
    prediction) or rho >= 1 (contraction factor would be nonpositive).
    Targets at or above the initial loss clamp to 0 rounds.
    """
    rho = convergence_speed(inputs)
    if rho <= 0.0:
        raise ValueError("rho <= 0: no follower ever participates, prediction diverges")
    if rho >= 1.0:
        raise ValueError("rho >= 1: contraction factor must stay positive")
    ratio = inputs.epsilon / inputs.initial_loss_sum
    if ratio >= 1.0:
        return 0
    rounds = math.log(ratio) / math.log(1.0 - rho)
    return max(0, math.ceil(rounds))
