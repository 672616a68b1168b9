"""Federated learning engine over lossy leader/follower links.

Followers hold local datasets, take one gradient step per round from the
newest global model they have received, and upload the result.  The leader
aggregates whatever arrives in time (count-weighted mean over participating
followers) and broadcasts the new global model.  A follower that misses a
round keeps training from its stale copy until a broadcast reaches it again.

The bundled loss model is linear regression with per-sample squared error
f(w, x, y) = (w.x - y)^2.  The global objective F is the mean of f over all
samples of all followers; per-follower gradients are unnormalized sums, and
the local step divides by the local sample count, so that under full
participation one round equals plain gradient descent on F.
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np

from .channel import draw_channel, link_delays, success_mask

if TYPE_CHECKING:  # pragma: no cover - typing only
    from .design import DesignVector
    from .scenario import SwarmScenario

__all__ = [
    "Dataset",
    "LossModel",
    "QuadraticLossModel",
    "make_regression_problem",
    "FlState",
    "local_update",
    "aggregate_ideal",
    "aggregate_with_losses",
    "aggregation_error",
    "run_fl",
]


@dataclass(frozen=True)
class Dataset:
    """Training samples held by one follower."""

    features: np.ndarray  # (count, dim)
    labels: np.ndarray  # (count,)
    owner: int

    @property
    def count(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def __post_init__(self):
        if self.features.ndim != 2:
            raise ValueError("features must be a 2-d array")
        if self.labels.shape != (self.features.shape[0],):
            raise ValueError("labels must be 1-d with one entry per feature row")


class LossModel(ABC):
    """Loss landscape shared by the swarm.

    Per-follower gradients are unnormalized sums over the follower's
    samples; the global loss carries the 1/N factor.  Subclasses expose the
    curvature constants (strong convexity mu, smoothness lipschitz_u), the
    optimum, and the gradient-diversity constants (zeta1, zeta2) used only
    by diagnostic bounds.
    """

    counts: np.ndarray  # (I,) samples per follower
    dim: int
    strong_mu: float
    lipschitz_u: float
    zeta1: float
    zeta2: float
    w_star: np.ndarray
    f_star: float

    @property
    def n_followers(self) -> int:
        return len(self.counts)

    @property
    def n_total(self) -> int:
        return int(self.counts.sum())

    @abstractmethod
    def sample_loss(self, w: np.ndarray, x: np.ndarray, y: float) -> float:
        """Loss of one sample at parameters w."""

    @abstractmethod
    def follower_loss_sum(self, i: int, w: np.ndarray) -> float:
        """Sum of sample losses of follower i at w."""

    @abstractmethod
    def follower_grad_sum(self, i: int, w: np.ndarray) -> np.ndarray:
        """Sum of sample gradients of follower i at w."""

    def total_loss_sum(self, w: np.ndarray) -> float:
        return sum(self.follower_loss_sum(i, w) for i in range(self.n_followers))

    def global_loss(self, w: np.ndarray) -> float:
        """F(w): mean loss over all samples of all followers."""
        return self.total_loss_sum(w) / self.n_total

    def global_grad(self, w: np.ndarray) -> np.ndarray:
        """Gradient of the mean loss F."""
        grads = sum(self.follower_grad_sum(i, w) for i in range(self.n_followers))
        return grads / self.n_total


class QuadraticLossModel(LossModel):
    """Linear regression with squared error, all moments precomputed.

    The per-follower gradient sum is affine, grad_i(w) = A_i w - b_i with
    A_i = 2 X_i^T X_i and b_i = 2 X_i^T y_i, so curvature constants come
    from the eigenvalues of the pooled mean Hessian H = sum(A_i)/N.
    """

    def __init__(self, datasets: list[Dataset], *, zeta_seed: int = 0, w0: np.ndarray | None = None):
        if not datasets:
            raise ValueError("need at least one dataset")
        dims = {d.dim for d in datasets}
        if len(dims) != 1:
            raise ValueError("all followers must share the feature dimension")
        self.datasets = list(datasets)
        self.dim = dims.pop()
        self.counts = np.array([d.count for d in datasets], dtype=int)
        self._a = [2.0 * d.features.T @ d.features for d in datasets]
        self._b = [2.0 * d.features.T @ d.labels for d in datasets]
        n = self.n_total
        hessian = sum(self._a) / n
        eigvals = np.linalg.eigvalsh(hessian)
        if eigvals[0] <= 1e-12 * max(eigvals[-1], 1.0):
            raise ValueError("pooled Gram matrix is singular; add samples or reduce dim")
        self.strong_mu = float(eigvals[0])
        self.lipschitz_u = float(eigvals[-1])
        self._hessian = hessian
        self.w_star = np.linalg.solve(hessian, sum(self._b) / n)
        self.f_star = self.global_loss(self.w_star)
        w_ref = np.zeros(self.dim) if w0 is None else np.asarray(w0, dtype=float)
        self.zeta1, self.zeta2 = self._fit_gradient_diversity(w_ref, zeta_seed)

    def sample_loss(self, w: np.ndarray, x: np.ndarray, y: float) -> float:
        r = float(np.dot(w, x) - y)
        return r * r

    def follower_loss_sum(self, i: int, w: np.ndarray) -> float:
        d = self.datasets[i]
        r = d.features @ w - d.labels
        return float(r @ r)

    def follower_grad_sum(self, i: int, w: np.ndarray) -> np.ndarray:
        return self._a[i] @ w - self._b[i]

    def hessian(self) -> np.ndarray:
        """Mean Hessian of F (constant for quadratics)."""
        return self._hessian.copy()

    def _fit_gradient_diversity(self, w0: np.ndarray, seed: int) -> tuple[float, float]:
        """Smallest (zeta1, zeta2) with max_i |grad_i|^2 <= zeta1 + zeta2 |grad F|^2
        on a sample of points around the optimum.

        Points are drawn uniformly from the ball of radius 3 |w0 - w*|
        centered at w*; the optimum itself is included so the intercept
        covers the residual gradient diversity there.  zeta2 >= 1 and
        zeta1 >= 0 by construction.
        """
        rng = np.random.default_rng(seed)
        radius = 3.0 * float(np.linalg.norm(w0 - self.w_star))
        if radius == 0.0:
            radius = 1.0
        n_pts = 1000
        directions = rng.standard_normal((n_pts, self.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = radius * rng.random(n_pts) ** (1.0 / self.dim)
        points = self.w_star + directions * radii[:, None]
        points = np.vstack([points, self.w_star])

        max_sq = np.empty(len(points))
        glob_sq = np.empty(len(points))
        for s, w in enumerate(points):
            per = [self.follower_grad_sum(i, w) for i in range(self.n_followers)]
            max_sq[s] = max(float(g @ g) for g in per)
            g_glob = self.global_grad(w)
            glob_sq[s] = float(g_glob @ g_glob)
        grads_opt = [self.follower_grad_sum(i, self.w_star) for i in range(self.n_followers)]
        at_opt = max(float(g @ g) for g in grads_opt)
        pos = glob_sq > 1e-18
        zeta2 = max(1.0, float(np.max((max_sq[pos] - at_opt) / glob_sq[pos])))
        zeta1 = max(at_opt, float(np.max(max_sq - zeta2 * glob_sq)))
        return max(zeta1, 0.0), zeta2


def make_regression_problem(
    n_followers: int,
    samples_per: int,
    dim: int,
    rng_seed: int,
    *,
    noise_std: float = 0.0,
    feature_scales=None,
    nuisance_dims: int = 0,
    signal_scale: float = 1.0,
    owner_emphasis: float | None = None,
    nuisance_scale: float = 1.0,
    exact_second_moments: bool = False,
    w_scale: float = 1.0,
) -> tuple[list[Dataset], QuadraticLossModel]:
    """Synthetic linear-regression problem split across followers.

    Plain call: iid standard normal features (optionally scaled per
    coordinate by feature_scales) and a random unit ground-truth vector.

    With owner_emphasis set, the feature space splits into nuisance_dims
    shared coordinates (scale nuisance_scale, zero ground-truth weight) and
    dim - nuisance_dims signal coordinates assigned round-robin to
    followers: the owner draws that coordinate at signal_scale, everyone
    else at owner_emphasis * signal_scale, and the ground-truth weight is
    w_scale.  This concentrates each signal direction's curvature on one
    follower, so link failures of that follower throttle exactly that
    direction of progress.

    exact_second_moments rescales the pooled feature matrix so its second
    moment matrix equals the target exactly, which pins the loss curvature
    constants to their design values instead of leaving sampling noise in
    them.  Labels are produced after the rescaling, so the ground truth
    stays the exact minimizer and the optimal loss stays noise-only.
    """
    if samples_per < dim:
        raise ValueError("need samples_per >= dim for a nonsingular pooled Gram matrix")
    if feature_scales is not None and owner_emphasis is not None:
        raise ValueError("feature_scales and owner_emphasis are mutually exclusive")
    rng = np.random.default_rng(rng_seed)
    n_total = n_followers * samples_per

    if owner_emphasis is None:
        scales = np.ones(dim) if feature_scales is None else np.asarray(feature_scales, dtype=float)
        if scales.shape != (dim,):
            raise ValueError(f"feature_scales must have shape ({dim},)")
        scale_rows = np.tile(scales, (n_total, 1))
        w_true = rng.standard_normal(dim)
        w_true /= np.linalg.norm(w_true)
        target_moments = scales**2
    else:
        n_signal = dim - nuisance_dims
        if n_signal < 1:
            raise ValueError("need at least one signal coordinate")
        scale_rows = np.empty((n_total, dim))
        scale_rows[:, :nuisance_dims] = nuisance_scale
        owners = np.arange(n_signal) % n_followers
        for i in range(n_followers):
            block = slice(i * samples_per, (i + 1) * samples_per)
            sig = np.where(owners == i, signal_scale, owner_emphasis * signal_scale)
            scale_rows[block, nuisance_dims:] = sig
        w_true = np.concatenate([np.zeros(nuisance_dims), np.full(n_signal, w_scale)])
        owner_count = np.bincount(owners, minlength=n_followers).astype(float)[owners]
        mean_sq = (
            owner_count * signal_scale**2
            + (n_followers - owner_count) * (owner_emphasis * signal_scale) ** 2
        ) / n_followers
        target_moments = np.concatenate([np.full(nuisance_dims, nuisance_scale**2), mean_sq])

    x = rng.standard_normal((n_total, dim)) * scale_rows
    if exact_second_moments:
        moment = x.T @ x / n_total
        vals, vecs = np.linalg.eigh(moment)
        if vals[0] <= 1e-12 * vals[-1]:
            raise ValueError("pooled feature matrix is rank deficient; increase samples_per")
        inv_sqrt = vecs @ np.diag(vals**-0.5) @ vecs.T
        x = x @ inv_sqrt * np.sqrt(target_moments)

    y = x @ w_true
    if noise_std > 0.0:
        y = y + noise_std * rng.standard_normal(n_total)

    datasets = [
        Dataset(
            features=x[i * samples_per : (i + 1) * samples_per],
            labels=y[i * samples_per : (i + 1) * samples_per],
            owner=i,
        )
        for i in range(n_followers)
    ]
    zeta_seed = int(np.random.SeedSequence([rng_seed, 0x5EED]).generate_state(1)[0])
    return datasets, QuadraticLossModel(datasets, zeta_seed=zeta_seed)


@dataclass
class FlState:
    """Mutable state of one federated training run."""

    global_w: np.ndarray
    local_w: np.ndarray  # (I, dim) latest local updates
    last_received: np.ndarray  # (I, dim) newest global model each follower holds
    round: int = 0
    loss_history: list[float] = field(default_factory=list)
    participation_history: list[np.ndarray] = field(default_factory=list)


def local_update(state: FlState, i: int, loss: LossModel, lr: float) -> np.ndarray:
    """One local gradient step of follower i from its newest received model."""
    if lr <= 0.0:
        raise ValueError("lr must be > 0")
    w_ref = state.last_received[i]
    return w_ref - (lr / loss.counts[i]) * loss.follower_grad_sum(i, w_ref)


def aggregate_ideal(local_ws, counts) -> np.ndarray:
    """Count-weighted mean of all local models."""
    ws = np.asarray(local_ws, dtype=float)
    n = np.asarray(counts, dtype=float)
    if len(ws) == 0:
        raise ValueError("need at least one follower")
    return (n[:, None] * ws).sum(axis=0) / n.sum()


def aggregate_with_losses(local_ws, counts, participation, previous_global) -> np.ndarray:
    """Count-weighted mean over participating followers.

    A round where nobody participates keeps the previous global model (the
    weighted average would be 0/0).
    """
    mask = np.asarray(participation, dtype=bool)
    if not mask.any():
        return np.asarray(previous_global, dtype=float).copy()
    ws = np.asarray(local_ws, dtype=float)
    n = np.asarray(counts, dtype=float) * mask
    return (n[:, None] * ws).sum(axis=0) / n.sum()


def aggregation_error(loss: LossModel, local_grads, w: np.ndarray, participation) -> np.ndarray:
    """Difference between the lossy aggregate gradient and the true gradient.

    local_grads[i] is follower i's mean local gradient (grad sum / count) at
    its reference point; the lossy aggregate is their count-weighted mean
    over participants.  With no participants the aggregate step is zero, so
    the error is exactly minus the true gradient.
    """
    mask = np.asarray(participation, dtype=bool)
    grad = loss.global_grad(w)
    if not mask.any():
        return -grad
    g = np.asarray(local_grads, dtype=float)
    n = loss.counts.astype(float) * mask
    agg = (n[:, None] * g).sum(axis=0) / n.sum()
    return agg - grad


def run_fl(
    scenario: "SwarmScenario",
    design: "DesignVector",
    loss: LossModel,
    datasets: list[Dataset],
    max_rounds: int,
    epsilon: float,
    rng_seed: int,
    *,
    lr: float | None = None,
    stale_models: bool = True,
    w0: np.ndarray | None = None,
) -> tuple[FlState, int | None]:
    """Run federated rounds until the loss gap F(w) - F(w*) falls below epsilon.

    Channel realizations for all rounds are drawn up front from rng_seed, so
    trajectories with the same seed are coupled draw-for-draw across
    scenarios that differ only in jitter variance or bandwidth, and an early
    stop never shifts later draws.  Returns the final state and the first
    round index whose recorded loss meets the target (None if max_rounds
    was exhausted first).  lr defaults to 1/lipschitz_u; stale_models=False
    is an idealized ablation where every follower always receives the
    broadcast even in rounds it does not contribute to.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be > 0")
    if max_rounds < 0:
        raise ValueError("max_rounds must be >= 0")
    step = 1.0 / loss.lipschitz_u if lr is None else float(lr)
    if step <= 0.0:
        raise ValueError("lr must be > 0")

    dim = loss.dim
    start = np.zeros(dim) if w0 is None else np.asarray(w0, dtype=float).copy()
    state = FlState(
        global_w=start.copy(),
        local_w=np.tile(start, (loss.n_followers, 1)),
        last_received=np.tile(start, (loss.n_followers, 1)),
    )
    f_start = loss.global_loss(state.global_w)
    state.loss_history.append(f_start)
    if f_start - loss.f_star <= epsilon:
        return state, 0
    if max_rounds == 0:
        return state, None

    rng = np.random.default_rng(rng_seed)
    draws = draw_channel(scenario, rng, size=max_rounds)
    t_up, t_dn = link_delays(draws, design, scenario)
    ok = success_mask(t_up, t_dn, design.beta, scenario.round_time_s)

    empirical_round = None
    for t in range(1, max_rounds + 1):
        for i in range(loss.n_followers):
            state.local_w[i] = local_update(state, i, loss, step)
        participation = ok[t - 1]
        state.global_w = aggregate_with_losses(
            state.local_w, loss.counts, participation, state.global_w
        )
        if stale_models:
            state.last_received[participation] = state.global_w
        else:
            state.last_received[:] = state.global_w
        state.round = t
        state.participation_history.append(participation.copy())
        f_now = loss.global_loss(state.global_w)
        state.loss_history.append(f_now)
        if f_now - loss.f_star <= epsilon:
            empirical_round = t
            break
    return state, empirical_round
