"""Payoff-based learning of the variational equilibrium.

Each primal player keeps a running mean, samples its action from a Gaussian
centered there, and observes only realized cost values (its Lagrangian cost
at the sampled and at the mean joint action) plus the realized constraint
values. A two-point difference of the observed costs yields an unbiased
estimate of the smoothed pseudo-gradient, which drives a primal-dual update
with a vanishing Tikhonov term on the dual block. No gradients and no
constraint data cross the feedback boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .games import GameSpec, JointAction, QuadraticGame
from .schedules import ScheduleError, ScheduleReport, Schedules, validate_schedules

__all__ = [
    "Feedback",
    "PayoffEnvironment",
    "LearnerState",
    "TrajectoryRecord",
    "Schedules",
    "ScheduleReport",
    "ScheduleError",
    "validate_schedules",
    "sample_action",
    "two_point_estimate",
    "step",
    "run",
    "checkpoints",
]


@dataclass(frozen=True)
class Feedback:
    """Values revealed to the players at one iteration.

    u_at_a[i] and u_at_mu[i] are player i's Lagrangian cost at the sampled
    and at the mean joint action; g_at_a is the constraint value at the
    sampled action. These opaque scalars are the only information that
    crosses from the game to the learner.
    """

    u_at_a: np.ndarray
    u_at_mu: np.ndarray
    g_at_a: np.ndarray


class PayoffEnvironment:
    """Payoff-only view of a game; produces Feedback for query points."""

    def __init__(self, game: GameSpec):
        self._game = game
        self._K = game.constraints.K
        self._l = game.constraints.l
        self.num_players = game.num_players
        self.dim = game.D

    def feedback(self, a, mu, lam) -> Feedback:
        """Evaluate both queries of every player and the realized constraints."""
        X = np.empty((2, self.dim))
        X[0] = a
        X[1] = mu
        J = self._game._costs_batch_unchecked(X)  # (2, N)
        gX = X @ self._K.T - self._l  # (2, n)
        lam_term = gX @ lam
        return Feedback(
            u_at_a=J[0] + lam_term[0],
            u_at_mu=J[1] + lam_term[1],
            g_at_a=gX[0],
        )


@dataclass
class LearnerState:
    """Current means, dual variable, iteration counter, and RNG stream."""

    mu: JointAction
    lam: np.ndarray
    t: int
    rng: np.random.Generator

    def __post_init__(self):
        self.lam = np.asarray(self.lam, dtype=float).reshape(-1)
        if np.any(self.lam < 0):
            raise ValueError("dual variable must be componentwise nonnegative")


def sample_action(state: LearnerState, sigma: float) -> JointAction:
    """Draw every player's action from N(mu^i, sigma^2 I), advancing the RNG."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    mu = state.mu.flat
    draw = mu + sigma * state.rng.standard_normal(mu.shape[0])
    return JointAction(draw, state.mu.dims)


def two_point_estimate(u_at_a: float, u_at_mu: float, a_i, mu_i, sigma: float) -> np.ndarray:
    """Gradient estimate (u_at_a - u_at_mu) * (a_i - mu_i) / sigma^2."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a_i = np.asarray(a_i, dtype=float)
    mu_i = np.asarray(mu_i, dtype=float)
    if a_i.shape != mu_i.shape:
        raise ValueError(f"a_i and mu_i must have equal shapes, got {a_i.shape} vs {mu_i.shape}")
    return (u_at_a - u_at_mu) * (a_i - mu_i) / (sigma * sigma)


def step(state: LearnerState, action: JointAction, feedback: Feedback,
         sched: Schedules) -> LearnerState:
    """One primal-dual update from the feedback of the current iteration.

    The action must be the one sampled around state.mu at this iteration;
    it is the player-local half of the two-point estimator. Returns the new
    state with the counter advanced; the dual stays in the nonnegative
    orthant by projection.
    """
    t = state.t
    gamma = sched.gamma(t)
    eps = sched.eps(t)
    sigma = sched.sigma(t)
    mu = state.mu.flat
    a = action.flat
    m = np.empty(mu.shape[0])
    for i, sl in enumerate(state.mu._slices):
        m[sl] = two_point_estimate(
            feedback.u_at_a[i], feedback.u_at_mu[i], a[sl], mu[sl], sigma
        )
    mu_new = mu - gamma * m
    lam_new = np.maximum(state.lam - gamma * (eps * state.lam - feedback.g_at_a), 0.0)
    return LearnerState(JointAction(mu_new, state.mu.dims), lam_new, t + 1, state.rng)


def checkpoints(T: int, record_every) -> np.ndarray:
    """Iterations at which metrics are recorded.

    An integer k records every k-th step (plus the final one); the default
    "log" cadence uses about 200 log-spaced steps, always including the
    first step, the powers of ten, and the final step.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    if record_every == "log":
        pts = np.geomspace(1, T, num=min(T, 200))
        decades = 10 ** np.arange(0, int(np.floor(np.log10(T))) + 1)
        ts = np.unique(np.concatenate([
            np.round(pts).astype(np.int64),
            decades.astype(np.int64),
            [1, T],
        ]))
    else:
        k = int(record_every)
        if k < 1:
            raise ValueError(f"record_every must be >= 1, got {record_every}")
        ts = np.unique(np.concatenate([np.arange(k, T + 1, k, dtype=np.int64),
                                       [T]]))
    return ts[(ts >= 1) & (ts <= T)]


@dataclass
class TrajectoryRecord:
    """Recorded metrics of one seeded run.

    Row j holds the state after completing iteration t[j]: the squared
    distances of the means and of the dual to the reference solution, and
    the schedule values used at that iteration.
    """

    seed: int
    t: np.ndarray
    err_primal_sq: np.ndarray
    err_dual_sq: np.ndarray
    gamma: np.ndarray
    eps: np.ndarray
    sigma: np.ndarray
    final_mu: np.ndarray
    final_lam: np.ndarray
    schedules: Schedules
    game_name: str = ""
    extras: dict = field(default_factory=dict)


def _resolve_reference(game: GameSpec, reference):
    if reference is None:
        if isinstance(game, QuadraticGame):
            from .oracles import solve_vgne

            sol = solve_vgne(game)
            return sol.primal.flat, sol.dual
        return None
    if hasattr(reference, "primal"):
        return np.asarray(reference.primal.flat, dtype=float), np.asarray(reference.dual, dtype=float)
    a_ref, lam_ref = reference
    return np.asarray(a_ref, dtype=float).reshape(-1), np.asarray(lam_ref, dtype=float).reshape(-1)


def run(
    game: GameSpec,
    sched: Schedules,
    T: int,
    seed: int,
    record_every="log",
    mu0=None,
    lam0=None,
    allow_invalid_schedules: bool = False,
    reference=None,
) -> TrajectoryRecord:
    """Run the payoff-based iteration for T steps with a seeded RNG stream.

    The loop touches the game only through a PayoffEnvironment: per step it
    samples one joint action, obtains the two cost values per player and the
    realized constraint values, and applies the primal-dual update. The
    reference solution (computed by the exact oracle for quadratic games, or
    supplied explicitly) is used only to record error metrics.

    Raises ScheduleError when the schedule exponents are invalid, unless
    allow_invalid_schedules is set.
    """
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    report = validate_schedules(sched)
    if not report.valid and not allow_invalid_schedules:
        raise ScheduleError(
            "schedules violate validity conditions: " + ", ".join(report.failing())
        )

    ref = _resolve_reference(game, reference)
    if ref is None:
        a_ref = np.full(game.D, np.nan)
        lam_ref = np.full(game.constraints.num_constraints, np.nan)
    else:
        a_ref, lam_ref = ref

    env = PayoffEnvironment(game)
    D = game.D
    dims = game.dims
    block_of = np.repeat(np.arange(game.num_players), dims)
    rng = np.random.default_rng(seed)
    mu = np.zeros(D) if mu0 is None else np.asarray(mu0, dtype=float).reshape(-1).copy()
    lam = (np.zeros(env._K.shape[0]) if lam0 is None
           else np.asarray(lam0, dtype=float).reshape(-1).copy())
    if np.any(lam < 0):
        raise ValueError("lam0 must be componentwise nonnegative")

    grid = checkpoints(T, record_every)
    grid_pos = 0
    rows_t, rows_ep, rows_ed, rows_g, rows_e, rows_s = [], [], [], [], [], []

    for t in range(1, T + 1):
        gamma = sched.gamma(t)
        eps = sched.eps(t)
        sigma = sched.sigma(t)
        a = mu + sigma * rng.standard_normal(D)
        fb = env.feedback(a, mu, lam)
        du = fb.u_at_a - fb.u_at_mu
        m = du[block_of] * (a - mu) / (sigma * sigma)
        mu = mu - gamma * m
        lam = np.maximum(lam - gamma * (eps * lam - fb.g_at_a), 0.0)
        if grid_pos < len(grid) and t == grid[grid_pos]:
            d_mu = mu - a_ref
            d_lam = lam - lam_ref
            rows_t.append(t)
            rows_ep.append(float(d_mu @ d_mu))
            rows_ed.append(float(d_lam @ d_lam))
            rows_g.append(gamma)
            rows_e.append(eps)
            rows_s.append(sigma)
            grid_pos += 1

    return TrajectoryRecord(
        seed=seed,
        t=np.asarray(rows_t, dtype=np.int64),
        err_primal_sq=np.asarray(rows_ep),
        err_dual_sq=np.asarray(rows_ed),
        gamma=np.asarray(rows_g),
        eps=np.asarray(rows_e),
        sigma=np.asarray(rows_s),
        final_mu=mu,
        final_lam=lam,
        schedules=sched,
        game_name=game.name,
    )
