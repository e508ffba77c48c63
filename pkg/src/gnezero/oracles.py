"""Exact first-order solvers used as ground truth for the learning algorithm.

For quadratic games the variational equilibrium and its Tikhonov-regularized
counterpart are computed to near machine precision by enumerating candidate
active sets of the affine constraints and solving the resulting linear
optimality systems. An extragradient iteration over the extended primal-dual
space serves as an independent cross-check and as the only solver available
for non-quadratic (black-box) costs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .augmented import AugmentedPoint
from .games import GameSpec, JointAction, QuadraticGame

__all__ = [
    "OracleSolution",
    "RegularizedSolution",
    "SolverError",
    "solve_vgne",
    "solve_regularized_vi",
    "solve_vi_extragradient",
    "first_order_trajectory",
]

MAX_ENUMERATED_CONSTRAINTS = 20


class SolverError(RuntimeError):
    """The oracle could not produce a solution satisfying its optimality checks."""


@dataclass(frozen=True)
class OracleSolution:
    """Variational equilibrium with multipliers and optimality residuals."""

    primal: JointAction
    dual: np.ndarray
    active_set: tuple[int, ...]
    stationarity_residual: float
    complementarity_residual: float

    @property
    def dual_norm(self) -> float:
        return float(np.linalg.norm(self.dual))


@dataclass(frozen=True)
class RegularizedSolution:
    """Solution of the regularized variational problem at a fixed epsilon."""

    primal: JointAction
    dual: np.ndarray
    epsilon: float
    active_set: tuple[int, ...]
    stationarity_residual: float
    complementarity_residual: float


def _require_quadratic(game: GameSpec, who: str) -> QuadraticGame:
    if not isinstance(game, QuadraticGame):
        raise TypeError(
            f"{who} needs a QuadraticGame; for black-box costs use "
            "solve_vi_extragradient, which carries an iteration tolerance"
        )
    return game


def _guard_enumeration(n: int):
    if n > MAX_ENUMERATED_CONSTRAINTS:
        raise SolverError(
            f"active-set enumeration limited to {MAX_ENUMERATED_CONSTRAINTS} "
            f"constraints, got {n}"
        )


def _residuals(game: QuadraticGame, a: np.ndarray, lam: np.ndarray) -> tuple[float, float]:
    K = game.constraints.K
    stat = float(np.linalg.norm(game.P @ a + game.q + K.T @ lam))
    comp = float(np.max(np.abs(lam * game.constraints.value(a)))) if lam.size else 0.0
    return stat, comp


def solve_vgne(game: QuadraticGame, tol: float = 1e-10) -> OracleSolution:
    """Exact variational equilibrium of a quadratic game via active-set enumeration.

    For each candidate active set the saddle system
        [P  K_A'] [a    ]   [-q ]
        [K_A  0 ] [lam_A] = [l_A]
    is solved; a candidate is accepted if its multipliers are nonnegative and
    the inactive constraints are satisfied. The primal part is unique; among
    multiplier solutions the one of minimal norm is returned.
    """
    game = _require_quadratic(game, "solve_vgne")
    K, l = game.constraints.K, game.constraints.l
    n, D = K.shape[0], game.D
    _guard_enumeration(n)
    P, q = game.P, game.q
    scale = 1.0 + float(np.linalg.norm(q)) + float(np.linalg.norm(l))
    check_tol = 1e-9 * scale

    candidates = []
    for size in range(n + 1):
        for active in itertools.combinations(range(n), size):
            active = tuple(active)
            K_A = K[list(active)]
            k = len(active)
            sys = np.zeros((D + k, D + k))
            sys[:D, :D] = P
            sys[:D, D:] = K_A.T
            sys[D:, :D] = K_A
            rhs = np.concatenate([-q, l[list(active)]])
            sol, *_ = np.linalg.lstsq(sys, rhs, rcond=None)
            if np.linalg.norm(sys @ sol - rhs) > check_tol:
                continue  # active set is inconsistent (e.g. dependent rows)
            a = sol[:D]
            # minimal-norm multipliers supported on the active set
            lam = np.zeros(n)
            if k:
                lam_A, *_ = np.linalg.lstsq(K_A.T, -(P @ a + q), rcond=None)
                if np.linalg.norm(K_A.T @ lam_A + P @ a + q) > check_tol:
                    continue
                if np.any(lam_A < -check_tol):
                    continue
                lam[list(active)] = np.maximum(lam_A, 0.0)
            else:
                if np.linalg.norm(P @ a + q) > check_tol:
                    continue
            if np.any(game.constraints.value(a) > check_tol):
                continue
            candidates.append((a, lam, active))

    if not candidates:
        raise SolverError(
            "no active set satisfies the optimality conditions; the game may "
            "violate feasibility or strong monotonicity"
        )
    a, lam, active = min(candidates, key=lambda c: float(np.linalg.norm(c[1])))
    stat, comp = _residuals(game, a, lam)
    if stat > tol or comp > tol:
        raise SolverError(
            f"optimality residuals exceed tol={tol:g}: stationarity {stat:.3e}, "
            f"complementarity {comp:.3e}"
        )
    return OracleSolution(
        primal=JointAction(a, game.dims),
        dual=lam,
        active_set=active,
        stationarity_residual=stat,
        complementarity_residual=comp,
    )


def solve_regularized_vi(game: QuadraticGame, eps: float, tol: float = 1e-10) -> RegularizedSolution:
    """Unique solution of the Tikhonov-regularized variational problem.

    On the candidate active set A the optimality system is the saddle form
        [P    K_A'   ] [a    ]   [-q ]
        [K_A  -eps I ] [lam_A] = [l_A]
    (the second row encodes (K a - l)_j = eps lam_j for active j), solved
    with one step of iterative refinement to keep residuals near machine
    precision even for tiny eps.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    game = _require_quadratic(game, "solve_regularized_vi")
    K, l = game.constraints.K, game.constraints.l
    n, D = K.shape[0], game.D
    _guard_enumeration(n)
    P, q = game.P, game.q
    scale = 1.0 + float(np.linalg.norm(q)) + float(np.linalg.norm(l))
    check_tol = 1e-9 * scale

    candidates = []
    for size in range(n + 1):
        for active in itertools.combinations(range(n), size):
            K_A = K[list(active)]
            l_A = l[list(active)]
            k = len(active)
            sys = np.zeros((D + k, D + k))
            sys[:D, :D] = P
            sys[:D, D:] = K_A.T
            sys[D:, :D] = K_A
            sys[D:, D:] = -eps * np.eye(k)
            rhs = np.concatenate([-q, l_A])
            try:
                sol = np.linalg.solve(sys, rhs)
                sol += np.linalg.solve(sys, rhs - sys @ sol)  # refinement
            except np.linalg.LinAlgError:
                continue
            a = sol[:D]
            g = game.constraints.value(a)
            lam = np.zeros(n)
            if k:
                lam_A = sol[D:]
                if np.any(lam_A < -check_tol):
                    continue
                lam[list(active)] = np.maximum(lam_A, 0.0)
            inactive = [j for j in range(n) if j not in active]
            if inactive and np.any(g[inactive] > check_tol):
                continue
            candidates.append((a, lam, tuple(active)))

    if not candidates:
        raise SolverError("no active set satisfies the regularized optimality conditions")
    a, lam, active = min(candidates, key=lambda c: float(np.linalg.norm(c[1])))
    K = game.constraints.K
    stat = float(np.linalg.norm(game.P @ a + game.q + K.T @ lam))
    # complementarity against the shifted constraint value (K a - l) - eps lam
    comp_vec = lam * (game.constraints.value(a) - eps * lam)
    comp = float(np.max(np.abs(comp_vec))) if lam.size else 0.0
    if stat > tol or comp > tol:
        raise SolverError(
            f"regularized residuals exceed tol={tol:g}: stationarity {stat:.3e}, "
            f"complementarity {comp:.3e}"
        )
    return RegularizedSolution(
        primal=JointAction(a, game.dims),
        dual=lam,
        epsilon=eps,
        active_set=active,
        stationarity_residual=stat,
        complementarity_residual=comp,
    )


def solve_vi_extragradient(
    game: GameSpec,
    eps: float,
    tol: float = 1e-8,
    max_iter: int = 200_000,
    z0: AugmentedPoint | None = None,
) -> RegularizedSolution:
    """Extragradient iteration for the regularized problem on any game.

    Works from pseudo-gradient evaluations only, so it also covers black-box
    and non-quadratic games; accuracy is the iteration tolerance, not machine
    precision. Step size 1 / (2 (L + ||K|| + eps)) with L the (possibly
    probed) Lipschitz constant of the pseudo-gradient.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    K, l = game.constraints.K, game.constraints.l
    D, n = game.D, K.shape[0]
    norm_K = float(np.linalg.norm(K, 2))
    tau = 1.0 / (2.0 * (game.lipschitz() + norm_K + eps))

    if z0 is None:
        a = np.zeros(D)
        lam = np.zeros(n)
    else:
        a, lam = z0.a.copy(), np.maximum(z0.lam, 0.0)

    def operator(a_cur, lam_cur):
        primal = game.pseudo_gradient(a_cur) + K.T @ lam_cur
        dual = -(K @ a_cur) + l + eps * lam_cur
        return primal, dual

    residual = np.inf
    for _ in range(max_iter):
        fp, fd = operator(a, lam)
        a_half = a - tau * fp
        lam_half = np.maximum(lam - tau * fd, 0.0)
        residual = float(np.linalg.norm(a - a_half) + np.linalg.norm(lam - lam_half))
        if residual <= tol * tau:
            break
        fp_h, fd_h = operator(a_half, lam_half)
        a = a - tau * fp_h
        lam = np.maximum(lam - tau * fd_h, 0.0)
    else:
        raise SolverError(
            f"extragradient did not reach tolerance {tol:g} within {max_iter} "
            f"iterations (residual {residual:.3e})"
        )

    g = game.constraints.value(a)
    active = tuple(int(j) for j in range(n) if lam[j] > tol)
    stat = float(np.linalg.norm(game.pseudo_gradient(a) + K.T @ lam))
    comp = float(np.max(np.abs(lam * (g - eps * lam)))) if n else 0.0
    return RegularizedSolution(
        primal=JointAction(a, game.dims),
        dual=lam,
        epsilon=eps,
        active_set=active,
        stationarity_residual=stat,
        complementarity_residual=comp,
    )


def first_order_trajectory(
    game: GameSpec,
    sched,
    T: int,
    z0: AugmentedPoint | None = None,
    record_every: int = 1,
) -> list[AugmentedPoint]:
    """Exact-gradient analogue of the payoff-based iteration, for baselines.

    Runs the same primal-dual update skeleton with the true extended
    pseudo-gradient in place of the sampled estimate and without any action
    sampling. Returns the recorded points, always including the initial and
    final ones; with T = 0 the trajectory is just the initial point.
    """
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    K, l = game.constraints.K, game.constraints.l
    mu = np.zeros(game.D) if z0 is None else z0.a.copy()
    lam = np.zeros(K.shape[0]) if z0 is None else np.maximum(z0.lam, 0.0)
    out = [AugmentedPoint(mu.copy(), lam.copy())]
    for t in range(1, T + 1):
        gamma = sched.gamma(t)
        eps = sched.eps(t)
        # simultaneous update: both blocks read the same current point
        primal_step = game.pseudo_gradient(mu) + K.T @ lam
        dual_step = -(K @ mu) + l + eps * lam
        mu = mu - gamma * primal_step
        lam = np.maximum(lam - gamma * dual_step, 0.0)
        if t % record_every == 0 or t == T:
            out.append(AugmentedPoint(mu.copy(), lam.copy()))
    return out
