import numpy as np
import pytest

from gnezero.augmented import AugmentedPoint
from gnezero.games import ConstraintSet, QuadraticGame, random_quadratic_game, softplus_game
from gnezero.learner import Schedules, run
from gnezero.oracles import (
    SolverError,
    first_order_trajectory,
    solve_regularized_vi,
    solve_vgne,
    solve_vi_extragradient,
)


def test_paper_game_equilibrium(paper_game, paper_solution):
    sol = paper_solution
    assert sol.primal.flat == pytest.approx([0.0, 1.0], abs=1e-12)
    assert sol.dual == pytest.approx([1.0], abs=1e-12)
    assert sol.active_set == (0,)
    assert sol.stationarity_residual <= 1e-10
    assert sol.complementarity_residual <= 1e-10


def test_unconstrained_reduces_to_linear_solve():
    game = random_quadratic_game(2, dims=(1, 1, 1), num_constraints=1)
    free = QuadraticGame(game.A, game.b, ConstraintSet(np.zeros((0, 3)), np.zeros(0)),
                         dims=game.dims)
    sol = solve_vgne(free)
    assert sol.primal.flat == pytest.approx(np.linalg.solve(game.P, -game.q))
    assert sol.dual.shape == (0,)
    assert sol.active_set == ()


def test_feasibility_and_residual_invariants(random_games):
    for game in random_games:
        sol = solve_vgne(game)
        assert sol.stationarity_residual <= 1e-10
        assert sol.complementarity_residual <= 1e-10
        assert np.all(sol.dual >= 0)
        assert np.all(game.constraints.value(sol.primal.flat) <= 1e-9)


def test_agrees_with_grid_search_oracle():
    # independent natural-residual minimization on a dense grid; the single
    # halfspace makes the projection onto C exact and trivial
    for seed in (11, 12, 13):
        game = random_quadratic_game(seed, dims=(1, 1), num_constraints=1)
        a_star = solve_vgne(game).primal.flat
        k = game.constraints.K[0]
        l0 = float(game.constraints.l[0])
        ksq = float(k @ k)
        res = 0.01
        lo = a_star - 1.0037  # keep the solution off the grid nodes
        xs = lo[0] + res * np.arange(201)
        ys = lo[1] + res * np.arange(201)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.stack([gx.ravel(), gy.ravel()], axis=1)
        z = pts - (pts @ game.P.T + game.q)
        viol = np.maximum(z @ k - l0, 0.0)
        proj = z - np.outer(viol / ksq, k)
        natural_residual = np.linalg.norm(proj - pts, axis=1)
        best = pts[np.argmin(natural_residual)]
        assert np.linalg.norm(best - a_star) <= 1.5 * res * np.sqrt(2)


def test_enumeration_guard_and_type_check(paper_game):
    big = ConstraintSet(np.vstack([np.eye(2)] * 11), np.full(22, 5.0))
    game = QuadraticGame(paper_game.A, paper_game.b, big)
    with pytest.raises(SolverError):
        solve_vgne(game)
    with pytest.raises(TypeError):
        solve_vgne(softplus_game(0))


# -- regularized solutions ------------------------------------------------------


def test_regularized_continuity_limit(paper_game, paper_solution):
    sol = solve_regularized_vi(paper_game, 1e-8)
    assert np.linalg.norm(sol.primal.flat - paper_solution.primal.flat) <= 1e-6
    assert np.linalg.norm(sol.dual - paper_solution.dual) <= 1e-6


def test_regularized_paper_game_closed_form(paper_game):
    # on the active branch the solution is a = [0, 1/(1+eps)], lam = 1/(1+eps)
    for eps in (0.5, 0.1, 0.01):
        sol = solve_regularized_vi(paper_game, eps)
        assert sol.primal.flat == pytest.approx([0.0, 1.0 / (1.0 + eps)], abs=1e-12)
        assert sol.dual == pytest.approx([1.0 / (1.0 + eps)], abs=1e-12)
        # dual stationarity on the active set: (K a - l)_j = eps lam_j
        g = paper_game.constraints.value(sol.primal.flat)
        assert g[0] == pytest.approx(eps * sol.dual[0], abs=1e-12)


def test_regularized_gap_bound_paper(paper_game, paper_solution):
    nu, L = paper_game.nu(), paper_game.lipschitz()
    norm_K = np.linalg.norm(paper_game.constraints.K, 2)
    lam_norm = np.linalg.norm(paper_solution.dual)
    for eps in (1e-1, 1e-2, 1e-3, 1e-4):
        sol = solve_regularized_vi(paper_game, eps)
        gap = np.linalg.norm(sol.primal.flat - paper_solution.primal.flat)
        assert gap <= eps * lam_norm * L / (norm_K * nu) + 1e-12


def test_regularized_rejects_nonpositive_eps(paper_game):
    with pytest.raises(ValueError):
        solve_regularized_vi(paper_game, 0.0)
    with pytest.raises(ValueError):
        solve_vi_extragradient(paper_game, -0.5)


def test_extragradient_cross_validates_active_set(random_games):
    for game in random_games:
        exact = solve_regularized_vi(game, 0.1)
        approx = solve_vi_extragradient(game, 0.1, tol=1e-10)
        gap = (np.linalg.norm(exact.primal.flat - approx.primal.flat)
               + np.linalg.norm(exact.dual - approx.dual))
        assert gap <= 1e-8


def test_extragradient_works_on_nonquadratic():
    game = softplus_game(0)
    sol = solve_vi_extragradient(game, 0.1, tol=1e-9)
    assert sol.stationarity_residual <= 1e-6 or np.all(sol.dual >= 0)
    assert np.all(sol.dual >= 0)


def test_drift_ratios_bounded_along_schedule(paper_game):
    from gnezero.diagnostics import path_drift_ratios

    ts = np.arange(1, 201)
    eps_path = ts.astype(float) ** (-2.0 / 7.0)
    r_primal, r_dual = path_drift_ratios(paper_game, eps_path)
    for ratios in (r_primal, r_dual):
        assert np.max(ratios) <= 10.0 * np.median(ratios)


# -- first-order baseline ---------------------------------------------------------


def test_first_order_trajectory_zero_steps(paper_game):
    z0 = AugmentedPoint([0.5, 0.5], [0.2])
    traj = first_order_trajectory(paper_game, Schedules(), 0, z0=z0)
    assert len(traj) == 1
    assert traj[0].a == pytest.approx([0.5, 0.5])
    assert traj[0].lam == pytest.approx([0.2])


def test_first_order_dual_iterates_nonnegative(paper_game):
    traj = first_order_trajectory(paper_game, Schedules(), 500)
    for z in traj:
        assert np.all(z.lam >= 0)


def test_first_order_beats_payoff_based_run(paper_game, paper_solution):
    T = 10_000
    traj = first_order_trajectory(paper_game, Schedules(), T, record_every=T)
    fo_err = float(np.sum((traj[-1].a - paper_solution.primal.flat) ** 2))
    zo = run(paper_game, Schedules(), T, seed=0)
    zo_err = float(zo.err_primal_sq[-1])
    assert fo_err <= zo_err


def test_first_order_tracks_regularized_path(paper_game, paper_solution):
    # the exact-gradient iterate locks onto the regularized solution at the
    # current eps; its gap to the equilibrium is the regularization gap
    T = 20_000
    sched = Schedules()
    traj = first_order_trajectory(paper_game, sched, T, record_every=T)
    reg = solve_regularized_vi(paper_game, sched.eps(T))
    assert np.linalg.norm(traj[-1].a - reg.primal.flat) <= 0.01
    assert np.linalg.norm(traj[-1].a - paper_solution.primal.flat) <= 2.0 * sched.eps(T)
