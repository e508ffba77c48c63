import numpy as np
import pytest

from gnezero.augmented import (
    AugmentedPoint,
    RegularizationState,
    augmented_cost,
    dual_cost,
    extended_pseudo_gradient,
    primal_block,
    regularized_pseudo_gradient,
)
from gnezero.games import DimensionMismatchError, random_quadratic_game

from conftest import central_difference_gradient


def test_augmented_cost_paper_equilibrium(paper_game):
    z = AugmentedPoint([0.0, 1.0], [1.0])
    # J^1(0,1) = 0 and the constraint is exactly active, so the cost is 0
    assert augmented_cost(paper_game, 0, z) == pytest.approx(0.0, abs=1e-14)


def test_augmented_cost_zero_dual_equals_cost(paper_game):
    rng = np.random.default_rng(0)
    for _ in range(5):
        a = rng.normal(size=2)
        z = AugmentedPoint(a, [0.0])
        for i in range(2):
            assert augmented_cost(paper_game, i, z) == pytest.approx(paper_game.cost(i, a))


def test_augmented_cost_matches_summation_oracle():
    game = random_quadratic_game(17)
    rng = np.random.default_rng(1)
    n = game.constraints.num_constraints
    for _ in range(10):
        a = rng.normal(size=game.D)
        lam = np.abs(rng.normal(size=n))
        z = AugmentedPoint(a, lam)
        g = game.constraints.value(a)
        for i in range(game.num_players):
            expected = game.cost(i, a) + sum(lam[j] * g[j] for j in range(n))
            assert augmented_cost(game, i, z) == pytest.approx(expected, rel=1e-12)


def test_dual_cost_cases(paper_game):
    assert dual_cost(paper_game, AugmentedPoint([3.0, -2.0], [0.0])) == 0.0
    assert dual_cost(paper_game, AugmentedPoint([0.0, 1.0], [1.0])) == pytest.approx(0.0, abs=1e-14)


def test_lagrangian_terms_cancel(paper_game):
    # U^i + U^{N+1} = J^i: the multiplier term cancels exactly
    rng = np.random.default_rng(2)
    for _ in range(5):
        z = AugmentedPoint(rng.normal(size=2), np.abs(rng.normal(size=1)))
        for i in range(2):
            total = augmented_cost(paper_game, i, z) + dual_cost(paper_game, z)
            assert total == pytest.approx(paper_game.cost(i, z.a), rel=1e-12)


def test_extended_pseudo_gradient_paper_equilibrium(paper_game):
    # stationarity at the equilibrium: primal block vanishes, constraint active
    w = extended_pseudo_gradient(paper_game, AugmentedPoint([0.0, 1.0], [1.0]))
    assert w == pytest.approx([0.0, 0.0, 0.0], abs=1e-14)


def test_extended_pseudo_gradient_zero_dual(paper_game):
    a = np.array([0.4, -0.7])
    w = extended_pseudo_gradient(paper_game, AugmentedPoint(a, [0.0]))
    assert w[:2] == pytest.approx(paper_game.pseudo_gradient(a))


def test_extended_pseudo_gradient_matches_finite_differences():
    game = random_quadratic_game(23)
    rng = np.random.default_rng(3)
    a = rng.normal(size=game.D)
    lam = np.abs(rng.normal(size=game.constraints.num_constraints))
    w = extended_pseudo_gradient(game, AugmentedPoint(a, lam))
    for i, sl in enumerate(game.slices):
        fd = central_difference_gradient(
            lambda x: augmented_cost(game, i, AugmentedPoint(x, lam)), a)
        assert w[sl] == pytest.approx(fd[sl], rel=1e-5, abs=1e-6)
    fd_dual = central_difference_gradient(
        lambda y: dual_cost(game, AugmentedPoint(a, y)), lam)
    assert w[game.D:] == pytest.approx(fd_dual, rel=1e-5, abs=1e-6)


def test_primal_block_cases(paper_game):
    assert primal_block([0.0, 0.0, 0.0], 2) == pytest.approx([0.0, 0.0])
    w = extended_pseudo_gradient(paper_game, AugmentedPoint([0.0, 1.0], [1.0]))
    assert primal_block(w, 2) == pytest.approx([0.0, 0.0], abs=1e-14)
    # concatenation round-trip
    full = np.concatenate([[1.0, 2.0], [3.0]])
    assert primal_block(full, 2) == pytest.approx([1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        primal_block([1.0], 2)


def test_regularized_pseudo_gradient(paper_game):
    z = AugmentedPoint([0.0, 1.0], [1.0])
    base = extended_pseudo_gradient(paper_game, z)
    assert regularized_pseudo_gradient(paper_game, z, 0.0) == pytest.approx(base)
    reg = regularized_pseudo_gradient(paper_game, z, RegularizationState(0.5))
    assert reg[:2] == pytest.approx(base[:2])
    assert reg[2] == pytest.approx(base[2] + 0.5 * 1.0)
    with pytest.raises(ValueError):
        regularized_pseudo_gradient(paper_game, z, -0.1)
    with pytest.raises(ValueError):
        RegularizationState(-1.0)


def test_affine_in_dual(paper_game):
    rng = np.random.default_rng(4)
    a = rng.normal(size=2)
    l1, l2 = np.abs(rng.normal(size=1)), np.abs(rng.normal(size=1))
    for alpha in (0.0, 0.3, 1.0):
        mix = alpha * l1 + (1 - alpha) * l2
        w_mix = extended_pseudo_gradient(paper_game, AugmentedPoint(a, mix))
        w1 = extended_pseudo_gradient(paper_game, AugmentedPoint(a, l1))
        w2 = extended_pseudo_gradient(paper_game, AugmentedPoint(a, l2))
        assert w_mix == pytest.approx(alpha * w1 + (1 - alpha) * w2)


def _sample_augmented_pairs(game, count, rng):
    D, n = game.D, game.constraints.num_constraints
    z1 = np.concatenate([rng.normal(size=(count, D)),
                         np.abs(rng.normal(size=(count, n)))], axis=1)
    z2 = np.concatenate([rng.normal(size=(count, D)),
                         np.abs(rng.normal(size=(count, n)))], axis=1)
    return z1, z2


def _extended_at(game, Z):
    D = game.D
    K, l = game.constraints.K, game.constraints.l
    primal = game.pseudo_gradient_at(Z[:, :D]) + Z[:, D:] @ K
    dual = -(Z[:, :D] @ K.T) + l
    return np.concatenate([primal, dual], axis=1)


def test_primal_strong_monotonicity_of_extended_map(random_games):
    rng = np.random.default_rng(8)
    for game in random_games[:5]:
        nu = game.nu()
        z1, z2 = _sample_augmented_pairs(game, 500, rng)
        dw = _extended_at(game, z1) - _extended_at(game, z2)
        dz = z1 - z2
        lhs = np.einsum("ij,ij->i", dw, dz)
        da = dz[:, :game.D]
        assert np.all(lhs >= nu * np.einsum("ij,ij->i", da, da) - 1e-12)


def test_regularized_strong_monotonicity_squared_form(random_games):
    # inequality with the squared dual distance, which the linear-in-dual
    # structure of the map makes algebraically exact
    rng = np.random.default_rng(9)
    eps = 0.37
    for game in random_games[:5]:
        nu = game.nu()
        z1, z2 = _sample_augmented_pairs(game, 500, rng)
        dw = _extended_at(game, z1) - _extended_at(game, z2)
        dz = z1 - z2
        dw[:, game.D:] += eps * dz[:, game.D:]
        lhs = np.einsum("ij,ij->i", dw, dz)
        da = dz[:, :game.D]
        dl = dz[:, game.D:]
        rhs = nu * np.einsum("ij,ij->i", da, da) + eps * np.einsum("ij,ij->i", dl, dl)
        assert np.all(lhs >= rhs - 1e-12)
