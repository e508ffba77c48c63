import numpy as np
import pytest

from gnezero.games import paper_example, random_quadratic_game
from gnezero.oracles import solve_vgne


@pytest.fixture(scope="session")
def paper_game():
    return paper_example()


@pytest.fixture(scope="session")
def paper_solution(paper_game):
    return solve_vgne(paper_game)


@pytest.fixture(scope="session")
def random_games():
    """Ten seeded strongly monotone quadratic games (D <= 6, n <= 3)."""
    return [random_quadratic_game(seed) for seed in range(10)]


def central_difference_gradient(f, x, h=None):
    """Test-local finite-difference oracle, independent of library code."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = 1e-6 * (1.0 + float(np.linalg.norm(x)))
    out = np.empty(x.shape[0])
    for k in range(x.shape[0]):
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        out[k] = (f(xp) - f(xm)) / (2 * h)
    return out
