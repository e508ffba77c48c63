"""Game definitions: costs, pseudo-gradients, and shared affine constraints.

A game couples N players through a joint action a = [a^1, ..., a^N] in R^D
and through a shared feasible set C = {a : K a <= l}. Costs are either black
boxes (arbitrary callables on R^D) or members of structured families
(quadratic, quadratic plus a sharp softplus ridge) that expose exact
pseudo-gradients and exact strong-monotonicity / Lipschitz constants.
"""

from __future__ import annotations

import json
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "InfeasibleConstraintsError",
    "GameConfigError",
    "JointAction",
    "ConstraintSet",
    "GameSpec",
    "QuadraticGame",
    "SoftplusQuadraticGame",
    "MonotonicityEstimate",
    "evaluate_cost",
    "pseudo_gradient",
    "constraint_value",
    "probe_monotonicity",
    "probe_lipschitz",
    "paper_example",
    "random_quadratic_game",
    "softplus_game",
    "builtin_game",
    "game_from_config",
    "load_game",
    "resolve_game",
    "BUILTIN_GAMES",
]


class DimensionMismatchError(ValueError):
    """A vector has the wrong length for the game it is used with."""

    def __init__(self, what: str, expected: int, given: int):
        super().__init__(f"{what}: expected dimension {expected}, got {given}")
        self.expected = expected
        self.given = given


class InfeasibleConstraintsError(ValueError):
    """No strictly feasible point was found for the constraint set."""


class GameConfigError(ValueError):
    """A game definition file or config dict is malformed."""


def _as_flat(a, expected: int, what: str = "action") -> np.ndarray:
    """Coerce an action (JointAction, sequence, ndarray) to a flat float vector."""
    if isinstance(a, JointAction):
        vec = a.flat
    else:
        vec = np.asarray(a, dtype=float).reshape(-1)
    if vec.shape[0] != expected:
        raise DimensionMismatchError(what, expected, vec.shape[0])
    return vec


def block_slices(dims: Sequence[int]) -> tuple[slice, ...]:
    """Per-player index slices into the flat joint-action vector."""
    offsets = np.concatenate([[0], np.cumsum(dims)])
    return tuple(slice(int(offsets[i]), int(offsets[i + 1])) for i in range(len(dims)))


class JointAction:
    """Joint action of all players: a flat vector with per-player block views.

    The flat view and the block view are always consistent; instances are
    immutable after construction.
    """

    __slots__ = ("flat", "dims", "_slices")

    def __init__(self, flat, dims: Sequence[int]):
        dims = tuple(int(d) for d in dims)
        if any(d <= 0 for d in dims):
            raise ValueError(f"all block dimensions must be positive, got {dims}")
        vec = np.array(flat, dtype=float).reshape(-1)
        if vec.shape[0] != sum(dims):
            raise DimensionMismatchError("joint action", sum(dims), vec.shape[0])
        vec.flags.writeable = False
        object.__setattr__(self, "flat", vec)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "_slices", block_slices(dims))

    def __setattr__(self, name, value):
        raise AttributeError("JointAction is immutable")

    @classmethod
    def from_blocks(cls, blocks: Sequence) -> "JointAction":
        blocks = [np.asarray(b, dtype=float).reshape(-1) for b in blocks]
        return cls(np.concatenate(blocks), [b.shape[0] for b in blocks])

    def block(self, i: int) -> np.ndarray:
        return self.flat[self._slices[i]]

    @property
    def blocks(self) -> list[np.ndarray]:
        return [self.flat[s] for s in self._slices]

    def __len__(self) -> int:
        return self.flat.shape[0]

    def __repr__(self) -> str:
        return f"JointAction({self.flat.tolist()}, dims={self.dims})"


class ConstraintSet:
    """Shared affine constraints g(a) = K a - l <= 0.

    Construction verifies numerically that the feasible set has a strictly
    feasible point (a point with max_j g_j(a) < 0), by descending the worst
    constraint margin from a least-squares starting point.
    """

    def __init__(self, K, l, check_slater: bool = True):
        self.K = np.array(K, dtype=float, ndmin=2)
        self.l = np.array(l, dtype=float).reshape(-1)
        if self.K.shape[0] != self.l.shape[0]:
            raise DimensionMismatchError("constraint offset l", self.K.shape[0], self.l.shape[0])
        self.K.flags.writeable = False
        self.l.flags.writeable = False
        self.interior_point = self._find_interior_point() if check_slater else None

    @property
    def num_constraints(self) -> int:
        return self.K.shape[0]

    @property
    def dim(self) -> int:
        return self.K.shape[1]

    def value(self, a) -> np.ndarray:
        """Constraint values g(a) = K a - l."""
        vec = _as_flat(a, self.dim)
        return self.K @ vec - self.l

    def is_feasible(self, a, tol: float = 1e-9) -> bool:
        return bool(np.all(self.value(a) <= tol))

    def _find_interior_point(self, max_iter: int = 500) -> np.ndarray:
        """Numeric feasibility search: minimize max_j g_j(a) until strictly negative.

        Uses Polyak subgradient steps on the piecewise-linear worst margin,
        warm-started at the least-squares point aiming K a below l.
        """
        if self.num_constraints == 0:
            return np.zeros(self.dim)  # vacuously strictly feasible
        scale = 1.0 + float(np.linalg.norm(self.l))
        target_margin = 0.5 * scale
        a, *_ = np.linalg.lstsq(self.K, self.l - target_margin, rcond=None)
        best = np.inf
        for _ in range(max_iter):
            g = self.K @ a - self.l
            j = int(np.argmax(g))
            worst = g[j]
            best = min(best, worst)
            if worst < -1e-9 * scale:
                return a
            row = self.K[j]
            row_sq = float(row @ row)
            if row_sq == 0.0:
                # 0 <= l_j is violated identically; no interior exists
                raise InfeasibleConstraintsError(
                    f"constraint row {j} is zero with offset {self.l[j]}; no interior point"
                )
            # Polyak step toward a margin strictly below zero
            a = a - ((worst + target_margin) / row_sq) * row
        raise InfeasibleConstraintsError(
            f"no strictly feasible point found after {max_iter} iterations "
            f"(best margin {best:.3e}); Slater's condition appears violated"
        )


class GameSpec:
    """An N-player game with black-box cost callables and shared constraints.

    Player indices are 0-based. Each cost callable maps a flat joint action
    in R^D to a scalar and must be defined on all of R^D. All state is fixed
    at construction; instances are safe to share across threads.
    """

    def __init__(
        self,
        dims: Sequence[int],
        costs: Sequence[Callable[[np.ndarray], float]],
        constraints: ConstraintSet,
        nu: float | None = None,
        lipschitz: float | None = None,
        name: str = "game",
    ):
        self.dims = tuple(int(d) for d in dims)
        if any(d <= 0 for d in self.dims):
            raise ValueError(f"player dimensions must be positive, got {self.dims}")
        self.num_players = len(self.dims)
        self.D = int(sum(self.dims))
        if len(costs) != self.num_players:
            raise GameConfigError(
                f"need {self.num_players} cost evaluators, got {len(costs)}"
            )
        self._costs = list(costs)
        if constraints.dim != self.D:
            raise DimensionMismatchError("constraint matrix K columns", self.D, constraints.dim)
        self.constraints = constraints
        self.known_nu = None if nu is None else float(nu)
        self.known_lipschitz = None if lipschitz is None else float(lipschitz)
        self.name = name
        self.slices = block_slices(self.dims)
        self._probed_nu = None
        self._probed_lipschitz = None

    # -- cost evaluation ---------------------------------------------------

    def _check_player(self, i: int):
        if not (0 <= i < self.num_players):
            raise IndexError(f"player index {i} out of range [0, {self.num_players})")

    def cost(self, i: int, a) -> float:
        self._check_player(i)
        return float(self._costs[i](_as_flat(a, self.D)))

    def costs_at(self, points: np.ndarray) -> np.ndarray:
        """Evaluate every player's cost at each row of `points`; returns (P, N)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.D:
            raise DimensionMismatchError("points", self.D, points.shape[1])
        return self._costs_batch_unchecked(points)

    def _costs_batch_unchecked(self, points: np.ndarray) -> np.ndarray:
        # hot-loop entry point: callers guarantee a (P, D) float array
        out = np.empty((points.shape[0], self.num_players))
        for i, f in enumerate(self._costs):
            for p in range(points.shape[0]):
                out[p, i] = f(points[p])
        return out

    # -- pseudo-gradient ---------------------------------------------------

    def pseudo_gradient(self, a) -> np.ndarray:
        """Stacked per-player partial gradients, block i = dJ^i/da^i.

        Black-box costs are differentiated by central finite differences with
        step 1e-6 * (1 + ||a||); structured subclasses override with exact
        formulas.
        """
        vec = _as_flat(a, self.D)
        h = 1e-6 * (1.0 + float(np.linalg.norm(vec)))
        out = np.empty(self.D)
        for i, sl in enumerate(self.slices):
            f = self._costs[i]
            for k in range(sl.start, sl.stop):
                ap = vec.copy()
                am = vec.copy()
                ap[k] += h
                am[k] -= h
                out[k] = (f(ap) - f(am)) / (2.0 * h)
        return out

    def pseudo_gradient_at(self, points: np.ndarray) -> np.ndarray:
        """Pseudo-gradient at each row of `points`; returns (P, D)."""
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return np.stack([self.pseudo_gradient(p) for p in points])

    # -- regularity constants ----------------------------------------------

    def nu(self) -> float:
        """Strong-monotonicity constant: known value if supplied, else probed."""
        if self.known_nu is not None:
            return self.known_nu
        if self._probed_nu is None:
            self._probed_nu = probe_monotonicity(self, 20000, 3.0, seed=0).value
        return self._probed_nu

    def lipschitz(self) -> float:
        """Lipschitz constant of the pseudo-gradient: known if supplied, else probed."""
        if self.known_lipschitz is not None:
            return self.known_lipschitz
        if self._probed_lipschitz is None:
            self._probed_lipschitz = probe_lipschitz(self, 20000, 3.0, seed=0)
        return self._probed_lipschitz

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(name={self.name!r}, players={self.num_players}, "
            f"dims={self.dims}, constraints={self.constraints.num_constraints})"
        )


class QuadraticGame(GameSpec):
    """Game with per-player costs J^i(a) = 0.5 a' A_i a + b_i' a.

    The joint pseudo-gradient is the affine map M(a) = P a + q, where the
    block-i rows of P come from the symmetrized block-row of A_i. Exact
    constants: nu is the smallest eigenvalue of the symmetric part of P and
    the Lipschitz constant is the largest singular value of P.
    """

    def __init__(self, A, b, constraints: ConstraintSet, dims=None,
                 name: str = "quadratic", require_monotone: bool = True):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 3 or A.shape[1] != A.shape[2]:
            raise GameConfigError(f"A must have shape (N, D, D), got {A.shape}")
        N, D = A.shape[0], A.shape[1]
        if b.shape != (N, D):
            raise GameConfigError(f"b must have shape ({N}, {D}), got {b.shape}")
        if dims is None:
            if D % N != 0:
                raise GameConfigError(
                    f"cannot infer per-player dims from N={N}, D={D}; pass dims="
                )
            dims = tuple([D // N] * N)
        dims = tuple(int(d) for d in dims)
        if len(dims) != N or sum(dims) != D:
            raise GameConfigError(f"dims {dims} inconsistent with A of shape {A.shape}")
        self.A = A
        self.b = b
        P = np.empty((D, D))
        q = np.empty(D)
        for i, sl in enumerate(block_slices(dims)):
            sym = 0.5 * (A[i] + A[i].T)
            P[sl, :] = sym[sl, :]
            q[sl] = b[i, sl]
        self.P = P
        self.q = q
        sym_eigs = np.linalg.eigvalsh(0.5 * (P + P.T))
        nu = float(sym_eigs.min())
        if require_monotone and nu <= 0:
            raise GameConfigError(
                f"pseudo-gradient is not strongly monotone (min symmetric eigenvalue {nu:.3e})"
            )
        L = float(np.linalg.svd(P, compute_uv=False).max())
        costs = [self._make_cost(i) for i in range(N)]
        super().__init__(dims, costs, constraints, nu=nu, lipschitz=L, name=name)
        # flattened stack of A used for fast multi-point cost evaluation
        self._A_flat = A.reshape(N * D, D)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_costs"] = None  # closures are rebuilt on unpickle
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._costs = [self._make_cost(i) for i in range(self.num_players)]

    def _make_cost(self, i: int):
        A_i, b_i = self.A[i], self.b[i]
        return lambda a: 0.5 * float(a @ (A_i @ a)) + float(b_i @ a)

    def cost(self, i: int, a) -> float:
        self._check_player(i)
        vec = _as_flat(a, self.D)
        return 0.5 * float(vec @ (self.A[i] @ vec)) + float(self.b[i] @ vec)

    def costs_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.D:
            raise DimensionMismatchError("points", self.D, points.shape[1])
        return self._costs_batch_unchecked(points)

    def _costs_batch_unchecked(self, points: np.ndarray) -> np.ndarray:
        AX = points @ self._A_flat.T  # (P, N*D)
        quad = AX.reshape(points.shape[0], self.num_players, self.D) * points[:, None, :]
        return 0.5 * quad.sum(axis=2) + points @ self.b.T

    def pseudo_gradient(self, a) -> np.ndarray:
        return self.P @ _as_flat(a, self.D) + self.q

    def pseudo_gradient_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return points @ self.P.T + self.q


class SoftplusQuadraticGame(GameSpec):
    """Quadratic base plus a sharp softplus ridge coupling all players.

    Player i's cost is the quadratic 0.5 a' A_i a + b_i' a plus
    delta_i * softplus_beta(w_i' a)^2, a convex one-sided penalty whose
    curvature concentrates near the hyperplane w_i' a = 0. Pseudo-gradients
    are exact; nu and the Lipschitz constant are probed (no closed form).
    """

    def __init__(self, dims, A, b, W, delta, beta, constraints, name="softplus"):
        dims = tuple(int(d) for d in dims)
        N, D = len(dims), int(sum(dims))
        self.A = np.asarray(A, dtype=float)
        self.b = np.asarray(b, dtype=float)
        self.W = np.asarray(W, dtype=float).reshape(N, D)
        self.delta = np.asarray(delta, dtype=float).reshape(N)
        self.beta = float(beta)
        if self.A.shape != (N, D, D) or self.b.shape != (N, D):
            raise GameConfigError("A/b shapes inconsistent with dims")
        P = np.empty((D, D))
        q = np.empty(D)
        for i, sl in enumerate(block_slices(dims)):
            sym = 0.5 * (self.A[i] + self.A[i].T)
            P[sl, :] = sym[sl, :]
            q[sl] = self.b[i, sl]
        self.P = P
        self.q = q
        costs = [self._make_cost(i) for i in range(N)]
        super().__init__(dims, costs, constraints, name=name)
        self._A_flat = self.A.reshape(N * D, D)

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_costs"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self._costs = [self._make_cost(i) for i in range(self.num_players)]

    def _softplus(self, u):
        return np.logaddexp(0.0, self.beta * u) / self.beta

    def _softplus_prime(self, u):
        # derivative of softplus_beta(u)^2: 2 * softplus_beta(u) * sigmoid(beta u)
        sig = 0.5 * (1.0 + np.tanh(0.5 * self.beta * u))
        return 2.0 * self._softplus(u) * sig

    def _make_cost(self, i: int):
        A_i, b_i, w_i, d_i = self.A[i], self.b[i], self.W[i], self.delta[i]

        def cost(a):
            quad = 0.5 * float(a @ (A_i @ a)) + float(b_i @ a)
            return quad + d_i * float(self._softplus(w_i @ a) ** 2)

        return cost

    def cost(self, i: int, a) -> float:
        self._check_player(i)
        vec = _as_flat(a, self.D)
        quad = 0.5 * float(vec @ (self.A[i] @ vec)) + float(self.b[i] @ vec)
        return quad + float(self.delta[i] * self._softplus(self.W[i] @ vec) ** 2)

    def costs_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        if points.shape[1] != self.D:
            raise DimensionMismatchError("points", self.D, points.shape[1])
        return self._costs_batch_unchecked(points)

    def _costs_batch_unchecked(self, points: np.ndarray) -> np.ndarray:
        AX = points @ self._A_flat.T
        quad = AX.reshape(points.shape[0], self.num_players, self.D) * points[:, None, :]
        ridge = self.delta * self._softplus(points @ self.W.T) ** 2  # (P, N)
        return 0.5 * quad.sum(axis=2) + points @ self.b.T + ridge

    def pseudo_gradient(self, a) -> np.ndarray:
        vec = _as_flat(a, self.D)
        out = self.P @ vec + self.q
        u = self.W @ vec
        hp = self._softplus_prime(u)
        for i, sl in enumerate(self.slices):
            out[sl] += self.delta[i] * hp[i] * self.W[i, sl]
        return out

    def pseudo_gradient_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = points @ self.P.T + self.q
        hp = self._softplus_prime(points @ self.W.T)  # (P, N)
        for i, sl in enumerate(self.slices):
            out[:, sl] += (self.delta[i] * hp[:, i])[:, None] * self.W[i, sl]
        return out


# -- spec-level operations --------------------------------------------------


def evaluate_cost(game: GameSpec, i: int, a) -> float:
    """Player i's cost J^i(a) at the joint action a."""
    return game.cost(i, a)


def pseudo_gradient(game: GameSpec, a) -> np.ndarray:
    """Stacked per-player partial gradients of the game at a."""
    return game.pseudo_gradient(a)


def constraint_value(cs, a) -> np.ndarray:
    """g(a) = K a - l for a ConstraintSet or a game's constraint set."""
    if isinstance(cs, GameSpec):
        cs = cs.constraints
    return cs.value(a)


class MonotonicityEstimate(float):
    """Sampled strong-monotonicity constant; `violated` flags a nonpositive estimate."""

    def __new__(cls, value: float):
        obj = super().__new__(cls, value)
        return obj

    @property
    def value(self) -> float:
        return float(self)

    @property
    def violated(self) -> bool:
        return float(self) <= 0.0


def _sample_ball(rng: np.random.Generator, count: int, dim: int, radius: float) -> np.ndarray:
    direction = rng.standard_normal((count, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(count) ** (1.0 / dim)
    return direction * r[:, None]


def probe_monotonicity(game: GameSpec, num_pairs: int, radius: float, seed: int) -> MonotonicityEstimate:
    """Estimate the strong-monotonicity constant of the pseudo-gradient.

    Returns the minimum over sampled pairs of
    <M(a1) - M(a2), a1 - a2> / ||a1 - a2||^2; a nonpositive value is flagged
    via the result's `violated` property.
    """
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    x1 = _sample_ball(rng, num_pairs, game.D, radius)
    x2 = _sample_ball(rng, num_pairs, game.D, radius)
    diff = x1 - x2
    norms_sq = np.einsum("ij,ij->i", diff, diff)
    keep = norms_sq > 1e-24
    if not np.any(keep):
        raise ValueError("all sampled pairs were degenerate; increase radius")
    m_diff = game.pseudo_gradient_at(x1[keep]) - game.pseudo_gradient_at(x2[keep])
    ratios = np.einsum("ij,ij->i", m_diff, diff[keep]) / norms_sq[keep]
    return MonotonicityEstimate(float(ratios.min()))


def probe_lipschitz(game: GameSpec, num_pairs: int, radius: float, seed: int) -> float:
    """Estimate the Lipschitz constant: max of ||M(a1)-M(a2)|| / ||a1-a2||."""
    if num_pairs < 1:
        raise ValueError("num_pairs must be >= 1")
    rng = np.random.default_rng(seed)
    x1 = _sample_ball(rng, num_pairs, game.D, radius)
    x2 = _sample_ball(rng, num_pairs, game.D, radius)
    diff = x1 - x2
    norms = np.linalg.norm(diff, axis=1)
    keep = norms > 1e-12  # degenerate pairs are skipped
    if not np.any(keep):
        raise ValueError("all sampled pairs were degenerate; increase radius")
    m_diff = game.pseudo_gradient_at(x1[keep]) - game.pseudo_gradient_at(x2[keep])
    return float((np.linalg.norm(m_diff, axis=1) / norms[keep]).max())


# -- builtin game families ---------------------------------------------------


def paper_example() -> QuadraticGame:
    """Two scalar players with one shared budget-style constraint a1 + a2 >= 1.

    Costs: J^1 = 1.5 a1^2 + a1 a2 and J^2 = 0.5 a2^2 - a1 a2. The variational
    equilibrium is a* = [0, 1] with multiplier 1 on the active constraint.
    """
    A = np.array([
        [[3.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0], [-1.0, 1.0]],
    ])
    b = np.zeros((2, 2))
    cs = ConstraintSet([[-1.0, -1.0]], [-1.0])
    return QuadraticGame(A, b, cs, name="paper-example")


def random_quadratic_game(
    seed: int,
    num_players: int | None = None,
    dims: Sequence[int] | None = None,
    num_constraints: int | None = None,
    nu_range: tuple[float, float] = (0.5, 2.0),
    spread: float = 2.0,
) -> QuadraticGame:
    """Seeded strongly monotone quadratic game with active shared constraints.

    The constraint matrix K has orthogonal rows of a common norm, so its
    singular values coincide; the offset l is chosen so every constraint is
    violated at the unconstrained equilibrium and therefore binds at the
    solution.
    """
    rng = np.random.default_rng(seed)
    if dims is None:
        if num_players is None:
            num_players = int(rng.integers(2, 4))
        dims = [int(rng.integers(1, 3)) for _ in range(num_players)]
    dims = tuple(int(d) for d in dims)
    N, D = len(dims), int(sum(dims))
    if num_constraints is None:
        num_constraints = int(rng.integers(1, min(3, D) + 1))
    n = int(num_constraints)

    # target pseudo-gradient P = S + Z: symmetric PD part plus cross-block skew
    eigs = rng.uniform(nu_range[0], nu_range[1] + spread, size=D)
    eigs[rng.integers(0, D)] = nu_range[0] + (nu_range[1] - nu_range[0]) * rng.random()
    Q, _ = np.linalg.qr(rng.standard_normal((D, D)))
    S = (Q * eigs) @ Q.T
    Z = rng.standard_normal((D, D))
    Z = 0.5 * (Z - Z.T)
    slices = block_slices(dims)
    for sl in slices:  # keep diagonal blocks symmetric so per-player Hessians exist
        Z[sl, sl] = 0.0
    P = S + Z

    # per-player symmetric Hessians A_i reproducing P's block-rows
    A = np.zeros((N, D, D))
    b = np.zeros((N, D))
    q = rng.standard_normal(D)
    for i, sl in enumerate(slices):
        A[i][sl, :] = P[sl, :]
        A[i][:, sl] = P[sl, :].T
        A[i][sl, sl] = P[sl, sl]
        b[i, sl] = q[sl]

    # K with orthonormal rows and a common scale; constraints bind at the solution
    Qk, _ = np.linalg.qr(rng.standard_normal((D, max(n, 1))))
    scale = rng.uniform(0.5, 2.0)
    K = scale * Qk[:, :n].T
    a_uncon = np.linalg.solve(P, -q)
    l = K @ a_uncon - rng.uniform(0.1, 1.0, size=n)
    cs = ConstraintSet(K, l)
    return QuadraticGame(A, b, cs, dims=dims, name=f"random-quadratic-{seed}")


def softplus_game(
    seed: int = 0,
    dims: Sequence[int] = (1, 1),
    delta: float = 0.1,
    beta: float = 400.0,
) -> SoftplusQuadraticGame:
    """Smooth non-quadratic family: quadratic base plus a sharp softplus ridge.

    Each player's ridge direction passes through the origin, so probes placed
    at zero sit exactly on the high-curvature ridge. The perturbation weight
    is kept small enough that the probed strong-monotonicity constant stays
    positive.
    """
    rng = np.random.default_rng(seed)
    dims = tuple(int(d) for d in dims)
    N, D = len(dims), int(sum(dims))
    base = random_quadratic_game(seed, dims=dims, num_constraints=1)
    W = rng.standard_normal((N, D))
    W /= np.linalg.norm(W, axis=1, keepdims=True)
    game = SoftplusQuadraticGame(
        dims, base.A, np.zeros((N, D)), W, np.full(N, delta), beta,
        ConstraintSet(base.constraints.K, base.constraints.l, check_slater=False),
        name=f"softplus-{seed}",
    )
    est = probe_monotonicity(game, 4000, 2.0, seed=seed + 1)
    if est.violated:
        raise GameConfigError(
            f"softplus perturbation too strong: probed monotonicity {est.value:.3e} <= 0"
        )
    return game


BUILTIN_GAMES: dict[str, Callable[[], GameSpec]] = {
    "paper-example": paper_example,
    "softplus-ridge": softplus_game,
}


def builtin_game(name: str) -> GameSpec:
    try:
        return BUILTIN_GAMES[name]()
    except KeyError:
        raise GameConfigError(
            f"unknown builtin game {name!r}; available: {sorted(BUILTIN_GAMES)}"
        ) from None


def game_from_config(cfg: dict) -> GameSpec:
    """Build a game from a config dict.

    Either {"builtin": name} or a full quadratic definition with keys
    players, dims, A (list of N DxD matrices), b (list of N length-D vectors),
    K, l.
    """
    if "builtin" in cfg:
        return builtin_game(cfg["builtin"])
    try:
        players = int(cfg["players"])
        dims = [int(d) for d in cfg["dims"]]
        A = np.asarray(cfg["A"], dtype=float)
        b = np.asarray(cfg["b"], dtype=float)
        K = np.asarray(cfg["K"], dtype=float)
        l = np.asarray(cfg["l"], dtype=float)
    except KeyError as missing:
        raise GameConfigError(f"game config is missing key {missing}") from None
    if players != len(dims):
        raise GameConfigError(f"players={players} but dims has {len(dims)} entries")
    cs = ConstraintSet(K, l)
    return QuadraticGame(A, b, cs, dims=dims, name=str(cfg.get("name", "config-game")))


def load_game(path) -> GameSpec:
    """Load a game definition from a JSON file."""
    with open(path) as fh:
        try:
            cfg = json.load(fh)
        except json.JSONDecodeError as err:
            raise GameConfigError(f"{path}: not valid JSON ({err})") from None
    return game_from_config(cfg)


def resolve_game(spec: str) -> GameSpec:
    """Resolve a CLI game argument: a builtin name or a path to a JSON file."""
    if spec in BUILTIN_GAMES:
        return builtin_game(spec)
    return load_game(spec)
