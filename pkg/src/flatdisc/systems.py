"""Continuous-time control systems, precompensated systems and Brunovsky forms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ArgumentError, DomainError

RANK_TOL = 1e-10


def _always_valid(x, u) -> bool:
    return bool(np.all(np.isfinite(x)) and np.all(np.isfinite(u)))


@dataclass(frozen=True)
class ControlSystem:
    """Smooth control system ``xdot = f(x, u)``.

    Parameters
    ----------
    state_dim, input_dim : int
        Dimensions ``n`` and ``m``.
    dynamics : callable
        ``dynamics(x, u)`` returning the state velocity (length ``n``).
    domain_guard : callable, optional
        ``domain_guard(x, u) -> bool``. Points where it is false are refused by
        :func:`eval_dynamics`. Defaults to a finiteness check.
    name : str
        Label used in error messages and the CLI registry.
    """

    state_dim: int
    input_dim: int
    dynamics: Callable
    domain_guard: Callable = _always_valid
    name: str = "system"

    def __post_init__(self):
        if self.state_dim < 1 or self.input_dim < 1:
            raise ArgumentError("state_dim and input_dim must be positive")

    def __call__(self, x, u):
        return eval_dynamics(self, x, u)


@dataclass(frozen=True)
class ExtendedSystem:
    """Precompensated system ``xi = (x, y)``, ``xidot = F(xi, v)``.

    ``base`` carries the dynamics ``F``; the first ``split_index`` coordinates of
    ``xi`` are the original state ``x`` and the rest is the compensator state
    ``y``.  ``feedback(x, y, v)`` recovers the input of the original system.
    """

    base: ControlSystem
    split_index: int
    feedback: Callable
    original_input_dim: int | None = None

    def __post_init__(self):
        if not 0 < self.split_index <= self.base.state_dim:
            raise ArgumentError(
                f"split_index must lie in (0, {self.base.state_dim}], got {self.split_index}"
            )

    @property
    def state_dim(self) -> int:
        return self.base.state_dim

    @property
    def input_dim(self) -> int:
        return self.base.input_dim

    def dynamics(self, xi, v):
        return eval_dynamics(self.base, xi, v)

    def split(self, xi):
        xi = np.asarray(xi, dtype=float)
        return xi[: self.split_index], xi[self.split_index :]

    def original_input(self, xi, v):
        x, y = self.split(xi)
        return np.asarray(self.feedback(x, y, np.asarray(v, dtype=float)), dtype=float)


@dataclass(frozen=True)
class LinearSystem:
    """Linear system ``zdot = A z + B v`` (or ``z+ = A z + B v`` if discrete)."""

    a_matrix: np.ndarray
    b_matrix: np.ndarray
    discrete: bool = False

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a_matrix, dtype=float))
        b = np.asarray(self.b_matrix, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
            raise ArgumentError(f"inconsistent shapes A{a.shape}, B{b.shape}")
        object.__setattr__(self, "a_matrix", a)
        object.__setattr__(self, "b_matrix", b)

    @property
    def state_dim(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def input_dim(self) -> int:
        return self.b_matrix.shape[1]

    def rhs(self, z, v):
        return self.a_matrix @ np.asarray(z, dtype=float) + self.b_matrix @ np.asarray(v, dtype=float)

    def as_control_system(self) -> ControlSystem:
        return ControlSystem(self.state_dim, self.input_dim, self.rhs, name="linear")


def brunovsky(chain_lengths) -> LinearSystem:
    """Brunovsky canonical form with one integrator chain per input.

    >>> sys = brunovsky([2])
    >>> sys.a_matrix
    array([[0., 1.],
           [0., 0.]])
    """
    chains = [int(c) for c in chain_lengths]
    if not chains:
        raise ArgumentError("chain_lengths must be nonempty")
    if any(c < 1 for c in chains):
        raise ArgumentError(f"chain lengths must be positive, got {chains}")
    n, m = sum(chains), len(chains)
    a = np.zeros((n, n))
    b = np.zeros((n, m))
    start = 0
    for j, length in enumerate(chains):
        for i in range(start, start + length - 1):
            a[i, i + 1] = 1.0
        b[start + length - 1, j] = 1.0
        start += length
    return LinearSystem(a, b)


def controllability_matrix(sys: LinearSystem) -> np.ndarray:
    a, b = sys.a_matrix, sys.b_matrix
    blocks = [b]
    for _ in range(sys.state_dim - 1):
        blocks.append(a @ blocks[-1])
    return np.hstack(blocks)


def controllability_rank(sys: LinearSystem, tol: float = RANK_TOL) -> int:
    """Rank of ``[B, AB, ..., A^(n-1) B]`` from its singular values."""
    s = np.linalg.svd(controllability_matrix(sys), compute_uv=False)
    return int(np.sum(s > tol))


def eval_dynamics(sys: ControlSystem, x, u) -> np.ndarray:
    """Evaluate ``f(x, u)``, refusing points outside the domain guard."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (sys.state_dim,) or u.shape != (sys.input_dim,):
        raise ArgumentError(
            f"{sys.name}: expected x of length {sys.state_dim} and u of length "
            f"{sys.input_dim}, got {x.shape} and {u.shape}"
        )
    if not sys.domain_guard(x, u):
        raise DomainError(f"{sys.name}: (x, u) outside the validity domain", point=(x, u))
    return np.asarray(sys.dynamics(x, u), dtype=float)
