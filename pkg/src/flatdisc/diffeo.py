"""Diffeomorphisms between open subsets of R^n and their tangent lifts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ArgumentError, DomainError, SingularityError

COND_LIMIT = 1e12
FD_REL_STEP = 1e-6


def _no_guard(x) -> bool:
    return bool(np.all(np.isfinite(x)))


@dataclass(frozen=True)
class Diffeomorphism:
    """A local change of coordinates ``z = phi(x)`` with explicit inverse.

    ``jacobian`` is optional; without it :func:`numeric_jacobian` is used.
    ``domain_guard`` restricts the source side (points ``x``).
    """

    dim: int
    forward: Callable
    inverse: Callable
    jacobian: Callable | None = None
    domain_guard: Callable = _no_guard
    name: str = "phi"

    def __call__(self, x):
        x = self._checked(x)
        return np.asarray(self.forward(x), dtype=float)

    def inv(self, z):
        z = np.asarray(z, dtype=float)
        x = np.asarray(self.inverse(z), dtype=float)
        if not self.domain_guard(x):
            raise DomainError(f"{self.name}: inverse image outside the domain", point=x)
        return x

    def jac(self, x) -> np.ndarray:
        """Analytic Jacobian if available, otherwise central differences."""
        if self.jacobian is None:
            return numeric_jacobian(self, x)
        x = self._checked(x)
        return np.asarray(self.jacobian(x), dtype=float)

    def _checked(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ArgumentError(f"{self.name}: expected a point of length {self.dim}, got {x.shape}")
        if not self.domain_guard(x):
            raise DomainError(f"{self.name}: point outside the domain", point=x)
        return x


@dataclass(frozen=True)
class TangentVector:
    """A vector ``vector`` attached at ``base``."""

    base: np.ndarray
    vector: np.ndarray

    def __post_init__(self):
        base = np.asarray(self.base, dtype=float)
        vector = np.asarray(self.vector, dtype=float)
        if base.shape != vector.shape or base.ndim != 1:
            raise ArgumentError(f"base {base.shape} and vector {vector.shape} must be equal-length 1-D")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "vector", vector)

    @property
    def dim(self) -> int:
        return self.base.shape[0]


def identity(dim: int) -> Diffeomorphism:
    return Diffeomorphism(
        dim,
        forward=lambda x: np.array(x, dtype=float),
        inverse=lambda z: np.array(z, dtype=float),
        jacobian=lambda x: np.eye(dim),
        name="identity",
    )


def linear(matrix) -> Diffeomorphism:
    """``x -> M x`` for an invertible square ``M``."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"linear diffeomorphism needs a square matrix, got {m.shape}")
    if np.linalg.cond(m) > COND_LIMIT:
        raise SingularityError("linear diffeomorphism matrix is singular", point=m)
    return Diffeomorphism(
        m.shape[0],
        forward=lambda x: m @ x,
        inverse=lambda z: np.linalg.solve(m, z),
        jacobian=lambda x: m,
        name="linear",
    )


def compose(outer: Diffeomorphism, inner: Diffeomorphism) -> Diffeomorphism:
    """The diffeomorphism ``outer o inner`` (apply ``inner`` first)."""
    if outer.dim != inner.dim:
        raise ArgumentError("cannot compose diffeomorphisms of different dimension")

    def jacobian(x):
        return outer.jac(inner(x)) @ inner.jac(x)

    return Diffeomorphism(
        inner.dim,
        forward=lambda x: outer(inner(x)),
        inverse=lambda z: inner.inv(outer.inv(z)),
        jacobian=jacobian,
        domain_guard=inner.domain_guard,
        name=f"{outer.name}o{inner.name}",
    )


def numeric_jacobian(phi: Diffeomorphism, x) -> np.ndarray:
    """Central-difference Jacobian of ``phi.forward`` at ``x``.

    The step for coordinate ``i`` is ``max(1e-6, 1e-6 * |x_i|)``.
    """
    x = phi._checked(x)
    n = phi.dim
    jac = np.empty((n, n))
    for i in range(n):
        eta = max(FD_REL_STEP, FD_REL_STEP * abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += eta
        xm[i] -= eta
        jac[:, i] = (np.asarray(phi.forward(xp)) - np.asarray(phi.forward(xm))) / (xp[i] - xm[i])
    return jac


def solve_checked(jac, rhs, point=None) -> np.ndarray:
    """Solve ``jac @ out = rhs`` after checking the condition number."""
    cond = np.linalg.cond(jac)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise SingularityError(f"Jacobian condition number {cond:.3g} exceeds {COND_LIMIT:g}", point=point)
    return np.linalg.solve(jac, rhs)


def tangent_lift(phi: Diffeomorphism, tv: TangentVector) -> TangentVector:
    """Push ``(x, nu)`` forward to ``(phi(x), Dphi(x) nu)``."""
    return TangentVector(phi(tv.base), phi.jac(tv.base) @ tv.vector)


def tangent_lift_inverse(phi: Diffeomorphism, tv: TangentVector, preimage=None) -> TangentVector:
    """Pull ``(z, rho)`` back to ``(phi^-1(z), Dphi(phi^-1(z))^-1 rho)``.

    ``preimage`` may carry an already known ``phi^-1(z)``; it is then used as
    the base point instead of re-evaluating the inverse.
    """
    x = phi.inv(tv.base) if preimage is None else phi._checked(preimage)
    return TangentVector(x, solve_checked(phi.jac(x), tv.vector, point=x))
