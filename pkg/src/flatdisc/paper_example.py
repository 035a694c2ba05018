"""The four-state flat example and its dynamic linearization.

Plant (n = 4, m = 2)::

    x1' = x2 + 2 x2 x3 + 2 x2 x4 u2
    x2' = x3 + x4 u2
    x3' = u1
    x4' = (1 + x3) u2

Prolonging ``u2`` (``y = u2``, ``y' = mu2``, ``u1 = mu1``) and applying the
feedback ``mu = psi(x, y, v)`` gives a 5-state system that the chart

    z = phi(x, y) = (x1 - x2**2, x2, x3 + x4 y, x4, (1 + x3) y)

maps onto the Brunovsky chains ``z1''' = v1``, ``z4'' = v2``.  The flat outputs
are ``(z1, z4) = (x1 - x2**2, x4)``.

A second, non-preserving baseline lives at the bottom: a planar system with flat
output ``x1 / (1 + x2)`` discretized by plain explicit Euler.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .diffeo import Diffeomorphism
from .errors import ArgumentError, ChartError, SingularityError
from .systems import ControlSystem, ExtendedSystem, LinearSystem, brunovsky

GUARD_EPS = 1e-6
XI0 = np.array([0.5, 0.2, 0.1, 0.2, 0.0])
CHAINS = (3, 2)
FLAT_OUTPUT_INDICES = (0, 3)


def quad_dynamics(x, u):
    x1, x2, x3, x4 = x
    u1, u2 = u
    return np.array(
        [
            x2 + 2.0 * x2 * x3 + 2.0 * x2 * x4 * u2,
            x3 + x4 * u2,
            u1,
            (1.0 + x3) * u2,
        ]
    )


def feedback_det(x, y) -> float:
    return 1.0 + x[2] - x[3] * y


def feedback_psi(x, y, v) -> np.ndarray:
    """Invertible feedback ``mu = M(x, y)^-1 (v1 - (1 + x3) y^2, v2)``.

    ``M = [[1, x4], [y, 1 + x3]]``, with determinant ``1 + x3 - x4 y``.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    y = float(y)
    det = feedback_det(x, y)
    if not abs(det) > GUARD_EPS:
        raise SingularityError(f"feedback determinant 1 + x3 - x4*y = {det:.3e} is singular", point=(x, y))
    mat = np.array([[1.0, x[3]], [y, 1.0 + x[2]]])
    rhs = np.array([v[0] - (1.0 + x[2]) * y * y, v[1]])
    return np.linalg.solve(mat, rhs)


def extended_dynamics(xi, v) -> np.ndarray:
    """Right-hand side ``F(xi, v)`` of the precompensated 5-state system."""
    xi = np.asarray(xi, dtype=float)
    x, y = xi[:4], xi[4]
    mu = feedback_psi(x, y, v)
    x2, x3, x4 = x[1], x[2], x[3]
    return np.array(
        [
            x2 + 2.0 * x2 * (x3 + x4 * y),
            x3 + x4 * y,
            mu[0],
            (1.0 + x3) * y,
            mu[1],
        ]
    )


def phi_forward(xi) -> np.ndarray:
    x1, x2, x3, x4, y = np.asarray(xi, dtype=float)
    return np.array([x1 - x2 * x2, x2, x3 + x4 * y, x4, (1.0 + x3) * y])


def phi_jacobian(xi) -> np.ndarray:
    _, x2, x3, x4, y = np.asarray(xi, dtype=float)
    return np.array(
        [
            [1.0, -2.0 * x2, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, y, x4],
            [0.0, 0.0, 0.0, 1.0, 0.0],
            [0.0, 0.0, y, 0.0, 1.0 + x3],
        ]
    )


def phi_inverse(z) -> np.ndarray:
    """Inverse chart on the branch through ``y = z5 / (1 + z3)`` as ``z4 -> 0``.

    ``y`` solves ``z4 y^2 - (1 + z3) y + z5 = 0``; the cancellation-free form
    ``y = 2 z5 / ((1 + z3) + sign(1 + z3) sqrt(disc))`` also covers ``z4 = 0``.
    """
    z1, z2, z3, z4, z5 = np.asarray(z, dtype=float)
    p = 1.0 + z3
    if not abs(p) > GUARD_EPS:
        raise SingularityError(f"1 + z3 = {p:.3e} too close to zero", point=np.asarray(z))
    disc = p * p - 4.0 * z4 * z5
    if disc < 0.0:
        raise ChartError(f"z = {np.asarray(z)} lies outside the chart (discriminant {disc:.3e})", point=np.asarray(z))
    y = 2.0 * z5 / (p + np.copysign(np.sqrt(disc), p))
    return np.array([z1 + z2 * z2, z2, z3 - z4 * y, z4, y])


def chart_guard(xi) -> bool:
    xi = np.asarray(xi, dtype=float)
    return bool(np.all(np.isfinite(xi)) and abs(feedback_det(xi[:4], xi[4])) > GUARD_EPS)


def flat_outputs(xi) -> np.ndarray:
    xi = np.asarray(xi, dtype=float)
    return np.array([xi[0] - xi[1] ** 2, xi[3]])


def reconstruct(phi1, phi2, h: float, k: int):
    """State and input at step ``k`` from forward shifts of the flat outputs.

    Needs ``phi1[k..k+3]`` and ``phi2[k..k+2]``.  Returns ``(xi, v)``.
    """
    p1 = np.asarray(phi1, dtype=float)[k : k + 4]
    p2 = np.asarray(phi2, dtype=float)[k : k + 3]
    if p1.size < 4 or p2.size < 3:
        raise ArgumentError(f"not enough forward shifts at k={k}")
    z = np.array(
        [
            p1[0],
            (p1[1] - p1[0]) / h,
            (p1[2] - 2.0 * p1[1] + p1[0]) / h**2,
            p2[0],
            (p2[1] - p2[0]) / h,
        ]
    )
    v = np.array(
        [
            (p1[3] - 3.0 * p1[2] + 3.0 * p1[1] - p1[0]) / h**3,
            (p2[2] - 2.0 * p2[1] + p2[0]) / h**2,
        ]
    )
    return phi_inverse(z), v


@dataclass(frozen=True)
class QuadExampleSystem:
    original: ControlSystem
    extended: ExtendedSystem
    phi: Diffeomorphism
    linear: LinearSystem
    flat_output_indices: tuple = FLAT_OUTPUT_INDICES
    xi0: np.ndarray = field(default_factory=lambda: XI0.copy())

    def plant_input(self, xi, v) -> np.ndarray:
        """Zero-order-hold input ``u = (psi_1(x, y, v), y)`` for the 4-state plant."""
        return self.extended.original_input(xi, v)


def _extended_guard(xi, v) -> bool:
    return chart_guard(xi) and bool(np.all(np.isfinite(v)))


def paper_quad() -> QuadExampleSystem:
    original = ControlSystem(4, 2, quad_dynamics, name="paper-quad")
    base = ControlSystem(5, 2, extended_dynamics, domain_guard=_extended_guard, name="paper-quad-extended")

    def feedback(x, y, v):
        yy = float(y[0])
        return np.array([feedback_psi(x, yy, v)[0], yy])

    extended = ExtendedSystem(base, 4, feedback, original_input_dim=2)
    phi = Diffeomorphism(5, phi_forward, phi_inverse, phi_jacobian, chart_guard, name="quad-phi")
    return QuadExampleSystem(original, extended, phi, brunovsky(CHAINS))


def sample_tube(n: int, seed: int = 0, radius: float = 0.1, center=None) -> np.ndarray:
    """``n`` seeded points uniformly in a cube around ``center`` (default ``XI0``)."""
    c = XI0 if center is None else np.asarray(center, dtype=float)
    rng = np.random.default_rng(seed)
    return c + rng.uniform(-radius, radius, size=(n, c.size))


# -- non-preserving baseline ---------------------------------------------------


def example1_dynamics(x, u):
    x1, x2 = x
    (w,) = u
    return np.array([x2 * x2 + x2 + x1 * w, (1.0 + x2) * w])


def example1_system() -> ControlSystem:
    def guard(x, u):
        return bool(np.all(np.isfinite(x)) and np.all(np.isfinite(u)) and abs(1.0 + x[1]) > GUARD_EPS)

    return ControlSystem(2, 1, example1_dynamics, guard, name="euler-baseline")


def example1_flat_output(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(x[0] / (1.0 + x[1]))


def example1_reconstruct(ys, h: float, k: int):
    """Shift-based analogue of the continuous parametrization.

    Continuous time: ``x2 = y'``, ``x1 = y (1 + y')``, ``u = y'' / (1 + y')``;
    derivatives are replaced by forward differences of the sampled output.
    """
    y = np.asarray(ys, dtype=float)[k : k + 3]
    if y.size < 3:
        raise ArgumentError(f"not enough forward shifts at k={k}")
    dy = (y[1] - y[0]) / h
    ddy = (y[2] - 2.0 * y[1] + y[0]) / h**2
    return np.array([y[0] * (1.0 + dy), dy]), np.array([ddy / (1.0 + dy)])
