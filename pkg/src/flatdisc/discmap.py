"""Discretization maps, the alpha family, axiom checks and lifts through charts.

A discretization map sends a tangent vector ``(x, nu)`` to a pair of points
``(D1(x, nu), D2(x, nu))``.  It must return ``(x, x)`` for ``nu = 0`` and its
two components must differ, to first order in ``nu``, by exactly ``nu``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diffeo import Diffeomorphism, TangentVector, solve_checked
from .errors import ArgumentError, FlatdiscError


@dataclass(frozen=True)
class DiscretizationMap:
    """Pair ``forward(x, nu) -> (a, b)`` and ``inverse(a, b) -> TangentVector``.

    ``kind`` is a short tag, e.g. ``"alpha(0.5)"`` or
    ``"lifted(alpha(0),quad-phi)"``.  ``alpha`` is set for members of the alpha
    family and is ``None`` otherwise; ``inner`` and ``phi`` are set on lifts.
    """

    dim: int
    forward: Callable
    inverse: Callable
    kind: str
    alpha: float | None = None
    inner: "DiscretizationMap | None" = field(default=None, repr=False)
    phi: Diffeomorphism | None = field(default=None, repr=False)

    def __call__(self, x, nu):
        return self.forward(np.asarray(x, dtype=float), np.asarray(nu, dtype=float))

    def inv(self, a, b) -> TangentVector:
        return self.inverse(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def alpha_map(alpha: float, dim: int) -> DiscretizationMap:
    """``D(x, nu) = (x - alpha nu, x + (1 - alpha) nu)`` on R^dim.

    The inverse of ``(a, b)`` is ``nu = b - a`` at base ``a + alpha nu``, so the
    base point is ``(1 - alpha) a + alpha b``: ``alpha = 0`` gives explicit Euler
    and ``alpha = 1`` implicit Euler.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise ArgumentError(f"alpha must lie in [0, 1], got {alpha}")
    if dim < 1:
        raise ArgumentError(f"dim must be positive, got {dim}")

    def forward(x, nu):
        return x - alpha * nu, x + (1.0 - alpha) * nu

    def inverse(a, b):
        nu = b - a
        return TangentVector(a + alpha * nu, nu)

    return DiscretizationMap(dim, forward, inverse, kind=f"alpha({alpha:g})", alpha=alpha)


def lift_map(inner: DiscretizationMap, phi: Diffeomorphism) -> DiscretizationMap:
    """Pull a discretization map on the target of ``phi`` back to its source.

    ``forward = (phi^-1 x phi^-1) o inner.forward o T phi`` and
    ``inverse = T phi^-1 o inner.inverse o (phi x phi)``.

    Whenever ``inner`` hands back the image point ``phi(x)`` itself, the known
    preimage ``x`` is returned instead of ``phi^-1(phi(x))``; this keeps
    ``forward(x, 0) == (x, x)`` bit-exact.
    """
    if inner.dim != phi.dim:
        raise ArgumentError(f"dimension mismatch: map {inner.dim}, diffeomorphism {phi.dim}")

    def pull(point, known_image, known_pre):
        for img, pre in zip(known_image, known_pre):
            if np.array_equal(point, img):
                return pre
        return phi.inv(point)

    def forward(xi, nu):
        z = phi(xi)
        a, b = inner.forward(z, phi.jac(xi) @ nu)
        return pull(a, (z,), (xi,)), pull(b, (z,), (xi,))

    def inverse(xi, xi_next):
        z, z_next = phi(xi), phi(xi_next)
        tv = inner.inverse(z, z_next)
        base = pull(tv.base, (z, z_next), (xi, xi_next))
        return TangentVector(base, solve_checked(phi.jac(base), tv.vector, point=base))

    return DiscretizationMap(
        inner.dim, forward, inverse, kind=f"lifted({inner.kind},{phi.name})", inner=inner, phi=phi
    )


@dataclass(frozen=True)
class AxiomTolerances:
    identity: float = 1e-12
    tangency: float = 1e-4
    roundtrip: float = 1e-9
    epsilon: float = 1e-5
    nu_radius: float = 0.1


@dataclass(frozen=True)
class AxiomReport:
    samples_tested: int
    max_identity_defect: float
    max_tangency_defect: float
    max_roundtrip_defect: float
    passed: bool
    failures: int = 0

    def as_text(self) -> str:
        lines = [
            f"samples_tested={self.samples_tested}",
            f"max_identity_defect={self.max_identity_defect:.6e}",
            f"max_tangency_defect={self.max_tangency_defect:.6e}",
            f"max_roundtrip_defect={self.max_roundtrip_defect:.6e}",
            f"evaluation_failures={self.failures}",
            f"pass={'true' if self.passed else 'false'}",
        ]
        return "\n".join(lines) + "\n"


def check_axioms(dmap: DiscretizationMap, sample_points, tolerances=None, seed=0) -> AxiomReport:
    """Check the discretization-map axioms at each sample point.

    For every base point ``x`` a vector ``nu`` is drawn uniformly from the cube
    of half-width ``tolerances.nu_radius``, and three defects are recorded:

    * identity: ``max |D_i(x, 0) - x|``
    * tangency: ``|(D2 - D1)(x, eps nu) / eps - nu|`` with ``eps = tolerances.epsilon``
    * round trip: distance of ``inverse(forward(x, nu))`` from ``(x, nu)``

    Points where evaluation raises are counted as failures; nothing is raised.
    """
    tol = tolerances or AxiomTolerances()
    rng = np.random.default_rng(seed)
    points = [np.asarray(p, dtype=float) for p in sample_points]
    ident = tang = rt = 0.0
    failures = 0
    for x in points:
        nu = rng.uniform(-tol.nu_radius, tol.nu_radius, size=dmap.dim)
        try:
            a0, b0 = dmap(x, np.zeros(dmap.dim))
            ident = max(ident, float(np.max(np.abs(a0 - x))), float(np.max(np.abs(b0 - x))))

            a, b = dmap(x, tol.epsilon * nu)
            tang = max(tang, float(np.max(np.abs((b - a) / tol.epsilon - nu))))

            a, b = dmap(x, nu)
            back = dmap.inv(a, b)
            rt = max(rt, float(np.max(np.abs(back.base - x))), float(np.max(np.abs(back.vector - nu))))
        except (FlatdiscError, np.linalg.LinAlgError):
            failures += 1
    passed = (
        failures == 0
        and bool(points)
        and ident <= tol.identity
        and tang < tol.tangency
        and rt < tol.roundtrip
    )
    return AxiomReport(len(points), ident, tang, rt, passed, failures)
