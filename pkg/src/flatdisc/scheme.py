"""One-step schemes generated by discretization maps.

Three constructions are provided:

* :func:`discretize_linear` turns an alpha-family map and a linear system into
  constant matrices ``z+ = A_h z + B_h v``.
* :func:`build_generic_stepper` solves the implicit relation
  ``D^-1(xi, xi+) = (w, h F(w, v))`` for ``xi+`` by Newton iteration, for any
  discretization map ``D``.
* :func:`build_lifted_stepper` is the closed form ``phi^-1(A_h phi(xi) + B_h v)``
  obtained when ``D`` is lifted from a linear discretization through ``phi``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diffeo import COND_LIMIT, Diffeomorphism
from .discmap import DiscretizationMap
from .errors import ArgumentError, ConvergenceError, DomainError, StepsizeError
from .systems import ControlSystem, ExtendedSystem, LinearSystem, eval_dynamics

EXACT_TOL = 1e-12


@dataclass(frozen=True)
class NewtonConfig:
    max_iter: int = 50
    tol: float = 1e-12
    fd_step: float = 1e-7


@dataclass(frozen=True)
class DiscreteScheme:
    """A stepper ``xi+ = F_h(xi, v)``.

    ``step(xi, v, h=None)`` uses the construction step size ``h`` when none is
    given.  ``provenance`` is one of ``"generic_implicit"``,
    ``"lifted_closed_form"``, ``"linear"`` or ``"exact"``.
    """

    step_fn: Callable
    h: float
    order_claimed: int = 1
    provenance: str = "generic_implicit"
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    name: str = ""

    def step(self, xi, v, h=None):
        h = self.h if h is None else float(h)
        if h < 0:
            raise ArgumentError(f"step size must be nonnegative, got {h}")
        return self.step_fn(np.asarray(xi, dtype=float), np.asarray(v, dtype=float), h)

    def run(self, xi0, inputs, h=None):
        """Iterate the scheme over an input sequence; returns ``len(inputs)+1`` states."""
        traj = [np.asarray(xi0, dtype=float)]
        for v in inputs:
            traj.append(self.step(traj[-1], v, h))
        return np.array(traj)


@dataclass(frozen=True)
class LinearDiscretization:
    """Constant matrices of ``z+ = A_h z + B_h v``.

    ``source`` and ``source_alpha`` record where the matrices came from, so the
    discretization can be redone for a different step size.
    """

    a_h: np.ndarray
    b_h: np.ndarray
    h: float
    source_alpha: float | None = None
    source: LinearSystem | None = field(default=None, repr=False)

    def at(self, h: float) -> "LinearDiscretization":
        if h == self.h:
            return self
        if self.source is None or self.source_alpha is None:
            raise ArgumentError("this discretization has no source system; cannot change h")
        return _discretize_alpha(self.source_alpha, self.source, h)

    def residual(self) -> float:
        """Max entry of the defining implicit relation for alpha discretizations."""
        if self.source is None or self.source_alpha is None:
            raise ArgumentError("residual needs the source system and alpha")
        a, b, h, al = self.source.a_matrix, self.source.b_matrix, self.h, self.source_alpha
        eye = np.eye(a.shape[0])
        ra = self.a_h - eye - h * a @ ((1 - al) * eye + al * self.a_h)
        rb = self.b_h - h * al * a @ self.b_h - h * b
        return float(max(np.max(np.abs(ra)), np.max(np.abs(rb))))


def _discretize_alpha(alpha, lin, h):
    a, b = lin.a_matrix, lin.b_matrix
    eye = np.eye(lin.state_dim)
    if alpha == 0.0:
        return LinearDiscretization(eye + h * a, h * b, h, 0.0, lin)
    lhs = eye - alpha * h * a
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise StepsizeError(
            f"I - alpha*h*A is singular for alpha={alpha}, h={h} (cond {cond:.3g}); try a smaller h"
        )
    a_h = np.linalg.solve(lhs, eye + (1.0 - alpha) * h * a)
    b_h = np.linalg.solve(lhs, h * b)
    return LinearDiscretization(a_h, b_h, h, alpha, lin)


def discretize_linear(dmap: DiscretizationMap, lin: LinearSystem, h: float) -> LinearDiscretization:
    """Apply an alpha-family map to ``zdot = A z + B v``.

    Solving ``z+ - z = h (A w + B v)`` with ``w = (1 - alpha) z + alpha z+`` gives

        A_h = (I - alpha h A)^-1 (I + (1 - alpha) h A),  B_h = (I - alpha h A)^-1 h B.
    """
    if dmap.alpha is None:
        raise ArgumentError(f"discretize_linear needs an alpha-family map, got {dmap.kind}")
    if lin.discrete:
        raise ArgumentError("system is already discrete")
    if dmap.dim != lin.state_dim:
        raise ArgumentError(f"map dimension {dmap.dim} != system dimension {lin.state_dim}")
    if not h > 0:
        raise ArgumentError(f"h must be positive, got {h}")
    return _discretize_alpha(dmap.alpha, lin, float(h))


def _fd_jacobian(fun, x, r0, rel):
    n = x.shape[0]
    jac = np.empty((r0.shape[0], n))
    for i in range(n):
        eta = max(rel, rel * abs(x[i]))
        xp, xm = x.copy(), x.copy()
        xp[i] += eta
        xm[i] -= eta
        jac[:, i] = (fun(xp) - fun(xm)) / (xp[i] - xm[i])
    return jac


def newton_solve(residual, guess, config: NewtonConfig):
    """Solve ``residual(x) = 0`` from ``guess``; returns ``(x, iterations)``."""
    x = np.array(guess, dtype=float)
    r = residual(x)
    for it in range(config.max_iter + 1):
        if np.max(np.abs(r)) < config.tol:
            return x, it
        if it == config.max_iter:
            break
        jac = _fd_jacobian(residual, x, r, config.fd_step)
        x = x - np.linalg.solve(jac, r)
        r = residual(x)
    res = float(np.max(np.abs(r)))
    raise ConvergenceError(
        f"Newton did not converge in {config.max_iter} iterations (|R| = {res:.3e})",
        residual=res,
        iterations=config.max_iter,
    )


def _dynamics_of(sys):
    if isinstance(sys, ExtendedSystem):
        return sys.base
    if isinstance(sys, ControlSystem):
        return sys
    if isinstance(sys, LinearSystem):
        return sys.as_control_system()
    raise ArgumentError(f"unsupported system type {type(sys).__name__}")


def build_generic_stepper(dmap: DiscretizationMap, sys, h: float, newton=None) -> DiscreteScheme:
    """Implicit one-step scheme generated by ``dmap`` for ``sys``.

    Each step solves ``R(xi+) = nu - h F(w, v) = 0`` where
    ``(w, nu) = dmap.inverse(xi, xi+)``, starting from the explicit Euler
    predictor.  The Jacobian of ``R`` is taken by central differences.
    """
    plant = _dynamics_of(sys)
    if dmap.dim != plant.state_dim:
        raise ArgumentError(f"map dimension {dmap.dim} != state dimension {plant.state_dim}")
    if not h > 0:
        raise ArgumentError(f"h must be positive, got {h}")
    config = newton or NewtonConfig()

    def step(xi, v, hh):
        def residual(xnext):
            tv = dmap.inv(xi, xnext)
            return tv.vector - hh * eval_dynamics(plant, tv.base, v)

        guess = xi + hh * eval_dynamics(plant, xi, v)
        xnext, _ = newton_solve(residual, guess, config)
        return xnext

    return DiscreteScheme(step, float(h), 1, "generic_implicit", config, name=f"generic[{dmap.kind}]")


def build_lifted_stepper(phi: Diffeomorphism, lind: LinearDiscretization) -> DiscreteScheme:
    """Closed-form flatness-preserving step ``phi^-1(A_h phi(xi) + B_h v)``."""
    if phi.dim != lind.a_h.shape[0]:
        raise ArgumentError(f"diffeomorphism dimension {phi.dim} != linear state dimension {lind.a_h.shape[0]}")
    cache = {lind.h: lind}

    def step(xi, v, hh):
        if hh == 0.0:
            return xi.copy()
        if hh not in cache:
            cache[hh] = lind.at(hh)
        ld = cache[hh]
        return phi.inv(ld.a_h @ phi(xi) + ld.b_h @ v)

    return DiscreteScheme(step, lind.h, 1, "lifted_closed_form", name=f"lifted[{phi.name}]")


def build_linear_stepper(lind: LinearDiscretization) -> DiscreteScheme:
    def step(z, v, hh):
        ld = lind.at(hh) if hh != 0.0 else None
        return z.copy() if ld is None else ld.a_h @ z + ld.b_h @ v

    return DiscreteScheme(step, lind.h, 1, "linear", name="linear")


def explicit_euler(sys, h: float) -> DiscreteScheme:
    """Plain explicit Euler on the given coordinates (not flatness preserving in general)."""
    plant = _dynamics_of(sys)

    def step(x, u, hh):
        return x + hh * eval_dynamics(plant, x, u)

    return DiscreteScheme(step, float(h), 1, "generic_implicit", name="euler")


def rk4_flow(sys, x, u, h, substeps=100, check=None):
    """Integrate ``xdot = f(x, u)`` with ``u`` held, ``substeps`` classical RK4 steps.

    ``check(x, t)`` is called at every substep boundary when given.  A
    :class:`DomainError` raised inside a substep is stamped with its start time.
    """
    plant = _dynamics_of(sys)
    x = np.array(x, dtype=float)
    u = np.asarray(u, dtype=float)
    dt = h / substeps

    def f(y):
        return eval_dynamics(plant, y, u)

    for i in range(substeps):
        if check is not None:
            check(x, i * dt)
        try:
            k1 = f(x)
            k2 = f(x + 0.5 * dt * k1)
            k3 = f(x + 0.5 * dt * k2)
            k4 = f(x + dt * k3)
        except DomainError as exc:
            if exc.time is None:
                exc.time = i * dt
            raise
        x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if check is not None:
        check(x, h)
    return x


def exact_linear_stepper(lin: LinearSystem, h: float) -> DiscreteScheme:
    """Zero-order-hold exact discretization via the augmented matrix exponential."""
    from scipy.linalg import expm

    n, m = lin.state_dim, lin.input_dim

    def step(z, v, hh):
        blk = np.zeros((n + m, n + m))
        blk[:n, :n] = lin.a_matrix
        blk[:n, n:] = lin.b_matrix
        e = expm(blk * hh)
        return e[:n, :n] @ z + e[:n, n:] @ v

    return DiscreteScheme(step, float(h), 99, "exact", name="exact")


@dataclass(frozen=True)
class OrderStudy:
    """Local errors of a scheme against a reference flow.

    ``slope`` is the least-squares slope of ``log(error / h)`` against
    ``log h``: a scheme of order ``r`` has local error ``O(h^(r+1))`` and so
    slope close to ``r``.  ``exact`` is set when every error is below 1e-12, in
    which case ``slope`` is ``inf``.
    """

    h: np.ndarray
    errors: np.ndarray
    ratios: np.ndarray
    slope: float
    exact: bool

    def as_text(self) -> str:
        lines = [f"{'h':>12} {'error':>14} {'ratio':>10}"]
        for h, e, r in zip(self.h, self.errors, self.ratios):
            ratio = "" if np.isnan(r) else f"{r:10.4f}"
            lines.append(f"{h:12.6g} {e:14.6e} {ratio:>10}")
        lines.append("slope=exact" if self.exact else f"slope={self.slope:.4f}")
        return "\n".join(lines) + "\n"


def measure_order(scheme: DiscreteScheme, sys, point, h_list, oracle=None, substeps=100) -> OrderStudy:
    """Observed order of ``scheme`` at ``point = (xi, v)`` under a held input.

    ``oracle(sys, xi, v, h)`` gives the reference end point; by default a
    fixed-substep RK4 integration with ``substeps`` substeps.
    """
    hs = np.asarray(h_list, dtype=float)
    if hs.size < 3:
        raise ArgumentError("need at least three step sizes")
    if np.any(hs <= 0) or np.any(np.diff(hs) >= 0):
        raise ArgumentError("step sizes must be positive and strictly decreasing")
    xi, v = (np.asarray(p, dtype=float) for p in point)
    if oracle is None:
        def oracle(s, x, u, h):
            return rk4_flow(s, x, u, h, substeps)

    errors = np.array([np.max(np.abs(oracle(sys, xi, v, h) - scheme.step(xi, v, h))) for h in hs])
    ratios = np.full(hs.size, np.nan)
    ratios[1:] = errors[:-1] / np.where(errors[1:] > 0, errors[1:], np.nan)
    if np.all(errors < EXACT_TOL):
        return OrderStudy(hs, errors, ratios, float("inf"), True)
    slope = np.polyfit(np.log(hs), np.log(errors / hs), 1)[0]
    return OrderStudy(hs, errors, ratios, float(slope), False)
