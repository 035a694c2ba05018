"""Discrete-time flatness-based tracking for the two Brunovsky chains (3, 2)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ArgumentError
from .scheme import LinearDiscretization

PAPER_GAIN = -np.array([[10.0, 10.0, 10.0, 0.0, 0.0], [0.0, 0.0, 0.0, 10.0, 10.0]])
PRINTED_EIGENVALUES = np.array([-0.73 + 0j, 0.12 + 0.81j, 0.12 - 0.81j, 0.25 + 0.66j, 0.25 - 0.66j])
LOOKAHEAD = 3


def horizon_steps(horizon: float, h: float) -> int:
    """``ceil(horizon / h)``, tolerant to the rounding of ``horizon / h``."""
    return int(math.ceil(horizon / h - 1e-9))


@dataclass(frozen=True)
class FlatReference:
    """Sampled flat-output references ``phi_i*[k] = phi_i*(k h)``.

    Three samples beyond the horizon are kept so that third forward
    differences exist at the last step.
    """

    functions: Sequence[Callable]
    h: float
    horizon: float
    samples: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.h > 0 or self.horizon < 0:
            raise ArgumentError("need h > 0 and horizon >= 0")
        count = horizon_steps(self.horizon, self.h) + 1 + LOOKAHEAD
        t = np.arange(count) * self.h
        samples = np.array([[float(f(tk)) for tk in t] for f in self.functions])
        object.__setattr__(self, "samples", samples)

    @property
    def steps(self) -> int:
        return horizon_steps(self.horizon, self.h)

    def window(self, k: int, width: int) -> np.ndarray:
        if k < 0 or k + width > self.samples.shape[1]:
            raise IndexError(f"reference index {k} (+{width - 1} shifts) beyond {self.samples.shape[1]} samples")
        return self.samples[:, k : k + width]


def paper_references(h: float = 0.05, horizon: float = 10.0) -> FlatReference:
    return FlatReference(
        (
            lambda t: 0.3 + 0.05 * math.sin(0.4 * math.pi * t),
            lambda t: 0.1 + 0.05 * math.sin(0.2 * math.pi * t),
        ),
        h,
        horizon,
    )


def flat_to_nominal_state(ref: FlatReference, k: int) -> np.ndarray:
    p1, p2 = ref.window(k, 3)
    h = ref.h
    return np.array(
        [
            p1[0],
            (p1[1] - p1[0]) / h,
            (p1[2] - 2.0 * p1[1] + p1[0]) / h**2,
            p2[0],
            (p2[1] - p2[0]) / h,
        ]
    )


def nominal_input(ref: FlatReference, k: int) -> np.ndarray:
    w = ref.window(k, 4)
    p1, p2 = w[0], w[1]
    h = ref.h
    return np.array(
        [
            (p1[3] - 3.0 * p1[2] + 3.0 * p1[1] - p1[0]) / h**3,
            (p2[2] - 2.0 * p2[1] + p2[0]) / h**2,
        ]
    )


@dataclass(frozen=True)
class TrackingLaw:
    """``v[k] = v*[k] + K (z[k] - z*[k])``."""

    gain: np.ndarray
    lind: LinearDiscretization
    reference: FlatReference

    def __post_init__(self):
        object.__setattr__(self, "gain", np.asarray(self.gain, dtype=float))
        n, m = self.lind.b_h.shape
        if self.gain.shape != (m, n):
            raise ArgumentError(f"gain must be {m}x{n}, got {self.gain.shape}")

    @property
    def spectrum(self) -> np.ndarray:
        return closed_loop_spectrum(self.lind.a_h, self.lind.b_h, self.gain)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.spectrum)))


def control_step(law: TrackingLaw, z, k: int) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return nominal_input(law.reference, k) + law.gain @ (z - flat_to_nominal_state(law.reference, k))


def closed_loop_spectrum(a_h, b_h, gain) -> np.ndarray:
    """Eigenvalues of ``A_h + B_h K`` sorted by real, then imaginary part."""
    ev = np.linalg.eigvals(np.asarray(a_h) + np.asarray(b_h) @ np.asarray(gain))
    return ev[np.lexsort((ev.imag, ev.real))]


def eigenvalue_distances(computed, printed=PRINTED_EIGENVALUES) -> np.ndarray:
    """Distance from each printed eigenvalue to the nearest computed one."""
    computed = np.asarray(computed)
    return np.array([np.min(np.abs(computed - p)) for p in printed])


def discrete_tracking_loop(law: TrackingLaw, z0, steps: int | None = None) -> np.ndarray:
    """Iterate the linear model ``z+ = A_h z + B_h v`` under the tracking law.

    Returns the error history ``z[k] - z*[k]`` for ``k = 0..steps``.
    """
    steps = law.reference.steps if steps is None else steps
    z = np.asarray(z0, dtype=float)
    errs = []
    for k in range(steps + 1):
        errs.append(z - flat_to_nominal_state(law.reference, k))
        if k < steps:
            z = law.lind.a_h @ z + law.lind.b_h @ control_step(law, z, k)
    return np.array(errs)
