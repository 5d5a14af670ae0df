"""
Two-level quantum mechanics over the {|+>, |->} basis: Bloch states, pulse
unitaries, composition and fidelity.

Scalar values (`State2`, `Unitary2`) are immutable and every operation returns
a new value. The batched helpers at the bottom of the module work on numpy
arrays with leading sample axes and are what the simulation engines use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from pulsefid.exceptions import DomainError


def _constant(rows):
    m = np.array(rows, dtype=complex)
    m.setflags(write=False)
    return m


IDENTITY = _constant([[1, 0], [0, 1]])
SIGMA_X = _constant([[0, 1], [1, 0]])
SIGMA_Y = _constant([[0, -1j], [1j, 0]])
SIGMA_Z = _constant([[1, 0], [0, -1]])

# accepted drift of |psi| for states built from accumulated products
NORM_TOL = 1e-10


def _finite(*values):
    return all(cmath.isfinite(v) for v in values)


@dataclass(frozen=True)
class State2:
    """cos(theta/2)|+> + e^{i phi} sin(theta/2)|-> style pure state"""

    plus_amp: complex
    minus_amp: complex

    def __post_init__(self):
        if not _finite(self.plus_amp, self.minus_amp):
            raise DomainError(f"state amplitudes must be finite, got {self.plus_amp}, {self.minus_amp}")
        if abs(self.norm() - 1.0) > NORM_TOL:
            raise DomainError(f"state is not normalized (norm {self.norm()!r})")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.plus_amp, self.minus_amp], dtype=complex)

    @classmethod
    def from_vector(cls, vector) -> State2:
        plus_amp, minus_amp = (complex(v) for v in vector)
        return cls(plus_amp, minus_amp)

    def norm(self) -> float:
        return math.hypot(abs(self.plus_amp), abs(self.minus_amp))

    def bloch_angles(self) -> tuple[float, float]:
        """
        Returns (*theta*, *phi*) with the global phase removed. *phi* is
        reported in [0, 2pi) and is 0 at the poles.
        """
        a, b = abs(self.plus_amp), abs(self.minus_amp)
        theta = 2.0 * math.atan2(b, a)
        if a == 0.0 or b == 0.0:
            return theta, 0.0
        phi = cmath.phase(self.minus_amp) - cmath.phase(self.plus_amp)
        return theta, phi % (2.0 * math.pi)


@dataclass(frozen=True)
class Unitary2:
    """2x2 operator, entries in row-major order"""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        if not _finite(self.a, self.b, self.c, self.d):
            raise DomainError("operator entries must be finite")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    @classmethod
    def from_matrix(cls, m) -> Unitary2:
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise DomainError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    def dagger(self) -> Unitary2:
        return Unitary2(self.a.conjugate(), self.c.conjugate(), self.b.conjugate(), self.d.conjugate())

    def determinant(self) -> complex:
        return self.a * self.d - self.b * self.c

    def unitarity_error(self) -> float:
        """Largest entrywise deviation of U^dagger U from the identity"""
        product = self.matrix.conj().T @ self.matrix
        return float(np.max(np.abs(product - IDENTITY)))


def bloch_state(theta: float, phi: float) -> State2:
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise DomainError(f"Bloch angles must be finite, got theta={theta}, phi={phi}")
    if not 0.0 <= theta <= math.pi:
        raise DomainError(f"colatitude theta={theta} outside [0, pi]")
    return State2(complex(math.cos(theta / 2.0)), cmath.exp(1j * phi) * math.sin(theta / 2.0))


def pulse_unitary(pulse_area: float, pulse_phase: float) -> Unitary2:
    """
    Rotation by *pulse_area* about the axis (cos phi, -sin phi, 0):
    cos(Theta/2) I - i sin(Theta/2) (cos phi sigma_x - sin phi sigma_y).
    """
    if not (math.isfinite(pulse_area) and math.isfinite(pulse_phase)):
        raise DomainError(f"pulse area and phase must be finite, got {pulse_area}, {pulse_phase}")
    c = math.cos(pulse_area / 2.0)
    s = math.sin(pulse_area / 2.0)
    return Unitary2(
        complex(c),
        -1j * s * cmath.exp(1j * pulse_phase),
        -1j * s * cmath.exp(-1j * pulse_phase),
        complex(c),
    )


def amplitude_error_pulse(epsilon: float) -> Unitary2:
    return pulse_unitary(math.pi + epsilon, 0.0)


def phase_error_pulse(phi: float) -> Unitary2:
    return pulse_unitary(math.pi, phi)


def free_evolution(omega: float, t: float) -> Unitary2:
    """exp(-i H0 t) for H0 = omega sigma_z (hbar = 1)"""
    if not (math.isfinite(omega) and math.isfinite(t)):
        raise DomainError(f"omega and t must be finite, got {omega}, {t}")
    if t < 0:
        raise DomainError(f"evolution time must be non-negative, got {t}")
    return Unitary2(cmath.exp(-1j * omega * t), 0j, 0j, cmath.exp(1j * omega * t))


def compose(first: Unitary2, second: Unitary2) -> Unitary2:
    """second . first, i.e. *first* acts first"""
    return Unitary2(
        second.a * first.a + second.b * first.c,
        second.a * first.b + second.b * first.d,
        second.c * first.a + second.d * first.c,
        second.c * first.b + second.d * first.d,
    )


def compose_all(unitaries: Iterable[Unitary2]) -> Unitary2:
    total = Unitary2(1 + 0j, 0j, 0j, 1 + 0j)
    for u in unitaries:
        total = compose(total, u)
    return total


def apply(u: Unitary2, psi: State2) -> State2:
    return State2(
        u.a * psi.plus_amp + u.b * psi.minus_amp,
        u.c * psi.plus_amp + u.d * psi.minus_amp,
    )


def fidelity(reference: State2, actual: State2) -> float:
    overlap = reference.plus_amp.conjugate() * actual.plus_amp + reference.minus_amp.conjugate() * actual.minus_amp
    return min(1.0, max(0.0, abs(overlap) ** 2))


#
# Batched forms. Leading axes index samples; the last one or two axes hold the
# state vector or the 2x2 operator.


def bloch_states(thetas, phis) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    out = np.empty(np.broadcast(thetas, phis).shape + (2,), dtype=complex)
    out[..., 0] = np.cos(thetas / 2.0)
    out[..., 1] = np.exp(1j * phis) * np.sin(thetas / 2.0)
    return out


def pulse_unitaries(pulse_areas, pulse_phases) -> np.ndarray:
    pulse_areas = np.asarray(pulse_areas, dtype=float)
    pulse_phases = np.asarray(pulse_phases, dtype=float)
    c = np.cos(pulse_areas / 2.0)
    s = np.sin(pulse_areas / 2.0)
    out = np.empty(np.broadcast(pulse_areas, pulse_phases).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c
    out[..., 0, 1] = -1j * s * np.exp(1j * pulse_phases)
    out[..., 1, 0] = -1j * s * np.exp(-1j * pulse_phases)
    out[..., 1, 1] = c
    return out


def apply_many(u, psi) -> np.ndarray:
    u = np.asarray(u)
    psi = np.asarray(psi)
    out = np.empty(np.broadcast_shapes(u.shape[:-2], psi.shape[:-1]) + (2,), dtype=complex)
    out[..., 0] = u[..., 0, 0] * psi[..., 0] + u[..., 0, 1] * psi[..., 1]
    out[..., 1] = u[..., 1, 0] * psi[..., 0] + u[..., 1, 1] * psi[..., 1]
    return out


def fidelities(reference, actual) -> np.ndarray:
    reference = np.asarray(reference)
    actual = np.asarray(actual)
    overlap = np.conj(reference[..., 0]) * actual[..., 0] + np.conj(reference[..., 1]) * actual[..., 1]
    return np.clip(overlap.real**2 + overlap.imag**2, 0.0, 1.0)
