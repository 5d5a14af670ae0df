"""
Closed-form fidelity statistics of imperfect pi-pulse sequences and the
quadrature of the fidelity probability density.

All functions accept scalars; the fidelity formulas also broadcast over numpy
arrays.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from pulsefid.exceptions import ConvergenceError, DomainError
from pulsefid.noise import NoiseKind, NoiseModel

log = logging.getLogger(__name__)

# densities are only evaluated on (DEFAULT_EDGE, 1 - DEFAULT_EDGE)
DEFAULT_EDGE = 1e-6


def _clip_unit(value):
    out = np.clip(value, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def _check_cycles(n_cycles):
    if n_cycles < 1:
        raise DomainError(f"n_cycles must be >= 1, got {n_cycles}")


def _check_positive(name, value):
    if not (math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be finite and > 0, got {value}")


def fidelity_amplitude(epsilon, theta, phi):
    """cos^2(eps/2) + sin^2(eps/2) sin^2(theta) cos^2(phi)"""
    s = np.sin(np.asarray(epsilon) / 2.0) ** 2
    x = np.sin(theta) * np.cos(phi)
    return _clip_unit(1.0 - s + s * x**2)


def fidelity_phase(epsilon, theta):
    """cos^2(eps/2) + sin^2(eps/2) cos^2(theta)"""
    s = np.sin(np.asarray(epsilon) / 2.0) ** 2
    return _clip_unit(1.0 - s + s * np.cos(theta) ** 2)


def minimum_fidelity(epsilon):
    """Fidelity of the worst-case initial states for an accumulated error *epsilon*"""
    return _clip_unit(np.cos(np.asarray(epsilon) / 2.0) ** 2)


def free_evolution_fidelity(omega, t, theta):
    """Overlap of exp(-i omega t sigma_z)|psi0> with |psi0>; cos^2(omega t) on the equator"""
    return _clip_unit(np.cos(omega * np.asarray(t)) ** 2 + np.sin(omega * np.asarray(t)) ** 2 * np.cos(theta) ** 2)


def effective_n_delta_sq(n_cycles: int, model: NoiseModel) -> float:
    """
    N * delta^2 for amplitude errors. Phase errors accumulate twice as fast
    (std 2 sqrt(2N) delta), so every amplitude result holds with N -> 4N.
    """
    _check_cycles(n_cycles)
    scale = 1 if model.kind is NoiseKind.AMPLITUDE else 4
    return scale * n_cycles * model.delta**2


def mean_fidelity(n_cycles: int, model: NoiseModel) -> float:
    """Average over the uniform Bloch sphere and the error distribution"""
    return 2.0 / 3.0 + math.exp(-effective_n_delta_sq(n_cycles, model)) / 3.0


def worst_case_mean_fidelity(n_cycles: int, model: NoiseModel) -> float:
    return 0.5 + 0.5 * math.exp(-effective_n_delta_sq(n_cycles, model))


def max_cycles(delta: float) -> float:
    _check_positive("delta", delta)
    return 1.0 / delta**2


def max_protection_time(tau_c: float, delta: float) -> float:
    """Longest protection time when one cycle must fit in each correlation time *tau_c*"""
    _check_positive("tau_c", tau_c)
    return tau_c * max_cycles(delta)


#
# Probability density of the fidelity


@dataclass(frozen=True)
class QuadratureSpec:
    """
    *n_points* Gauss-Legendre nodes per term of the n-sum, at most
    *n_term_cap* terms on each side of n = 0, and terms whose peak over the
    nodes is below *term_tol* end the sum.
    """

    n_points: int = 128
    n_term_cap: int = 50
    term_tol: float = 1e-15

    def __post_init__(self):
        if self.n_points < 16:
            raise DomainError(f"n_points must be >= 16, got {self.n_points}")
        if self.n_term_cap < 1:
            raise DomainError(f"n_term_cap must be >= 1, got {self.n_term_cap}")
        if not self.term_tol > 0:
            raise DomainError(f"term_tol must be > 0, got {self.term_tol}")


DEFAULT_QUADRATURE = QuadratureSpec()


@functools.lru_cache(maxsize=16)
def _half_pi_rule(n_points):
    nodes, weights = special.roots_legendre(n_points)
    return 0.5 * np.pi * nodes, 0.5 * np.pi * weights


def fidelity_pdf_many(fidelities, n_delta_sq: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> np.ndarray:
    """
    Density of the final fidelity for a uniformly random initial state.

    With x = sqrt(F) sin(u) the inner integral runs over u in [-pi/2, pi/2]
    and the (F - x^2)^(-1/2) endpoint singularity cancels against dx; the
    remaining (1 - F)^(-1/2) factor is applied analytically.
    """
    f = np.asarray(fidelities, dtype=float)
    if not np.all((f > 0.0) & (f < 1.0)):
        raise DomainError("fidelity must lie strictly inside (0, 1)")
    _check_positive("n_delta_sq", n_delta_sq)

    u, w = _half_pi_rule(spec.n_points)
    fc = f.reshape(-1, 1)
    ratio = (1.0 - fc) / (1.0 - fc * np.sin(u) ** 2)
    a = np.arcsin(np.sqrt(np.minimum(ratio, 1.0)))

    total = np.exp(-(a**2) / n_delta_sq)
    n = 0
    while True:
        n += 1
        upper = np.exp(-((a - n * np.pi) ** 2) / n_delta_sq)
        lower = np.exp(-((a + n * np.pi) ** 2) / n_delta_sq)
        total += upper + lower
        peak = max(upper.max(), lower.max())
        if peak < spec.term_tol:
            break
        if n >= spec.n_term_cap:
            raise ConvergenceError(
                f"n-sum not converged at |n| = {n} for N*delta^2 = {n_delta_sq} (last term peak {peak:.3g})"
            )
    log.debug("density at %d points used |n| <= %d", f.size, n)

    density = (total * w).sum(axis=1) / (math.sqrt(4.0 * math.pi * n_delta_sq) * np.sqrt(1.0 - fc[:, 0]))
    return density.reshape(f.shape)


def fidelity_pdf(fidelity: float, n_delta_sq: float, spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    return float(fidelity_pdf_many(fidelity, n_delta_sq, spec))


@dataclass(frozen=True, eq=False)
class PdfGrid:
    fidelity_points: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.fidelity_points, dtype=float)
        p = np.asarray(self.densities, dtype=float)
        if f.ndim != 1 or f.shape != p.shape or f.size < 2:
            raise DomainError("fidelity_points and densities must be 1-d arrays of equal length >= 2")
        if not (np.all(np.diff(f) > 0) and f[0] > 0 and f[-1] < 1):
            raise DomainError("fidelity_points must be strictly increasing inside (0, 1)")
        if np.any(p < 0):
            raise DomainError("densities must be non-negative")
        object.__setattr__(self, "fidelity_points", f)
        object.__setattr__(self, "densities", p)

    def integrate(self, moment: int = 0) -> float:
        """
        Integral of F^moment P(F) over [0, 1].

        The body is a trapezoid rule in t = sqrt(1 - F), where 2 t P is
        bounded. Near F = 1, P ~ C / sqrt(1 - F), so the top tail carries
        2 t_min^2 P(F_max); near F = 0, P is finite and the bottom tail is
        P(F_min) F_min^(moment + 1) / (moment + 1).
        """
        f = self.fidelity_points
        t = np.sqrt(1.0 - f)
        g = 2.0 * t * self.densities * f**moment
        body = integrate.trapezoid(g[::-1], t[::-1])
        top = t[-1] * g[-1]
        bottom = self.densities[0] * f[0] ** (moment + 1) / (moment + 1)
        return float(body + top + bottom)

    def normalization(self) -> float:
        return self.integrate(0)

    def mean(self) -> float:
        return self.integrate(1)


def pdf_grid(
    n_delta_sq: float,
    grid_size: int = 2001,
    edge: float = DEFAULT_EDGE,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
) -> PdfGrid:
    """Density on *grid_size* points of (edge, 1 - edge), uniform in sqrt(1 - F)"""
    if grid_size < 2:
        raise DomainError(f"grid_size must be >= 2, got {grid_size}")
    if not 0 < edge < 0.5:
        raise DomainError(f"edge must be in (0, 0.5), got {edge}")
    t = np.linspace(math.sqrt(1.0 - edge), math.sqrt(edge), grid_size)
    f = 1.0 - t**2
    return PdfGrid(f, fidelity_pdf_many(f, n_delta_sq, spec))


def bin_probabilities(
    edges,
    n_delta_sq: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    nodes_per_bin: int = 16,
) -> np.ndarray:
    """Probability mass of each bin [edges[i], edges[i+1]] under the density"""
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0) or edges[0] < 0 or edges[-1] > 1:
        raise DomainError("edges must be strictly increasing within [0, 1]")
    x, w = special.roots_legendre(nodes_per_bin)
    t_lo = np.sqrt(1.0 - edges[1:])
    t_hi = np.sqrt(1.0 - edges[:-1])
    half = 0.5 * (t_hi - t_lo)
    t = 0.5 * (t_hi + t_lo)[:, None] + half[:, None] * x[None, :]
    p = fidelity_pdf_many(1.0 - t**2, n_delta_sq, spec)
    return (2.0 * t * p * w).sum(axis=1) * half
