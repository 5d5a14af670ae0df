from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from pulsefid import su2
from pulsefid.api.montecarlo import InitialKind, InitialState, draw_block, propagate
from pulsefid.callback import CB
from pulsefid.exceptions import DomainError
from pulsefid.noise import DEFAULT_SEED, MAX_SEED, NoiseModel
from pulsefid.results import FidelityTrace

log = logging.getLogger(__name__)

# pulse interval of the reference simulation, in units of 1/omega
DEFAULT_OMEGA_DT = 0.005 * math.pi


@dataclass(frozen=True)
class BangBangConfig:
    """
    A system with self-Hamiltonian omega * sigma_z (hbar = 1) flipped by
    instantaneous noisy pi pulses every *dt*. One cycle is
    free(dt), pulse, free(dt), pulse.
    """

    n_cycles: int
    model: NoiseModel
    omega: float = 1.0
    dt: float = DEFAULT_OMEGA_DT
    initial_state: InitialState = InitialState.sigma_y()
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_cycles < 1:
            raise DomainError(f"n_cycles must be >= 1, got {self.n_cycles}")
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be finite and > 0, got {self.dt}")
        if not math.isfinite(self.omega):
            raise DomainError(f"omega must be finite, got {self.omega}")
        if not 0 <= self.master_seed < MAX_SEED:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if abs(self.omega) * self.dt >= 2 * math.pi:
            log.warning("pulse interval %g is not shorter than 2pi/omega; control will not hold", self.dt)

    @property
    def free(self) -> su2.Unitary2:
        return su2.free_evolution(self.omega, self.dt)

    def cycle_times(self) -> np.ndarray:
        return 2.0 * self.dt * np.arange(1, self.n_cycles + 1)


def cycle_unitary(omega, dt, model=None, errors=(0.0, 0.0)) -> su2.Unitary2:
    """Operator of one cycle with the given errors on its two pulses"""
    model = model or NoiseModel.amplitude(0.0)
    free = su2.free_evolution(omega, dt)
    return su2.compose_all([free, model.pulse(errors[0]), free, model.pulse(errors[1])])


def cycle_ripple(omega, dt, theta=math.pi / 2, phi=math.pi / 2) -> float:
    """
    Largest infidelity inside one noiseless cycle, each sub-step compared with
    where perfect pulses alone would have put the state (psi0 before the first
    pulse, P psi0 between the pulses). At cycle ends the sequence is exactly
    the identity up to phase, so this is the whole residual error.
    """
    psi0 = su2.bloch_state(theta, phi)
    pulse = su2.amplitude_error_pulse(0.0)
    free = su2.free_evolution(omega, dt)
    flipped = su2.apply(pulse, psi0)

    worst = 0.0
    psi = psi0
    for step, reference in ((free, psi0), (pulse, flipped), (free, flipped), (pulse, psi0)):
        psi = su2.apply(step, psi)
        worst = max(worst, 1.0 - su2.fidelity(reference, psi))
    return worst


def free_trace(omega, dt, n_steps, theta, phi):
    psi0 = su2.bloch_state(theta, phi)
    times = dt * np.arange(1, n_steps + 1)
    fids = np.array([su2.fidelity(psi0, su2.apply(su2.free_evolution(omega, t), psi0)) for t in times])
    return [FidelityTrace(fids, theta, phi, times=times)]


def controlled_final_fidelities(config, start, stop):
    errors, thetas, phis = draw_block(config, start, stop)
    return propagate(config.model, thetas, phis, errors, free=config.free.matrix)[:, -1]


def controlled_trajectories(config, start, stop):
    errors, thetas, phis = draw_block(config, start, stop)
    per_cycle = propagate(config.model, thetas, phis, errors, free=config.free.matrix)
    times = config.cycle_times()
    return [
        FidelityTrace(per_cycle[k], float(thetas[k]), float(phis[k]), errors[k], times)
        for k in range(stop - start)
    ]


class BangBang:
    """
    Bang-bang control of a system with its own Hamiltonian omega * sigma_z,
    compared against the uncontrolled evolution.
    """

    def __init__(self, simulator):
        self.simulator = simulator

    def _jobs(self, config, n_samples):
        return [(config, block.start, block.stop) for block in self.simulator.blocks(n_samples)]

    def free_fidelity_trace(self, omega, dt, n_steps, initial_state=None):
        """
        Fidelity of the uncontrolled state at t = dt, 2 dt, ..., n_steps dt.
        *initial_state* must be a fixed state; the sigma_y eigenstate is the
        default.
        """
        initial_state = initial_state or InitialState.sigma_y()
        if initial_state.kind is not InitialKind.FIXED:
            raise DomainError("free evolution needs a fixed initial state")
        if n_steps < 1:
            raise DomainError(f"n_steps must be >= 1, got {n_steps}")
        if not (math.isfinite(dt) and dt > 0):
            raise DomainError(f"dt must be finite and > 0, got {dt}")
        return self.simulator.executor.map(
            CB.traces(one=True), free_trace, [(omega, dt, n_steps, initial_state.theta, initial_state.phi)]
        )

    def bangbang_fidelity_trace(self, config, sample_index):
        if sample_index < 0:
            raise DomainError(f"sample_index must be >= 0, got {sample_index}")
        return self.simulator.executor.map(
            CB.traces(one=True), controlled_trajectories, [(config, sample_index, sample_index + 1)]
        )

    def trajectories(self, config, n_trajectories):
        if n_trajectories < 1:
            raise DomainError(f"n_trajectories must be >= 1, got {n_trajectories}")
        return self.simulator.executor.map(
            CB.traces(), controlled_trajectories, self._jobs(config, n_trajectories)
        )

    def ensemble_mean(self, config, n_samples):
        """Returns (*mean*, *std_error*) of the final-cycle fidelity over *n_samples* seeds"""
        if n_samples < 2:
            raise DomainError(f"n_samples must be >= 2, got {n_samples}")
        return self.simulator.executor.map(CB.mean(), controlled_final_fidelities, self._jobs(config, n_samples))
