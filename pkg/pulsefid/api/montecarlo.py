from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from pulsefid import su2
from pulsefid.callback import CB
from pulsefid.exceptions import DomainError
from pulsefid.noise import DEFAULT_SEED, MAX_SEED, NoiseKind, NoiseModel, SeededStream, sample_uniform_bloch
from pulsefid.results import FidelityTrace

log = logging.getLogger(__name__)

DEFAULT_BINS = 100


class InitialKind(str, enum.Enum):
    FIXED = "fixed"
    UNIFORM = "uniform"
    WORST_CASE = "worst_case"


@dataclass(frozen=True)
class InitialState:
    """
    How a trajectory picks its initial state. There are three kinds: a fixed
    point of the Bloch sphere, a uniformly random point, and a uniformly
    random point of the worst-case set of the noise model.
    """

    kind: InitialKind
    theta: Optional[float] = None
    phi: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", InitialKind(self.kind))
        if self.kind is InitialKind.FIXED:
            if self.theta is None or self.phi is None:
                raise DomainError("a fixed initial state needs theta and phi")
            su2.bloch_state(self.theta, self.phi)

    @classmethod
    def fixed(cls, theta, phi):
        return cls(InitialKind.FIXED, float(theta), float(phi))

    @classmethod
    def uniform(cls):
        return cls(InitialKind.UNIFORM)

    @classmethod
    def worst_case(cls):
        """
        States with the lowest fidelity for any accumulated error: the great
        circle x = 0 (poles and phi = +-pi/2) for amplitude errors, the
        equator for phase errors.
        """
        return cls(InitialKind.WORST_CASE)

    @classmethod
    def sigma_y(cls):
        """(|+> + i|->) / sqrt(2)"""
        return cls.fixed(math.pi / 2, math.pi / 2)

    def draw(self, rng: np.random.Generator, model: NoiseModel) -> tuple[float, float]:
        if self.kind is InitialKind.FIXED:
            return self.theta, self.phi
        if self.kind is InitialKind.UNIFORM:
            theta, phi = sample_uniform_bloch(rng)
            return float(theta), float(phi)
        if model.kind is NoiseKind.PHASE:
            return math.pi / 2, float(rng.uniform(0.0, 2.0 * math.pi))
        angle = float(rng.uniform(0.0, 2.0 * math.pi))
        theta = math.acos(max(-1.0, min(1.0, math.cos(angle))))
        phi = math.pi / 2 if math.sin(angle) >= 0 else 3 * math.pi / 2
        return theta, phi


@dataclass(frozen=True)
class SequenceConfig:
    """*n_cycles* cycles of two noisy pi pulses each"""

    n_cycles: int
    model: NoiseModel
    initial_state: InitialState = InitialState.uniform()
    master_seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.n_cycles < 1:
            raise DomainError(f"n_cycles must be >= 1, got {self.n_cycles}")
        if not 0 <= self.master_seed < MAX_SEED:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")


#
# Block kernels. They run inside workers, so they are plain module-level
# functions of picklable arguments.


def draw_block(config, start, stop):
    """
    Per-sample random inputs of samples [start, stop). Sample i draws its 2N
    pulse errors first and then its initial state, both from stream i of the
    master seed.
    """
    n_pulses = 2 * config.n_cycles
    size = stop - start
    errors = np.empty((size, n_pulses))
    thetas = np.empty(size)
    phis = np.empty(size)
    for row, index in enumerate(range(start, stop)):
        rng = SeededStream(config.master_seed, index).generator()
        errors[row] = config.model.sample(rng, n_pulses)
        thetas[row], phis[row] = config.initial_state.draw(rng, config.model)
    return errors, thetas, phis


def propagate(model, thetas, phis, errors, free=None):
    """
    Applies the noisy pulses one by one (preceded by *free*, when given) and
    returns the fidelity against the initial state after every second pulse,
    shape (samples, cycles).
    """
    psi0 = su2.bloch_states(thetas, phis)
    psi = psi0
    n_pulses = errors.shape[-1]
    out = np.empty((len(thetas), n_pulses // 2))
    for i in range(n_pulses):
        if free is not None:
            psi = su2.apply_many(free, psi)
        psi = su2.apply_many(model.pulses(errors[:, i]), psi)
        if i % 2 == 1:
            out[:, i // 2] = su2.fidelities(psi0, psi)
    return out


def final_fidelities(config, start, stop):
    errors, thetas, phis = draw_block(config, start, stop)
    return propagate(config.model, thetas, phis, errors)[:, -1]


def trajectories(config, start, stop):
    errors, thetas, phis = draw_block(config, start, stop)
    per_cycle = propagate(config.model, thetas, phis, errors)
    return [FidelityTrace(per_cycle[k], float(thetas[k]), float(phis[k]), errors[k]) for k in range(stop - start)]


class MonteCarlo:
    """
    Ensembles of noisy pulse sequences simulated by explicit 2x2 products.
    Every sample is keyed by its index, so any split of the samples over
    workers gives the same numbers.
    """

    def __init__(self, simulator):
        self.simulator = simulator

    def _jobs(self, config, n_samples):
        return [(config, block.start, block.stop) for block in self.simulator.blocks(n_samples)]

    def simulate_trajectory(self, config, sample_index):
        """
        Returns the `FidelityTrace` of sample *sample_index*: fidelity
        after each of the *n_cycles* cycles.
        """
        if sample_index < 0:
            raise DomainError(f"sample_index must be >= 0, got {sample_index}")
        return self.simulator.executor.map(
            CB.traces(one=True), trajectories, [(config, sample_index, sample_index + 1)]
        )

    def trajectories(self, config, n_trajectories):
        """Traces of samples 0 .. *n_trajectories* - 1"""
        if n_trajectories < 1:
            raise DomainError(f"n_trajectories must be >= 1, got {n_trajectories}")
        return self.simulator.executor.map(CB.traces(), trajectories, self._jobs(config, n_trajectories))

    def ensemble_mean(self, config, n_samples):
        """
        Returns a tuple of (*mean*, *std_error*) of the final-cycle fidelity
        over *n_samples* independent trajectories.
        """
        if n_samples < 2:
            raise DomainError(f"n_samples must be >= 2, got {n_samples}")
        return self.simulator.executor.map(CB.mean(), final_fidelities, self._jobs(config, n_samples))

    def ensemble_histogram(self, config, n_samples, n_bins=DEFAULT_BINS):
        """Final-cycle fidelities binned over *n_bins* equal-width bins of [0, 1]"""
        if n_bins < 1 or n_samples < n_bins:
            raise DomainError(f"need n_samples >= n_bins >= 1, got {n_samples} and {n_bins}")
        return self.simulator.executor.map(CB.histogram(n_bins), final_fidelities, self._jobs(config, n_samples))

    def worst_case_ensemble_mean(self, n_cycles, model, n_samples, master_seed=DEFAULT_SEED):
        config = SequenceConfig(n_cycles, model, InitialState.worst_case(), master_seed)
        return self.ensemble_mean(config, n_samples)

    def ensemble_summary(self, config, n_samples, n_bins=DEFAULT_BINS):
        """
        Returns a tuple of ((*mean*, *std_error*), *histogram*) computed from
        a single pass over the samples.
        """
        if n_samples < 2 or n_bins < 1 or n_samples < n_bins:
            raise DomainError(f"need n_samples >= max(2, n_bins), got {n_samples} and {n_bins}")
        return self.simulator.executor.map(
            CB.combine(CB.mean(), CB.histogram(n_bins)), final_fidelities, self._jobs(config, n_samples)
        )
