from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from pulsefid import su2
from pulsefid.exceptions import DomainError

MAX_SEED = 2**64
# seed used when none is given, so bare runs are reproducible
DEFAULT_SEED = 20011015


class NoiseKind(str, enum.Enum):
    AMPLITUDE = "amplitude"
    PHASE = "phase"


@dataclass(frozen=True)
class NoiseModel:
    """
    Gaussian, zero-mean, independent pulse errors of standard deviation
    *delta* radians. There are two kinds: amplitude errors perturb the pulse
    area (pi + eps), phase errors perturb the rotation axis (pi pulse about
    an axis at angle phi).
    """

    kind: NoiseKind
    delta: float

    def __post_init__(self):
        object.__setattr__(self, "kind", NoiseKind(self.kind))
        if not math.isfinite(self.delta) or self.delta < 0:
            raise DomainError(f"delta must be finite and >= 0, got {self.delta}")

    @classmethod
    def amplitude(cls, delta):
        return cls(NoiseKind.AMPLITUDE, float(delta))

    @classmethod
    def phase(cls, delta):
        return cls(NoiseKind.PHASE, float(delta))

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self.delta * rng.standard_normal(count)

    def pulses(self, errors) -> np.ndarray:
        """Batched pulse unitaries for an array of per-pulse errors"""
        errors = np.asarray(errors, dtype=float)
        if self.kind is NoiseKind.AMPLITUDE:
            return su2.pulse_unitaries(np.pi + errors, np.zeros_like(errors))
        return su2.pulse_unitaries(np.full_like(errors, np.pi), errors)

    def pulse(self, error: float) -> su2.Unitary2:
        if self.kind is NoiseKind.AMPLITUDE:
            return su2.amplitude_error_pulse(error)
        return su2.phase_error_pulse(error)

    def accumulated_error(self, errors) -> np.ndarray:
        """
        Net rotation error of a sequence of pulses, along the last axis of
        *errors*. Amplitude errors simply add; for phase errors the explicit
        products give 2 * (phi_1 - phi_2 + phi_3 - ...), which has the same
        distribution as 2 * sum(phi_i).
        """
        errors = np.asarray(errors, dtype=float)
        if self.kind is NoiseKind.AMPLITUDE:
            return errors.sum(axis=-1)
        signs = np.where(np.arange(errors.shape[-1]) % 2 == 0, 1.0, -1.0)
        return 2.0 * (errors * signs).sum(axis=-1)


@dataclass(frozen=True)
class SeededStream:
    """
    One reproducible substream of a master seed.

    The mixing is numpy's SeedSequence hash of (master_seed, stream_index)
    feeding a PCG64 generator, so a stream never depends on which worker
    draws it or on how many other streams exist.
    """

    master_seed: int
    stream_index: int

    def __post_init__(self):
        if not 0 <= self.master_seed < MAX_SEED:
            raise DomainError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.stream_index < 0:
            raise DomainError(f"stream_index must be >= 0, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_index,))
        return np.random.Generator(np.random.PCG64(seq))


def sample_pulse_errors(model: NoiseModel, count: int, stream: SeededStream) -> np.ndarray:
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    return model.sample(stream.generator(), count)


def accumulated_error_std(model: NoiseModel, n_cycles: int) -> float:
    if n_cycles < 1:
        raise DomainError(f"n_cycles must be >= 1, got {n_cycles}")
    scale = 1.0 if model.kind is NoiseKind.AMPLITUDE else 2.0
    return scale * math.sqrt(2 * n_cycles) * model.delta


def sample_uniform_bloch(rng: np.random.Generator, size=None):
    """(theta, phi) uniformly distributed over the Bloch sphere"""
    cos_theta = rng.uniform(-1.0, 1.0, size)
    phi = rng.uniform(0.0, 2.0 * np.pi, size)
    return np.arccos(cos_theta), phi
