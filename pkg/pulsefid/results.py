from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from pulsefid.exceptions import DomainError


@dataclass(frozen=True, eq=False)
class FidelityTrace:
    """
    Fidelity against the initial state, one entry per recorded step (after
    every full cycle for pulse sequences). *pulse_errors* holds the drawn
    per-pulse errors when there are any; *times* holds the physical time of
    each entry for sequences with free evolution.
    """

    per_cycle_fidelity: np.ndarray
    initial_theta: float
    initial_phi: float
    pulse_errors: Optional[np.ndarray] = None
    times: Optional[np.ndarray] = None

    def __len__(self):
        return len(self.per_cycle_fidelity)

    @property
    def final_fidelity(self) -> float:
        return float(self.per_cycle_fidelity[-1])


@dataclass(frozen=True, eq=False)
class FidelityHistogram:
    bin_edges: np.ndarray
    counts: np.ndarray
    n_samples: int

    def __post_init__(self):
        if len(self.bin_edges) != len(self.counts) + 1:
            raise DomainError("a histogram needs exactly one more edge than bins")
        if int(np.sum(self.counts)) != self.n_samples:
            raise DomainError(f"counts sum to {int(np.sum(self.counts))}, expected {self.n_samples}")

    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    def probabilities(self) -> np.ndarray:
        return self.counts / self.n_samples

    def mean(self) -> float:
        return float(np.dot(self.bin_centers(), self.counts) / self.n_samples)
