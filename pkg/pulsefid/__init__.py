__version__ = "0.1.0"

from pulsefid.api.bangbang import BangBangConfig
from pulsefid.api.montecarlo import InitialState, SequenceConfig
from pulsefid.exceptions import ConvergenceError, DomainError, PulseFidException, SimulationError
from pulsefid.noise import NoiseModel, SeededStream
from pulsefid.std import Simulator
