import abc
import collections
import inspect
import logging
import os

from pulsefid.api.bangbang import BangBang
from pulsefid.api.montecarlo import MonteCarlo
from pulsefid.exceptions import PulseFidException

log = logging.getLogger(__name__)

# samples per job; results never depend on the worker count, only on this
DEFAULT_BLOCK_SIZE = 2048

Block = collections.namedtuple("Block", ["start", "stop"])


def blocks(n_samples, block_size=DEFAULT_BLOCK_SIZE):
    """Consecutive [start, stop) sample ranges of at most *block_size*"""
    return [Block(start, min(start + block_size, n_samples)) for start in range(0, n_samples, block_size)]


class Executor(metaclass=abc.ABCMeta):
    def __init__(self, workers=1):
        if workers < 1:
            raise PulseFidException(f"workers must be >= 1, got {workers}")
        self.workers = workers

    @abc.abstractmethod
    def map(self, callback, fn, jobs):
        """
        Runs fn(*job) for every job and hands the results, in job order, to
        *callback*.
        """
        raise NotImplementedError

    @abc.abstractmethod
    def close(self):
        raise NotImplementedError


def _env_int(name, default):
    raw = os.getenv(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError as err:
        raise PulseFidException(f"{name} ({raw}) invalid, expected an integer") from err


class Simulator:
    def __init__(self, workers=1, block_size=DEFAULT_BLOCK_SIZE):
        """
        *workers* is the number of processes used for ensemble runs. It only
        changes wall time, never results.

        *block_size* is the number of samples handed to a worker at once.
        Results are reproducible for a fixed block size.

        The PULSEFID_WORKERS and PULSEFID_BLOCK_SIZE environment variables
        override both arguments.
        """

        workers = _env_int("PULSEFID_WORKERS", workers)
        block_size = _env_int("PULSEFID_BLOCK_SIZE", block_size)
        if block_size < 1:
            raise PulseFidException(f"block_size must be >= 1, got {block_size}")

        self.block_size = block_size
        self.executor = self.executor_connect(workers)
        log.debug("simulator with %d worker(s), %d samples per block", workers, block_size)

        self.montecarlo = MonteCarlo(self)
        self.bangbang = BangBang(self)

    def blocks(self, n_samples):
        return blocks(n_samples, self.block_size)

    def __enter__(self):
        return self

    async def __aenter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.executor.close()

    async def __aexit__(self, exc_type, exc, tb):
        closing = self.executor.close()
        if inspect.isawaitable(closing):
            await closing

    @abc.abstractmethod
    def executor_connect(self, workers):
        pass
