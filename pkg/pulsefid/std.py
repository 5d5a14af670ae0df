import concurrent.futures
import logging

from pulsefid import base

__all__ = ["Simulator"]

log = logging.getLogger(__name__)


class Executor(base.Executor):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._pool = None

    def _run(self, fn, jobs):
        if self.workers == 1 or len(jobs) < 2:
            return [fn(*job) for job in jobs]
        if self._pool is None:
            self._pool = concurrent.futures.ProcessPoolExecutor(max_workers=self.workers)
        return list(self._pool.map(fn, *zip(*jobs)))

    def map(self, callback, fn, jobs):
        log.debug("running %d job(s) of %s on %d worker(s)", len(jobs), fn.__name__, self.workers)
        return callback(self._run(fn, jobs))

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None


class Simulator(base.Simulator):
    def executor_connect(self, workers):
        return Executor(workers)
