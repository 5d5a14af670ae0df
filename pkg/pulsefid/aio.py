import asyncio
import concurrent.futures
import functools

from pulsefid import base

__all__ = ["Simulator"]


class _Closed:
    def __await__(self):
        return iter(())


class Executor(base.Executor):
    """Asyncio adapter: jobs run in a pool and are awaited together"""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        if self.workers == 1:
            self._pool = concurrent.futures.ThreadPoolExecutor(max_workers=1)
        else:
            self._pool = concurrent.futures.ProcessPoolExecutor(max_workers=self.workers)

    async def _map(self, callback, fn, jobs):
        loop = asyncio.get_running_loop()
        results = await asyncio.gather(*(loop.run_in_executor(self._pool, functools.partial(fn, *job)) for job in jobs))
        return callback(list(results))

    def map(self, callback, fn, jobs):
        return self._map(callback, fn, jobs)

    def close(self):
        """
        Shuts the pool down right away. The returned awaitable lets async
        callers write `await executor.close()`.
        """
        self._pool.shutdown()
        return _Closed()


class Simulator(base.Simulator):
    def close(self):
        """Shut down the worker pool"""
        return self.executor.close()

    def executor_connect(self, workers):
        return Executor(workers)
