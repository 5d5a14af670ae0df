import math

import numpy as np

from pulsefid.exceptions import SimulationError
from pulsefid.results import FidelityHistogram

#
# Conveniences to reduce the per-block results returned by an executor. Every
# callback receives the block results in block order, so reductions do not
# depend on how many workers produced them.


class CB:
    @classmethod
    def _status(cls, values):
        values = np.asarray(values)
        if not np.all(np.isfinite(values)):
            raise SimulationError("non-finite fidelity returned by a worker")
        if np.any((values < 0.0) | (values > 1.0)):
            raise SimulationError("fidelity outside [0, 1] returned by a worker")

    @classmethod
    def mean(cls):
        """
        Returns (*mean*, *std_error*) of the concatenated sample values. The
        sums are compensated (math.fsum) so they are exact up to the final
        rounding.
        """

        def cb(results):
            values = np.concatenate(results)
            CB._status(values)
            n = values.size
            mean = math.fsum(values) / n
            if n < 2:
                return mean, float("nan")
            variance = math.fsum((values - mean) ** 2) / (n - 1)
            return mean, math.sqrt(variance / n)

        return cb

    @classmethod
    def histogram(cls, n_bins):
        def cb(results):
            values = np.concatenate(results)
            CB._status(values)
            counts, edges = np.histogram(values, bins=n_bins, range=(0.0, 1.0))
            return FidelityHistogram(edges, counts, values.size)

        return cb

    @classmethod
    def traces(cls, one=False):
        """
        Flattens the per-block lists of traces.

        *one* returns only the first trace.
        """

        def cb(results):
            traces = [trace for block in results for trace in block]
            for trace in traces:
                CB._status(trace.per_cycle_fidelity)
            if one:
                return traces[0]
            return traces

        return cb

    @classmethod
    def combine(cls, *callbacks):
        """Applies every callback to the same results and returns their outputs as a tuple"""

        def cb(results):
            return tuple(callback(results) for callback in callbacks)

        return cb
