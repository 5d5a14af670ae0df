class PulseFidException(Exception):
    pass


class DomainError(PulseFidException):
    """An argument lies outside the domain of the operation"""


class ConvergenceError(PulseFidException):
    pass


class SimulationError(PulseFidException):
    """A worker returned fidelities that are not finite or not in [0, 1]"""
