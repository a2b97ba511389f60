class NumericalError(RuntimeError):
    """A solver could not produce a trustworthy answer (bad bracket, no sign change, ...)."""


class SpectrumError(NumericalError):
    """The ODE system matrix has a non-real or non-positive spectrum."""
