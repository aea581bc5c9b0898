class SpectraError(ValueError):
    """Base class for domain errors raised by the spectra app."""


class GraphError(SpectraError):
    pass


class DisconnectedGraphError(GraphError):
    pass


class LengthError(SpectraError):
    pass


class EigenSolverError(SpectraError):
    pass


class SymmetryError(SpectraError):
    pass


class SurgeryError(SpectraError):
    pass
