class EntboundError(Exception):
    pass


class StructureError(EntboundError, ValueError):
    """Matrix shape incompatible with a d x d bipartite space."""


class DomainError(EntboundError, ValueError):
    """Input outside the mathematical domain (not a state, not PSD, wrong d, ...)."""


class GeometryError(EntboundError, ValueError):
    """Point does not lie in the region an operation requires."""


class ConvergenceError(EntboundError, RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
