"""Exception types shared across the package."""


class EmptyRegionError(ValueError):
    """Raised when moments are requested for a region with (near-)zero area."""


class DuplicateSitesError(ValueError):
    """Two quantizer sites coincide within the geometric tolerance."""


class DegenerateSectorError(ValueError):
    """Sector with zero central angle."""


class EmptyCellError(RuntimeError):
    """A Voronoi cell carries no mass; index of the orphaned site attached."""

    def __init__(self, index: int, message: str | None = None):
        super().__init__(message or f"cell of site {index} is empty")
        self.index = index


class NoConvergenceError(RuntimeError):
    """Iteration budget exhausted; the last iterate is attached as .report."""

    def __init__(self, report, message: str | None = None):
        super().__init__(message or "iteration did not converge")
        self.report = report


class NoRootError(RuntimeError):
    """A stationarity system has no root reachable from the start grid."""


class NoFeasibleCaseError(RuntimeError):
    """Every enumerated case pattern was infeasible (should not happen)."""
