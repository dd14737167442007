class ShotmaxError(Exception):
    """Base class for every error raised by shotmax."""


class DomainError(ShotmaxError, ValueError):
    """An argument lies outside the domain of the operation."""


class ShapeError(ShotmaxError, ValueError):
    """Array lengths or grids do not line up."""


class QueryError(ShotmaxError, ValueError):
    """A finite-dimensional query (times, thresholds) is malformed."""


class ContractError(ShotmaxError, ValueError):
    """A caller supplied callable broke its contract."""


class SynthesisError(ShotmaxError, ArithmeticError):
    """Exact Gaussian synthesis could not be carried out."""

    def __init__(self, message: str, eigenvalue: float | None = None):
        super().__init__(message)
        self.eigenvalue = eigenvalue
