"""Exception types shared across the toolkit."""


class HrrisError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatchError(HrrisError):
    """Operands have incompatible or unexpected shapes."""


class SingularMatrixError(HrrisError):
    """A pivot fell below the singularity threshold during elimination."""


class NoConvergenceError(HrrisError):
    """An iterative solver hit its iteration cap without converging."""


class InvalidKappaError(HrrisError):
    """Constriction parameters violate kappa1 + kappa2 > 4."""


class InfeasibleBudgetError(HrrisError):
    """The active power budget cannot be met by any admissible amplitude."""


class FeasibilityFailure(HrrisError):
    """No feasible position was ever observed by the swarm optimizer."""


class ExperimentError(HrrisError):
    """A sweep cell failed to compute; partial results were flushed first."""


class ParseError(HrrisError):
    """An experiment configuration failed to parse or validate."""

    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        parts = []
        if line is not None:
            parts.append(f"line {line}")
        if key is not None:
            parts.append(f"key {key!r}")
        prefix = ", ".join(parts)
        super().__init__(f"{prefix}: {message}" if prefix else message)
        self.line = line
        self.key = key
