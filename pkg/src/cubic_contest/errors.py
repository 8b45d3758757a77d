"""Exception types shared across the solver modules."""


class ContestError(ValueError):
    """Invalid parameters or a request outside an operation's domain."""


class InapplicableCriterion(ContestError):
    """A sufficient condition whose own premise fails (distinct from 'false')."""


class SolverError(RuntimeError):
    """A root-finder or quadrature rule failed to converge."""
