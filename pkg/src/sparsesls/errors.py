"""Exception types shared across the library."""


class SparseSlsError(Exception):
    """Base class for all library-specific errors."""


class SingularPencil(SparseSlsError):
    """The bilinear-transform pencil I - (tau/2)*A is numerically singular."""


class BoundInapplicable(SparseSlsError):
    """An a-priori error bound was requested outside its validity region."""


class ContractViolation(SparseSlsError):
    """An input violates a structural contract (e.g. Phi_x[1] != I)."""


class AllInfeasible(SparseSlsError):
    """No gamma in [0, 1) yields a feasible synthesis problem."""


class TopologyError(SparseSlsError):
    """A network description is malformed or not connected."""


class MatrixFileError(SparseSlsError):
    """A matrix file could not be parsed.

    Carries the offending line number when one can be attributed.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix = f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)
