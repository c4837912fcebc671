"""
memsvd exception hierarchy
"""


class MemSVDError(Exception):
    """Base class for all memsvd errors"""


class DimensionMismatchError(MemSVDError, ValueError):
    pass


class NonFiniteInputError(MemSVDError, ValueError):
    pass


class ConvergenceError(MemSVDError, ArithmeticError):
    """Raised when the Jacobi SVD exceeds its sweep budget (ill-conditioning)"""


class RankError(MemSVDError, ValueError):
    """Requested rank / number of components outside the admissible range"""


class RankDeficiencyError(MemSVDError, ArithmeticError):
    """Top singular values too small for the coefficient matrix to exist"""


class EmptyMemoryError(MemSVDError, ValueError):
    pass


class OrderingError(MemSVDError, ValueError):
    """Clip timestamps must be strictly increasing"""


class OrthonormalityError(MemSVDError, ValueError):
    pass


class BankFormatError(MemSVDError, IOError):
    """Bad magic, truncated payload or inconsistent bank/basis file"""


class ConfigurationError(MemSVDError, ValueError):
    pass
