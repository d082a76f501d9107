class PermGridError(Exception):
    """Base class for domain errors raised by permgrid."""


class InvalidPermutationError(PermGridError, ValueError):
    pass


class NotInClassError(PermGridError, ValueError):
    pass


class ResourceLimitError(PermGridError):
    pass


class PreconditionError(PermGridError, ValueError):
    pass


class InconsistentStructureError(PermGridError, ValueError):
    pass


class SeriesError(PermGridError, ArithmeticError):
    pass
