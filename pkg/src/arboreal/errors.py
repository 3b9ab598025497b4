"""Exception types shared across the package."""


class ArborealError(Exception):
    pass


class DimensionError(ArborealError, ValueError):
    pass


class SingularMatrixError(ArborealError, ArithmeticError):
    def __init__(self, rank: int, size: int):
        super().__init__(f"matrix is singular: rank {rank} < {size}")
        self.rank = rank
        self.size = size


class InvalidOperationError(ArborealError, ValueError):
    pass


class SizeLimitError(ArborealError):
    pass


class ModeError(ArborealError, ValueError):
    """Symbolic (uniform beta) mode was requested on a graph with distinct weights."""


class ConditioningError(ArborealError, ValueError):
    pass


class DisconnectedError(ArborealError, ValueError):
    """Terminals lie in different components (infinite effective resistance)."""


class GraphFormatError(ArborealError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


class TooDenseError(ArborealError):
    pass
