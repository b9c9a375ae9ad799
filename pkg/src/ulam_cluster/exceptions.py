"""Exception hierarchy.

Every error raised by the library derives from :class:`UlamError` so callers
(and the CLI) can map failures to exit codes by category.
"""


class UlamError(Exception):
    """Base class for all library errors."""


class DataError(UlamError, ValueError):
    """Invalid input data (maps to CLI exit code 3)."""


class DimensionZero(DataError):
    def __init__(self):
        super().__init__("permutation is empty (dimension 0)")


class NotBijection(DataError):
    def __init__(self, symbol, d=None):
        self.symbol = symbol
        msg = f"not a permutation: symbol {symbol!r} is duplicated or out of range"
        if d is not None:
            msg += f" 1..{d}"
        super().__init__(msg)


class DimensionMismatch(DataError):
    def __init__(self, d1, d2):
        self.dims = (d1, d2)
        super().__init__(f"dimension mismatch: {d1} != {d2}")


class ParseError(DataError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class WrongArity(DataError):
    def __init__(self, got, expected=5):
        super().__init__(f"expected exactly {expected} permutations, got {got}")


class VertexRemoved(DataError):
    def __init__(self, v):
        super().__init__(f"vertex {v} has been removed from the tournament")


class CyclicGraph(UlamError, RuntimeError):
    """A directed triangle survived cycle removal (internal invariant)."""


class EmptyDataset(DataError):
    def __init__(self):
        super().__init__("dataset is empty")


class EmptyMedianSet(DataError):
    def __init__(self):
        super().__init__("median set is empty")


class BudgetExceeded(UlamError, RuntimeError):
    """An enumeration would exceed its configured cap (CLI exit code 4)."""

    def __init__(self, required, budget, what="candidate tuples"):
        self.required = required
        self.budget = budget
        super().__init__(f"{what}: {required} required, budget is {budget}")


class InvalidConfig(DataError):
    pass


class StreamOverflow(DataError):
    def __init__(self, n_bound):
        super().__init__(f"stream longer than n_bound={n_bound}")


class EmptySketch(UlamError, RuntimeError):
    def __init__(self):
        super().__init__("sketch holds no candidate permutations")
