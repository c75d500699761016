"""Exception types shared across the package."""


class HicatError(Exception):
    pass


class NotComposable(HicatError):
    """Raised when a composition is requested outside its domain."""

    def __init__(self, depth, x, y):
        self.depth = depth
        self.x = x
        self.y = y
        super().__init__(f"cells {x} and {y} are not composable at depth {depth!r}")


class CellBudgetExceeded(HicatError):
    """Exhaustive validators refuse categories above the configured cell budget."""

    def __init__(self, cell_count, budget):
        self.cell_count = cell_count
        self.budget = budget
        super().__init__(
            f"category has {cell_count} cells, exceeding the validator budget of {budget}; "
            f"raise the budget explicitly if you really want an exhaustive scan"
        )


class MissingConjugate(HicatError):
    def __init__(self, cell):
        self.cell = cell
        super().__init__(f"no conjugate supplied for 1-cell {cell}")


class NonCommutingFamily(HicatError):
    def __init__(self, a, b, witness):
        self.a = a
        self.b = b
        self.witness = witness
        super().__init__(
            f"involutions with variances {set(a)} and {set(b)} do not commute (witness cell {witness})"
        )


class UnassignedVariance(HicatError):
    def __init__(self, alpha):
        self.alpha = alpha
        super().__init__(f"no coefficient pair assigned for base involution {alpha!r}")


class UnsupportedCoefficient(HicatError):
    pass


class DimMismatch(HicatError):
    pass


class SpecFileError(HicatError):
    """Parse or reference error in a category/section/hypermatrix text file."""

    def __init__(self, path, lineno, message):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")
