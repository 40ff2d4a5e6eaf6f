"""Exception types shared across the package."""


class FluidrecError(Exception):
    """Base class for all package-specific errors."""


# -- dataset ---------------------------------------------------------------

class UnknownColumn(FluidrecError):
    pass


class NonNumericCell(FluidrecError):
    def __init__(self, row: int, col: str, value: str = ""):
        self.row = row
        self.col = col
        super().__init__(f"non-numeric cell at row {row}, column {col!r}: {value!r}")


class MissingLabelColumn(FluidrecError):
    pass


class AllMissingFeature(FluidrecError):
    pass


class ScalerNotFitted(FluidrecError):
    pass


class ClassTooSmall(FluidrecError):
    pass


class InvalidSpec(FluidrecError):
    pass


# -- models / ife ----------------------------------------------------------

class DimensionMismatch(FluidrecError):
    pass


class NonFiniteLoss(FluidrecError):
    pass


class SingleClassDataset(FluidrecError):
    pass


class EmptyIndirectBlock(FluidrecError):
    pass


# -- feature selection -----------------------------------------------------

class EmptyFeatureSet(FluidrecError):
    pass


# -- optimizer -------------------------------------------------------------

class NegativeBudget(FluidrecError):
    pass


class NonFiniteGradient(FluidrecError):
    pass
