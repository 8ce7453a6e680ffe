"""Exception hierarchy shared across the package."""


class FoliaError(Exception):
    """Base class for all package errors."""


class NonUnitDeterminant(FoliaError):
    pass


class ConstructionFailure(FoliaError):
    pass


class IndexOutOfRange(FoliaError):
    pass


class NonTermination(FoliaError):
    pass


class PathTooLong(FoliaError):
    pass


class RadiusTooLarge(FoliaError):
    pass


class DimensionMismatch(FoliaError):
    pass


class EigenFailure(FoliaError):
    pass


class StepOutOfRange(FoliaError):
    pass


class DegenerateFiber(FoliaError):
    pass


class TruncationError(FoliaError):
    pass


class SupNormViolation(FoliaError):
    pass


class EquivarianceFailure(FoliaError):
    def __init__(self, message, worst_sample=None, residual=None):
        super().__init__(message)
        self.worst_sample = worst_sample
        self.residual = residual


class ConfigError(FoliaError):
    pass


class ParseError(FoliaError):
    def __init__(self, message, offset=None):
        super().__init__(message)
        self.offset = offset
