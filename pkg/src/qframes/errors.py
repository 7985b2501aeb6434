"""Domain errors. The class name is the error name echoed by the CLI and service."""


class QFramesError(Exception):
    """Base class for every domain error raised by the package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class InvalidState(QFramesError, ValueError):
    pass


class NotRepresentable(QFramesError, ValueError):
    pass


class CannotAlign(QFramesError, ValueError):
    pass


class BaseMismatch(QFramesError, ValueError):
    pass


class ParseError(QFramesError, ValueError):
    pass


class DimensionMismatch(QFramesError, ValueError):
    pass


class NotCauchy(QFramesError):
    pass


class InvalidSpacing(QFramesError, ValueError):
    pass


class InvalidLattice(QFramesError, ValueError):
    pass


class IndexOutOfRange(QFramesError, IndexError):
    pass


class UnknownFrame(QFramesError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class LatticeTooLarge(QFramesError):
    pass


class LatticeMismatch(QFramesError, ValueError):
    pass


class ImageMismatch(QFramesError):
    pass
