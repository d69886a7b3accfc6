"""Exceptions raised by the textile K-theory toolkit."""

from typing import Any, Optional, Tuple


class TextileError(Exception):
    """Base exception for toolkit errors."""

    pass


class ConfigurationError(TextileError):
    """Raised when the workbench configuration is invalid."""

    pass


class ParseError(TextileError):
    """Raised when a matrix file cannot be parsed."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ZeroRowOrColumn(TextileError):
    """Raised when an integer matrix has an all-zero row or column."""

    def __init__(self, kind: str, index: int):
        super().__init__(f"{kind} {index} is zero")
        self.kind = kind
        self.index = index


class SizeMismatch(TextileError):
    """Raised when matrix sizes do not agree."""

    pass


class DomainGap(TextileError):
    """Raised when a specification has no image for a symbol."""

    def __init__(self, symbol: str):
        super().__init__(f"specification has no image for {symbol}")
        self.symbol = symbol


class NotEdgeDistinct(TextileError):
    """Raised when a symbol occurs in more than one cell of a matrix."""

    def __init__(self, symbol: str):
        super().__init__(f"symbol {symbol} occurs more than once")
        self.symbol = symbol


class InvalidMatrix(TextileError):
    """Raised when a symbolic matrix is not essential or not left-resolving."""

    def __init__(self, report: Any):
        problems = []
        if not report.essential:
            problems.append("not essential")
        if not report.left_resolving:
            problems.append("not left-resolving")
        super().__init__("symbolic matrix is " + " and ".join(problems))
        self.report = report


class UnknownSymbol(TextileError):
    """Raised when a word uses a symbol outside the alphabet."""

    def __init__(self, symbol: str):
        super().__init__(f"unknown symbol {symbol}")
        self.symbol = symbol


class DomainMismatch(TextileError):
    """Raised when a specification's domain or codomain is not the admissible pair set."""

    pass


class CommutationFailure(TextileError):
    """Raised when a pair violates the commutation relation of its specification."""

    def __init__(self, pair: Tuple[str, str], image: Tuple[str, str]):
        super().__init__(
            f"commutation fails for ({pair[0]},{pair[1]}) -> ({image[0]},{image[1]})"
        )
        self.pair = pair
        self.image = image


class NotCommuting(TextileError):
    """Raised when AB != BA."""

    def __init__(self, row: int, col: int, left: int, right: int):
        super().__init__(f"AB != BA at cell ({row},{col}): {left} != {right}")
        self.cell = (row, col)


class NoSpecification(TextileError):
    """Raised when no specification exists or the requested index is out of range."""

    pass


class NotPaved(TextileError):
    """Raised when a patch has mismatched edges."""

    pass


class Incompatible(TextileError):
    """Raised when tile fill-in needs a pair outside the admissible pair sets."""

    def __init__(self, position: Tuple[int, int], pair: Tuple[str, str]):
        super().__init__(
            f"no tile fits at ({position[0]},{position[1]}): "
            f"pair ({pair[0]},{pair[1]}) is not admissible"
        )
        self.position = position
        self.pair = pair


class InadmissibleDiagonal(TextileError):
    """Raised when a diagonal word has a zero composite."""

    pass


class InternalInvariant(TextileError):
    """Raised when a computed object fails a guaranteed property."""

    pass


class NotSquare(TextileError):
    """Raised when K-groups are requested for a system that does not form square."""

    pass


class NegativeEntry(TextileError):
    """Raised when a matrix that must be nonnegative has a negative entry."""

    pass
