"""Exception hierarchy shared by every idegen module."""

from __future__ import annotations


class IdegenError(Exception):
    """Base class for all library errors."""


class PolySyntaxError(IdegenError, ValueError):
    """Malformed polynomial text. ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int, text: str = ""):
        self.offset = offset
        self.text = text
        super().__init__(f"{message} (at byte {offset})")


class UnknownVariable(PolySyntaxError):
    def __init__(self, name: str, offset: int, text: str = ""):
        self.name = name
        super().__init__(f"unknown variable {name!r}", offset, text)


class MissingCoordinate(IdegenError, KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"point does not assign coordinate {name!r}")

    def __str__(self) -> str:
        return self.args[0]


class DimensionMismatch(IdegenError, ValueError):
    pass


class NonConstantDeterminant(IdegenError, ArithmeticError):
    def __init__(self, det):
        self.det = det
        super().__init__(f"determinant is not constant: {det}")


class SingularMatrix(IdegenError, ArithmeticError):
    pass


class SingularMetricAtPoint(IdegenError, ArithmeticError):
    pass


class ZeroBoostEntry(IdegenError, ValueError):
    def __init__(self, boost):
        self.boost = tuple(boost)
        super().__init__(
            f"boost vector {self.boost} has zero entries; move those null pairs "
            "into the transverse block first"
        )


class CoefficientOutsideShape(IdegenError, ValueError):
    pass


class NotClosed(IdegenError, ValueError):
    def __init__(self, row: int, pair: tuple[int, int]):
        self.row = row
        self.pair = pair
        m, n = pair
        super().__init__(
            f"row {row} of a is not v-closed: d/dv{n} a[{row},{m}] != d/dv{m} a[{row},{n}]"
        )


class NotTriangular(IdegenError, ValueError):
    pass


class WalkerInconsistent(IdegenError, ArithmeticError):
    pass


class BlowUp(IdegenError, ArithmeticError):
    def __init__(self, component: str, term: str, weight: int):
        self.component = component
        self.term = term
        self.weight = weight
        super().__init__(f"limit diverges: {component} term {term} has weight +{weight}")


class NonZeroVBasePoint(IdegenError, ValueError):
    pass


class MetricFormatError(IdegenError, ValueError):
    """Metric file violates the JSON schema."""
