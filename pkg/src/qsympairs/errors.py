"""Exception types shared across the package."""

from __future__ import annotations


class QSPError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "error"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class DivisionByZero(QSPError, ZeroDivisionError):
    code = "DivisionByZero"


class ParseError(QSPError, ValueError):
    code = "ParseError"


class PoleAtOne(QSPError, ValueError):
    code = "PoleAtOne"


class NoSquareRootInField(QSPError, ValueError):
    code = "NoSquareRootInField"


class NotGCM(QSPError, ValueError):
    code = "NotGCM"


class NotSymmetrizable(QSPError, ValueError):
    code = "NotSymmetrizable"


class IndexSetTooLarge(QSPError, ValueError):
    code = "IndexSetTooLarge"


class NotFiniteType(QSPError, ValueError):
    code = "NotFiniteType"


class NotIndecomposable(QSPError, ValueError):
    code = "NotIndecomposable"


class NotUnoriented(QSPError, ValueError):
    code = "NotUnoriented"


class HeightCapExceeded(QSPError, RuntimeError):
    code = "HeightCapExceeded"


class InvalidCharacter(QSPError, ValueError):
    code = "InvalidCharacter"


class DegeneratePair(QSPError, ValueError):
    code = "DegeneratePair"


class NotAdmissible(QSPError, ValueError):
    code = "NotAdmissible"


class InvalidParameters(QSPError, ValueError):
    code = "InvalidParameters"


class ComponentNotFound(QSPError, RuntimeError):
    code = "ComponentNotFound"


class UnsupportedCase(QSPError, ValueError):
    code = "UnsupportedCase"


class InvariantViolation(QSPError, RuntimeError):
    """An identity that must hold exactly was found to fail."""

    code = "InvariantViolation"
