"""Exception types shared across the package."""

from __future__ import annotations


class HFSignError(Exception):
    """Base class for all package errors."""


class PowerTooLarge(HFSignError):
    pass


class InvalidFlow(HFSignError):
    pass


class MovingCoordinate(HFSignError):
    pass


class NotComposable(HFSignError):
    pass


class SharedCoordinates(HFSignError):
    pass


class DecompositionCountMismatch(HFSignError):
    pass


class InconsistentSystem(HFSignError):
    pass


class DimensionMismatch(HFSignError):
    pass


class PowerMismatch(HFSignError):
    pass


class ScopeMismatch(HFSignError):
    pass


class NotEquivalent(HFSignError):
    pass


class BadDiagram(HFSignError):
    pass


class FlowNotInDiagram(HFSignError):
    pass


class DifferentialNotSquareZero(HFSignError):
    pass
