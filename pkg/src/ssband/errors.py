"""Exception types raised across the package."""


class SsbandError(Exception):
    """Base class for all package errors."""


class UnknownFamily(SsbandError, ValueError):
    pass


class UnsupportedOrder(SsbandError, ValueError):
    pass


class NonConvergence(SsbandError, RuntimeError):
    pass


class IndexOutOfRange(SsbandError, IndexError):
    pass


class InvalidRange(SsbandError, ValueError):
    pass


class InsufficientLevels(SsbandError, ValueError):
    pass


class ShiftCollision(SsbandError, ValueError):
    pass


class ScheduleTooShort(SsbandError, ValueError):
    pass


class DegenerateBase(SsbandError, ValueError):
    pass


class NotADensity(SsbandError, ValueError):
    pass


class DesignTooCoarse(SsbandError, ValueError):
    pass


class LevelOutOfRange(SsbandError, ValueError):
    pass


class TooFewLevels(SsbandError, ValueError):
    pass


class ModeMismatch(SsbandError, ValueError):
    pass


class Assumption2Failed(SsbandError, RuntimeError):
    pass


class ConfigError(SsbandError, ValueError):
    pass
