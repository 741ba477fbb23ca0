"""Exception hierarchy."""


class FubiniError(Exception):
    """Base class for all package errors."""


class LevelTooDeep(FubiniError):
    pass


class DepthTooLarge(FubiniError):
    pass


class UnknownFieldName(FubiniError, KeyError):
    pass


class UnknownDomainName(FubiniError, KeyError):
    pass


class CoverNotAchievable(FubiniError):
    """No grid level up to the limits yields a cover of area below ``eps``.

    ``area`` is the smallest covering area reached before giving up.
    """

    def __init__(self, message: str, *, area: float = float("nan"), level: int = -1):
        super().__init__(message)
        self.area = area
        self.level = level
