# Core module exports
from ubmat.core.config import settings, get_settings, get_tolerances, Settings, Tolerances
from ubmat.core.errors import UBMatError, InputFormatError

__all__ = [
    "settings",
    "get_settings",
    "get_tolerances",
    "Settings",
    "Tolerances",
    "UBMatError",
    "InputFormatError"
]
