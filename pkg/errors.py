"""
Exception hierarchy for the sampler.
"""

from typing import Optional


class SamplingError(Exception):
    """Base class for every error raised by the sampler"""


class ConfigurationError(SamplingError):
    """Invalid sampler parameters (log base, threshold, radius, step, presets)"""


class ContractError(SamplingError):
    """A provider or score table broke one of its invariants"""


class InputError(SamplingError):
    """Malformed or inconsistent input data"""

    def __init__(self, message: str, line: Optional[int] = None, content: Optional[str] = None):
        self.reason = message
        self.line = line
        self.content = content
        if line is not None:
            message = f"line {line}: {message}"
        if content is not None:
            message = f"{message}: {content!r}"
        super().__init__(message)


class UnsupportedDimensionError(InputError):
    """The operation is only defined for a particular point dimension"""


class UndefinedRatioError(SamplingError):
    """A retention ratio was requested against an empty original"""
