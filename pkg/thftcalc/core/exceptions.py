"""
Exception hierarchy

ConfigError maps to exit code 2, NumericalError to exit code 3.
"""

from typing import Optional


class ThftError(Exception):
    """Base class for all calculator errors"""


class ConfigError(ThftError, ValueError):
    """Invalid experiment configuration or operation input"""


class SignatureMismatchError(ConfigError):
    """Exterior-algebra operands built over different signatures"""


class RefusedLimitError(ConfigError):
    """Requested an eps = 0 value whose limit is not guaranteed"""


class NumericalError(ThftError, RuntimeError):
    """Quadrature or extrapolation failed to meet its tolerance"""

    def __init__(self, message: str, residual: Optional[float] = None):
        super().__init__(message)
        self.residual = residual

    def __str__(self) -> str:
        base = super().__str__()
        if self.residual is None:
            return base
        return f"{base} (residual estimate {self.residual:.3e})"
