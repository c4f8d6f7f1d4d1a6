"""Complex gamma function family.

``gamma`` uses a 15-term Lanczos sum (g = 607/128) with reflection for
Re z < 1/2.  ``log_gamma`` is computed independently (upward recurrence to
Re z >= 10, then Stirling) so that exp(log_gamma) = gamma is a real check.
"""
from ._backend import core

POLE_TOL = 1e-12


def gamma(z):
    """Gamma(z) for complex z.

    Raises GammaPoleError at non-positive integers and GammaOverflowError
    (carrying ``log_value``) when the result exceeds double range.
    """
    return core.gamma(complex(z))


def rgamma(z):
    """1/Gamma(z); exactly 0 at the poles of Gamma."""
    return core.rgamma(complex(z))


def log_gamma(z):
    """Principal branch of log Gamma(z)."""
    return core.log_gamma(complex(z))


def is_pole(z):
    return core.pole_index(complex(z)) >= 0
