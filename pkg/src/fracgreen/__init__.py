"""Green's function of the space-time-fractional Schroedinger equation.

Submodules: special_fn (complex gamma), hfun (Fox H-function), green
(Green's function forms), oracle (quadrature verifiers), scattering (Born
approximation), cli.
"""
from ._backend import COMPILED, backend_name

__version__ = "0.1.0"

__all__ = ["COMPILED", "backend_name", "__version__"]
