"""Numerical laboratory for modular-form solutions of self-dual Bianchi IX
geometries and torus lattice sums from string perturbation theory."""

__version__ = "0.1.0"

from . import (  # noqa: F401
    amplitudes,
    conformal,
    errors,
    flows,
    geometry,
    halphen,
    maass,
    modforms,
    numdiff,
)
