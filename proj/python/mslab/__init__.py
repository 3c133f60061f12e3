"""Numerical laboratory for weighted plane metrics and spike surfaces.

Thin re-export of the compiled extension: distances, ball measures,
cover-content length, conformal modulus, and the condition checkers over
the five built-in example spaces.
"""

try:
    from ._mslab import *  # noqa: F401,F403  (installed package layout)
    from ._mslab import __doc__ as _core_doc
except ImportError:  # pragma: no cover - build-tree layout used by ctest
    from _mslab import *  # noqa: F401,F403
    from _mslab import __doc__ as _core_doc

__all__ = [
    "example_ids",
    "descriptor",
    "dist",
    "geodesic",
    "ball_areas",
    "q_dist",
    "mu_length",
    "modulus_ring",
    "modulus_quad",
    "check",
]
