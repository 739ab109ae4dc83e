"""Gradient methods for strictly convex quadratics."""

try:
    from ._qgm import *  # noqa: F401,F403  (installed wheel layout)
except ImportError:
    from _qgm import *  # noqa: F401,F403  (in-tree build on PYTHONPATH)

__version__ = "0.1.0"
