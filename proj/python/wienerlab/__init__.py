"""Discrete Wiener-space laboratory: paths, shifts, quotients."""

try:
    from wienerlab._core import *  # noqa: F401,F403  (wheel layout)
except ImportError:
    from _core import *  # noqa: F401,F403  (in-tree build layout)

__version__ = "0.1.0"
