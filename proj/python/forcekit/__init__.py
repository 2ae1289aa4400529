"""Forcing-theory toolkit: symbolic dynamics, interval maps, rotation sets and planar forcing."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
