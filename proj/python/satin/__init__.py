"""Collective-spin simulation of cavity twisting, untwisting and signal amplification."""

from satin._core import *  # noqa: F401,F403
from satin._core import __version__  # noqa: F401
