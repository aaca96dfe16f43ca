"""Capacity and cache planning for two-tier cellular networks."""

from ._core import *  # noqa: F401,F403
from ._core import __doc__  # noqa: F401
