"""Python interface to the rrmgame core library."""

from ._rrmgame import *  # noqa: F401,F403
from ._rrmgame import __doc__  # noqa: F401
