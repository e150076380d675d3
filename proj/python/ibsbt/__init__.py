"""Python surface of the ibsbt backtester (thin re-export of the C++ core)."""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
