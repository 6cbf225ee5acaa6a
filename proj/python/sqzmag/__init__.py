"""Squeezed-light magnetometer simulator."""

from ._sqzmag import *  # noqa: F401,F403
from ._sqzmag import __version__  # noqa: F401
