"""Signature monitoring and synthesis for cellular control-plane traces."""

from ._core import *  # noqa: F401,F403
from ._core import Error, ParseError, ValidationError  # noqa: F401
