"""Noise-extracting encoder, memorizing generator, ReLU compiler and the
adversarial objective used to verify them."""

from ._memgan import *  # noqa: F401,F403
from ._memgan import __doc__  # noqa: F401

__version__ = "0.1.0"
